#include "morphcloud/mad.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "morphcloud/csv.hpp"
#include "morphcloud/errors.hpp"
#include "morphcloud/kdtree.hpp"
#include "morphcloud/miniball.hpp"
#include "morphcloud/parallel.hpp"
#include "morphcloud/quality.hpp"

namespace morphcloud {

std::vector<std::string> subject_keys(const std::string& sample_id) {
    std::string base = sample_id.substr(0, sample_id.find('_'));
    std::vector<std::string> keys;
    size_t start = 0;
    while (start <= base.size()) {
        size_t plus = base.find('+', start);
        if (plus == std::string::npos) {
            keys.push_back(base.substr(start));
            break;
        }
        keys.push_back(base.substr(start, plus - start));
        start = plus + 1;
    }
    return keys;
}

namespace {

void mean_and_std(const std::vector<double>& v, double& mean, double& sd) {
    double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    mean = sum / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    sd = std::sqrt(var / n);
}

} // namespace

FeatureVector builtin_features(const ColoredPointCloud& cloud, const std::string& sample_id,
                               SampleLabel label) {
    QualityReport q = quality_report(cloud);

    std::vector<Vec3d> pts(cloud.size());
    for (size_t i = 0; i < cloud.size(); ++i) pts[i] = cloud.point(i);
    KdTree tree(pts);
    std::vector<double> nn(cloud.size());
    parallel_for(0, cloud.size(), [&](size_t i) {
        std::vector<size_t> two = tree.knn(pts[i], 2);
        size_t other = two[0] == i ? two[1] : two[0];
        nn[i] = dist(pts[i], pts[other]);
    });
    double nn_sum = 0.0;
    for (double d : nn) nn_sum += d;

    FeatureVector out;
    out.sample_id = sample_id;
    out.label = label;
    out.values.reserve(16);
    double m = 0.0, s = 0.0;
    for (const std::vector<double>* feat :
         {&q.geometry.linearity, &q.geometry.planarity, &q.geometry.sphericity,
          &q.geometry.anisotropy, &q.geometry.curvature}) {
        mean_and_std(*feat, m, s);
        out.values.push_back(m);
    }
    for (const std::vector<double>* feat :
         {&q.geometry.linearity, &q.geometry.planarity, &q.geometry.sphericity,
          &q.geometry.anisotropy, &q.geometry.curvature}) {
        mean_and_std(*feat, m, s);
        out.values.push_back(s);
    }
    out.values.push_back(q.l_color);
    out.values.push_back(q.a_color);
    out.values.push_back(q.b_color);
    out.values.push_back(std::log(static_cast<double>(cloud.size())));
    out.values.push_back(min_enclosing_sphere(cloud).radius);
    out.values.push_back(nn_sum / static_cast<double>(cloud.size()));
    return out;
}

double LinearModel::score(const std::vector<double>& values) const {
    double s = bias;
    for (size_t j = 0; j < weights.size(); ++j)
        s += weights[j] * (values[j] - mean[j]) / stddev[j];
    return s;
}

namespace {

double svm_objective(const std::vector<std::vector<double>>& z, const std::vector<double>& y,
                     const std::vector<double>& w, double b, double c) {
    double reg = 0.0;
    for (double wj : w) reg += wj * wj;
    double hinge = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        double margin = b;
        for (size_t j = 0; j < w.size(); ++j) margin += w[j] * z[i][j];
        hinge += std::max(0.0, 1.0 - y[i] * margin);
    }
    return 0.5 * reg + c * hinge;
}

} // namespace

LinearModel train_linear_svm(const std::vector<FeatureVector>& train, double c, size_t epochs,
                             uint64_t seed, std::vector<double>* objective_trace) {
    size_t bona = 0, morph = 0;
    for (const auto& f : train) (f.label == SampleLabel::Morph ? morph : bona) += 1;
    if (bona == 0 || morph == 0)
        throw Error(Errc::SingleClass, "training set needs both bona fide and morph samples");
    if (bona < 2 || morph < 2)
        throw Error(Errc::InvalidArgument, "training needs at least 2 samples per class");
    if (!(c > 0.0)) throw Error(Errc::InvalidArgument, "regularization c must be positive");
    if (epochs == 0) throw Error(Errc::InvalidArgument, "epochs must be >= 1");

    size_t n = train.size(), d = train[0].values.size();
    if (d == 0) throw Error(Errc::InvalidArgument, "feature vectors are empty");
    for (const auto& f : train) {
        if (f.values.size() != d)
            throw Error(Errc::DimensionMismatch,
                        "feature length " + std::to_string(f.values.size()) + " vs " +
                            std::to_string(d) + " in sample '" + f.sample_id + "'");
        for (double v : f.values)
            if (!std::isfinite(v))
                throw Error(Errc::InvalidArgument,
                            "non-finite feature in sample '" + f.sample_id + "'");
    }

    LinearModel model;
    model.c = c;
    model.epochs = epochs;
    model.seed = seed;
    model.mean.assign(d, 0.0);
    model.stddev.assign(d, 0.0);
    for (size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (const auto& f : train) sum += f.values[j];
        model.mean[j] = sum / static_cast<double>(n);
        double var = 0.0;
        for (const auto& f : train) {
            double dlt = f.values[j] - model.mean[j];
            var += dlt * dlt;
        }
        model.stddev[j] = std::sqrt(var / static_cast<double>(n));
        if (model.stddev[j] == 0.0) {
            model.dropped_dims.push_back(j);
            model.stddev[j] = 1.0; // z-scores become identically 0: no gradient, weight stays 0
        }
    }

    std::vector<std::vector<double>> z(n, std::vector<double>(d));
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < d; ++j)
            z[i][j] = (train[i].values[j] - model.mean[j]) / model.stddev[j];
        y[i] = train[i].label == SampleLabel::Morph ? 1.0 : -1.0;
    }

    std::vector<double> w(d, 0.0), gw(d), cand(d);
    double b = 0.0;
    double objective = svm_objective(z, y, w, b, c);
    double eta = 1.0 / (1.0 + c * static_cast<double>(n));
    if (objective_trace) {
        objective_trace->clear();
        objective_trace->reserve(epochs);
    }
    for (size_t epoch = 0; epoch < epochs; ++epoch) {
        gw = w;
        double gb = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double margin = b;
            for (size_t j = 0; j < d; ++j) margin += w[j] * z[i][j];
            if (y[i] * margin < 1.0) {
                for (size_t j = 0; j < d; ++j) gw[j] -= c * y[i] * z[i][j];
                gb -= c * y[i];
            }
        }
        // backtracking: shrink the step until the full-batch objective improves
        for (int halving = 0; halving < 60; ++halving) {
            for (size_t j = 0; j < d; ++j) cand[j] = w[j] - eta * gw[j];
            double cand_b = b - eta * gb;
            double next = svm_objective(z, y, cand, cand_b, c);
            if (next <= objective) {
                w = cand;
                b = cand_b;
                objective = next;
                eta *= 1.2;
                break;
            }
            eta *= 0.5;
        }
        if (objective_trace) objective_trace->push_back(objective);
    }

    model.weights = std::move(w);
    model.bias = b;
    std::set<std::string> subjects;
    for (const auto& f : train)
        for (const auto& key : subject_keys(f.sample_id)) subjects.insert(key);
    model.train_subjects.assign(subjects.begin(), subjects.end());
    return model;
}

MadEvalReport evaluate(const LinearModel& model, const std::vector<FeatureVector>& test) {
    if (test.empty()) throw Error(Errc::InvalidArgument, "evaluation set is empty");
    std::set<std::string> trained(model.train_subjects.begin(), model.train_subjects.end());
    for (const auto& f : test) {
        if (f.values.size() != model.weights.size())
            throw Error(Errc::DimensionMismatch,
                        "sample '" + f.sample_id + "' has " + std::to_string(f.values.size()) +
                            " features, model expects " + std::to_string(model.weights.size()));
        for (double v : f.values)
            if (!std::isfinite(v))
                throw Error(Errc::InvalidArgument,
                            "non-finite feature in sample '" + f.sample_id + "'");
        for (const auto& key : subject_keys(f.sample_id))
            if (trained.count(key))
                throw Error(Errc::LeakedSplit,
                            "subject '" + key + "' of test sample '" + f.sample_id +
                                "' appears in the training set");
    }

    MadEvalReport report;
    report.scores.resize(test.size());
    parallel_for(0, test.size(), [&](size_t i) { report.scores[i] = model.score(test[i].values); });

    std::vector<double> attack, bonafide;
    for (size_t i = 0; i < test.size(); ++i) {
        if (test[i].label == SampleLabel::Morph)
            attack.push_back(report.scores[i]);
        else
            bonafide.push_back(report.scores[i]);
    }
    report.morph_count = attack.size();
    report.bonafide_count = bonafide.size();
    report.det = det_metrics(attack, bonafide);
    return report;
}

std::vector<FeatureVector> load_feature_csv(const std::string& path) {
    std::vector<FeatureVector> out;
    for_each_csv_row(path, 3, 2, [&](const std::vector<std::string>& cells, size_t lineno) {
        std::string where = path + ":" + std::to_string(lineno);
        FeatureVector f;
        f.sample_id = cells[0];
        if (cells[1] == "bonafide")
            f.label = SampleLabel::Bonafide;
        else if (cells[1] == "morph")
            f.label = SampleLabel::Morph;
        else
            throw Error(Errc::MalformedCsv,
                        where + ": label must be bonafide or morph, got '" + cells[1] + "'");
        for (size_t i = 2; i < cells.size(); ++i) {
            double v = parse_csv_number(cells[i], path, lineno);
            if (!std::isfinite(v)) throw Error(Errc::MalformedCsv, where + ": non-finite value");
            f.values.push_back(v);
        }
        if (!out.empty() && f.values.size() != out.front().values.size())
            throw Error(Errc::DimensionMismatch,
                        where + ": row has " + std::to_string(f.values.size()) +
                            " values, first row has " +
                            std::to_string(out.front().values.size()));
        out.push_back(std::move(f));
    });
    if (out.empty()) throw Error(Errc::InvalidArgument, "'" + path + "' has no feature rows");
    return out;
}

void save_linear_model(const LinearModel& model, const std::string& path) {
    nlohmann::json j;
    j["format"] = "morphcloud-linear-svm-v1";
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["mean"] = model.mean;
    j["stddev"] = model.stddev;
    j["dropped_dims"] = model.dropped_dims;
    j["train_subjects"] = model.train_subjects;
    j["c"] = model.c;
    j["epochs"] = model.epochs;
    j["seed"] = model.seed;
    std::ofstream outf(path);
    if (!outf) throw Error(Errc::IoError, "cannot write '" + path + "'");
    outf << j.dump(2) << "\n";
    if (!outf) throw Error(Errc::IoError, "short write to '" + path + "'");
}

LinearModel load_linear_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::MissingFile, "cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, "'" + path + "' is not valid JSON: " + e.what());
    }
    LinearModel model;
    try {
        model.weights = j.at("weights").get<std::vector<double>>();
        model.bias = j.at("bias").get<double>();
        model.mean = j.at("mean").get<std::vector<double>>();
        model.stddev = j.at("stddev").get<std::vector<double>>();
        model.dropped_dims = j.at("dropped_dims").get<std::vector<size_t>>();
        model.train_subjects = j.at("train_subjects").get<std::vector<std::string>>();
        model.c = j.at("c").get<double>();
        model.epochs = j.at("epochs").get<size_t>();
        model.seed = j.at("seed").get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, "'" + path + "' is missing model fields: " + e.what());
    }
    if (model.mean.size() != model.weights.size() || model.stddev.size() != model.weights.size())
        throw Error(Errc::InvalidArgument, "'" + path + "' has inconsistent model dimensions");
    for (double s : model.stddev)
        if (!(s > 0.0))
            throw Error(Errc::InvalidArgument, "'" + path + "' has non-positive stddev entries");
    return model;
}

} // namespace morphcloud
