#include "morphcloud/biometrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "morphcloud/csv.hpp"
#include "morphcloud/errors.hpp"

namespace morphcloud {

namespace {

void require_finite(const std::vector<double>& scores, const char* what) {
    for (double s : scores)
        if (!std::isfinite(s))
            throw Error(Errc::InvalidArgument, std::string(what) + " contains a non-finite score");
}

} // namespace

void ScoreMatrix::validate() const {
    if (morphs.empty()) throw Error(Errc::InvalidArgument, "score matrix has no morphs");
    for (const auto& [id, subjects] : morphs)
        for (size_t s = 0; s < 2; ++s) {
            if (subjects[s].empty())
                throw Error(Errc::CountMismatch, "morph '" + id + "' subject " +
                                                     std::to_string(s + 1) + " has no attempts");
            require_finite(subjects[s], "score matrix");
        }
    require_finite(mated, "mated list");
    require_finite(nonmated, "non-mated list");
}

double threshold_at_far(const std::vector<double>& nonmated, double far) {
    if (nonmated.empty()) throw Error(Errc::InvalidArgument, "threshold needs non-mated scores");
    if (!(far > 0.0 && far < 1.0))
        throw Error(Errc::InvalidArgument, "far must lie strictly between 0 and 1");
    require_finite(nonmated, "non-mated list");

    std::vector<double> sorted = nonmated;
    std::sort(sorted.begin(), sorted.end());
    size_t n = sorted.size();
    auto allowed = static_cast<size_t>(std::floor(far * static_cast<double>(n)));
    // at t = sorted[i] (first occurrence), the count of scores >= t is n - i
    for (size_t i = 0; i < n; ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        if (n - i <= allowed) return sorted[i];
    }
    return std::nextafter(sorted.back(), std::numeric_limits<double>::infinity());
}

double mmpmr(const ScoreMatrix& scores, double threshold, bool min_over_attempts) {
    scores.validate();
    size_t passed = 0;
    for (const auto& [id, subjects] : scores.morphs) {
        bool all_subjects = true;
        for (const auto& attempts : subjects) {
            double agg = min_over_attempts
                             ? *std::min_element(attempts.begin(), attempts.end())
                             : *std::max_element(attempts.begin(), attempts.end());
            if (!(agg > threshold)) {
                all_subjects = false;
                break;
            }
        }
        if (all_subjects) ++passed;
    }
    return static_cast<double>(passed) / static_cast<double>(scores.morphs.size());
}

double fmmpmr(const ScoreMatrix& scores, double threshold) {
    scores.validate();
    size_t passed = 0;
    for (const auto& [id, subjects] : scores.morphs) {
        if (subjects[0].size() != subjects[1].size())
            throw Error(Errc::UnpairedAttempts,
                        "morph '" + id + "' has " + std::to_string(subjects[0].size()) +
                            " vs " + std::to_string(subjects[1].size()) + " attempts");
        bool all_attempts = true;
        for (size_t a = 0; a < subjects[0].size(); ++a)
            if (!(subjects[0][a] > threshold && subjects[1][a] > threshold)) {
                all_attempts = false;
                break;
            }
        if (all_attempts) ++passed;
    }
    return static_cast<double>(passed) / static_cast<double>(scores.morphs.size());
}

DetReport det_metrics(const std::vector<double>& attack_scores,
                      const std::vector<double>& bonafide_scores) {
    if (attack_scores.empty() || bonafide_scores.empty())
        throw Error(Errc::InvalidArgument, "det_metrics needs both attack and bona fide scores");
    require_finite(attack_scores, "attack list");
    require_finite(bonafide_scores, "bona fide list");

    std::vector<double> thresholds;
    thresholds.reserve(attack_scores.size() + bonafide_scores.size() + 1);
    thresholds.insert(thresholds.end(), attack_scores.begin(), attack_scores.end());
    thresholds.insert(thresholds.end(), bonafide_scores.begin(), bonafide_scores.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.push_back(
        std::nextafter(thresholds.back(), std::numeric_limits<double>::infinity()));

    std::vector<double> attack = attack_scores, bona = bonafide_scores;
    std::sort(attack.begin(), attack.end());
    std::sort(bona.begin(), bona.end());
    double na = static_cast<double>(attack.size()), nb = static_cast<double>(bona.size());

    DetReport report;
    report.curve.reserve(thresholds.size());
    for (double t : thresholds) {
        auto below_a = static_cast<double>(std::lower_bound(attack.begin(), attack.end(), t) -
                                           attack.begin());
        auto below_b = static_cast<double>(std::lower_bound(bona.begin(), bona.end(), t) -
                                           bona.begin());
        report.curve.push_back({t, below_a / na, 1.0 - below_b / nb});
    }

    // the curve starts at (APCER 0, BPCER 1) and ends at (1, 0); APCER - BPCER is
    // non-decreasing, so the sign change brackets the equal-error crossing
    report.eer = 0.5;
    for (size_t i = 0; i + 1 < report.curve.size(); ++i) {
        double d1 = report.curve[i].apcer - report.curve[i].bpcer;
        double d2 = report.curve[i + 1].apcer - report.curve[i + 1].bpcer;
        if (d1 > 0.0) {
            report.eer = report.curve[i].apcer; // crossing before the first point
            break;
        }
        if (d2 < 0.0) continue;
        double u = d1 == d2 ? 0.0 : -d1 / (d2 - d1);
        report.eer =
            report.curve[i].apcer + u * (report.curve[i + 1].apcer - report.curve[i].apcer);
        break;
    }

    auto bpcer_at = [&](double target) {
        double best = 1.0; // APCER at the lowest threshold is 0, so some point qualifies
        for (const DetPoint& p : report.curve)
            if (p.apcer <= target) best = std::min(best, p.bpcer);
        return best;
    };
    report.bpcer_at_apcer5 = bpcer_at(0.05);
    report.bpcer_at_apcer10 = bpcer_at(0.10);
    return report;
}

ScoreMatrix load_score_matrix_csv(const std::string& path) {
    ScoreMatrix matrix;
    std::map<std::string, std::array<std::map<long, double>, 2>> staged;
    for_each_csv_row(path, 4, 1, [&](const std::vector<std::string>& cells, size_t lineno) {
        std::string where = path + ":" + std::to_string(lineno);
        double subject = parse_csv_number(cells[1], path, lineno);
        if (subject != 1.0 && subject != 2.0)
            throw Error(Errc::MalformedCsv, where + ": subject_idx must be 1 or 2");
        double attempt = parse_csv_number(cells[2], path, lineno);
        if (attempt != std::floor(attempt))
            throw Error(Errc::MalformedCsv, where + ": attempt_idx must be an integer");
        double score = parse_csv_number(cells[3], path, lineno);
        if (!std::isfinite(score))
            throw Error(Errc::MalformedCsv, where + ": non-finite score");
        auto& slot = staged[cells[0]][static_cast<size_t>(subject) - 1];
        auto key = static_cast<long>(attempt);
        if (!slot.emplace(key, score).second)
            throw Error(Errc::MalformedCsv, where + ": duplicate attempt_idx " + cells[2]);
    });
    for (auto& [id, subjects] : staged) {
        auto& out = matrix.morphs[id];
        for (size_t s = 0; s < 2; ++s)
            for (const auto& [attempt, score] : subjects[s]) out[s].push_back(score);
    }
    matrix.validate();
    return matrix;
}

std::pair<std::vector<double>, std::vector<double>> load_labeled_scores_csv(
    const std::string& path) {
    std::pair<std::vector<double>, std::vector<double>> out; // (attack, bonafide)
    for_each_csv_row(path, 3, 1, [&](const std::vector<std::string>& cells, size_t lineno) {
        double score = parse_csv_number(cells[1], path, lineno);
        const std::string& label = cells[2];
        if (label == "morph")
            out.first.push_back(score);
        else if (label == "bonafide")
            out.second.push_back(score);
        else
            throw Error(Errc::MalformedCsv, path + ":" + std::to_string(lineno) +
                                                ": label must be bonafide or morph, got '" +
                                                label + "'");
    });
    if (out.first.empty() || out.second.empty())
        throw Error(Errc::InvalidArgument,
                    "'" + path + "' must contain both morph and bonafide rows");
    return out;
}

} // namespace morphcloud
