#include "morphcloud/quality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "morphcloud/errors.hpp"
#include "morphcloud/kdtree.hpp"
#include "morphcloud/linalg.hpp"
#include "morphcloud/parallel.hpp"

namespace morphcloud {

EigenFeatures local_eigen_features(const ColoredPointCloud& cloud, size_t k) {
    cloud.validate();
    if (k == 0) throw Error(Errc::InvalidArgument, "neighbor count k must be >= 1");
    if (k >= cloud.size())
        throw Error(Errc::InvalidArgument,
                    "k=" + std::to_string(k) + " needs more than k points, cloud has " +
                        std::to_string(cloud.size()));

    size_t n = cloud.size();
    std::vector<Vec3d> pts(n);
    for (size_t i = 0; i < n; ++i) pts[i] = cloud.point(i);
    KdTree tree(pts);

    EigenFeatures out;
    out.linearity.resize(n);
    out.planarity.resize(n);
    out.sphericity.resize(n);
    out.anisotropy.resize(n);
    out.curvature.resize(n);

    parallel_for(0, n, [&](size_t i) {
        // k+1 nearest including the query point itself, then drop the query
        std::vector<size_t> nb = tree.knn(pts[i], k + 1);
        nb.erase(std::remove(nb.begin(), nb.end(), i), nb.end());
        nb.resize(k);

        Vec3d mean{};
        for (size_t j : nb) mean = mean + pts[j];
        mean = mean * (1.0 / static_cast<double>(k));
        double cxx = 0, cxy = 0, cxz = 0, cyy = 0, cyz = 0, czz = 0;
        for (size_t j : nb) {
            Vec3d d = pts[j] - mean;
            cxx += d.x * d.x;
            cxy += d.x * d.y;
            cxz += d.x * d.z;
            cyy += d.y * d.y;
            cyz += d.y * d.z;
            czz += d.z * d.z;
        }
        double inv_k = 1.0 / static_cast<double>(k);
        std::vector<double> cov = {cxx * inv_k, cxy * inv_k, cxz * inv_k,
                                   cxy * inv_k, cyy * inv_k, cyz * inv_k,
                                   cxz * inv_k, cyz * inv_k, czz * inv_k};
        std::vector<double> eigvals, eigvecs;
        jacobi_eigen_symmetric(std::move(cov), 3, eigvals, eigvecs);
        double l1 = std::max(eigvals[0], 0.0);
        double l2 = std::min(std::max(eigvals[1], 0.0), l1);
        double l3 = std::min(std::max(eigvals[2], 0.0), l2);
        if (l1 <= 0.0) {
            out.linearity[i] = out.planarity[i] = out.sphericity[i] = 0.0;
            out.anisotropy[i] = out.curvature[i] = 0.0;
            return;
        }
        out.linearity[i] = (l1 - l2) / l1;
        out.planarity[i] = (l2 - l3) / l1;
        out.sphericity[i] = l3 / l1;
        out.anisotropy[i] = (l1 - l3) / l1;
        out.curvature[i] = l3 / (l1 + l2 + l3);
    });
    return out;
}

double entropy_score(const std::vector<double>& values, int bins, double lo, double hi) {
    if (values.empty()) throw Error(Errc::InvalidArgument, "entropy of empty value list");
    if (bins < 1) throw Error(Errc::InvalidArgument, "entropy needs bins >= 1");
    if (!(lo < hi)) throw Error(Errc::InvalidArgument, "entropy range is empty");

    std::vector<size_t> counts(static_cast<size_t>(bins), 0);
    double scale = bins / (hi - lo);
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "non-finite feature value");
        auto bin = static_cast<long>(std::floor((v - lo) * scale));
        bin = std::clamp(bin, 0L, static_cast<long>(bins - 1));
        ++counts[static_cast<size_t>(bin)];
    }
    double n = static_cast<double>(values.size());
    double h = 0.0;
    for (size_t c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

QualityReport quality_report(const ColoredPointCloud& cloud, size_t k, int bins) {
    QualityReport report;
    report.geometry = local_eigen_features(cloud, k);
    report.lab = lab_convert(cloud.color);
    report.neighbors = k;
    report.bins = bins;
    report.linearity = entropy_score(report.geometry.linearity, bins, 0.0, 1.0);
    report.planarity = entropy_score(report.geometry.planarity, bins, 0.0, 1.0);
    report.sphericity = entropy_score(report.geometry.sphericity, bins, 0.0, 1.0);
    report.anisotropy = entropy_score(report.geometry.anisotropy, bins, 0.0, 1.0);
    report.curvature = entropy_score(report.geometry.curvature, bins, 0.0, 1.0);
    report.l_color = entropy_score(report.lab.l, bins, 0.0, 100.0);
    report.a_color = entropy_score(report.lab.a, bins, -128.0, 128.0);
    report.b_color = entropy_score(report.lab.b, bins, -128.0, 128.0);
    return report;
}

} // namespace morphcloud
