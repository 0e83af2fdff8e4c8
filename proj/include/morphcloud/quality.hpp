#pragma once

#include <cstddef>
#include <vector>

#include "morphcloud/cloud.hpp"
#include "morphcloud/color.hpp"

namespace morphcloud {

struct EigenFeatures {
    std::vector<double> linearity, planarity, sphericity, anisotropy, curvature;
    size_t size() const { return linearity.size(); }
};

// Per-point shape features from the covariance eigenvalues l1 >= l2 >= l3 >= 0 of
// each point's k nearest neighbors (the point itself excluded; distance ties break
// toward the lower index):
//   linearity (l1-l2)/l1, planarity (l2-l3)/l1, sphericity l3/l1,
//   anisotropy (l1-l3)/l1, curvature l3/(l1+l2+l3).
// Degenerate neighborhoods (l1 = 0) yield all-zero features. All ratios lie in
// [0,1], are invariant to translation, and to uniform scaling of the cloud.
// Throws InvalidArgument when k == 0 or k >= cloud size.
EigenFeatures local_eigen_features(const ColoredPointCloud& cloud, size_t k = 30);

// Shannon entropy (bits) of `values` histogrammed into `bins` equal-width bins
// spanning [lo, hi]; out-of-range values are clamped into the end bins. Constant
// input gives 0, an even spread over all bins gives log2(bins). Throws
// InvalidArgument on empty input, non-finite values, bins < 1, or lo >= hi.
double entropy_score(const std::vector<double>& values, int bins, double lo, double hi);

// Scalar-per-cloud summary: entropy of each per-point feature over its canonical
// range (geometry ratios [0,1], L [0,100], A/B [-128,128]); the per-point arrays
// are retained for box plots and CSV export.
struct QualityReport {
    double l_color = 0.0, a_color = 0.0, b_color = 0.0;
    double linearity = 0.0, planarity = 0.0, sphericity = 0.0;
    double anisotropy = 0.0, curvature = 0.0;
    EigenFeatures geometry;
    LabChannels lab;
    size_t neighbors = 0;
    int bins = 0;
};

QualityReport quality_report(const ColoredPointCloud& cloud, size_t k = 30, int bins = 256);

} // namespace morphcloud
