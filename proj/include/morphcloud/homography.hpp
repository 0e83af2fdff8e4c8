#pragma once

#include <cstdint>
#include <vector>

#include "morphcloud/geometry.hpp"
#include "morphcloud/matcher.hpp"

namespace morphcloud {

// 3x3 projective transform mapping source pixels to destination pixels,
// normalized so m[2][2] = 1 whenever it is nonzero.
struct Homography {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    Vec2d apply(const Vec2d& p) const;
    Homography inverse() const; // throws SingularSystem when |det| <= 1e-12
    double det() const;

    static Homography identity() { return Homography{}; }
};

// Direct linear transform from >= 4 point correspondences: Hartley-normalized
// coordinates, least-squares null vector of the stacked constraint matrix via the
// eigendecomposition of its 9x9 normal matrix. Throws CountMismatch on unequal list
// sizes, TooFewMatches below 4 pairs and SingularSystem when the configuration is
// degenerate (coincident / collinear points) or yields a non-invertible matrix.
Homography homography_dlt(const std::vector<Vec2d>& src, const std::vector<Vec2d>& dst);

struct HomographyEstimate {
    Homography h;
    std::vector<uint8_t> inlier_mask; // per input match, 1 = inlier under final h
    size_t inlier_count = 0;
};

// Seeded RANSAC over 4-point samples followed by one DLT refit on the winning
// consensus set. A match is an inlier when both transfer errors |H s - d| and
// |H^-1 d - s| stay below threshold (px). Collinear samples are redrawn. Best
// consensus is the first one reaching the highest inlier count, which together with
// the fixed seed makes the estimate deterministic. Throws TooFewMatches below 4
// matches and SingularSystem when no non-degenerate sample exists.
HomographyEstimate homography_ransac(const std::vector<FeatureMatch>& matches,
                                     double threshold = 3.0, int iterations = 2000,
                                     uint64_t seed = 7);

} // namespace morphcloud
