#pragma once

#include <cstdint>
#include <vector>

#include "morphcloud/orb.hpp"

namespace morphcloud {

// One accepted correspondence between a source and a destination keypoint.
struct FeatureMatch {
    size_t src_index = 0;
    size_t dst_index = 0;
    double src_x = 0.0, src_y = 0.0;
    double dst_x = 0.0, dst_y = 0.0;
    int distance = 0; // Hamming distance in [0, 256]
};

// Brute-force Hamming matcher with Lowe's ratio test and a symmetric cross check.
//
// For every source descriptor the nearest and second-nearest destination descriptors
// are found (ties keep the lowest index). The match survives only when
// best < ratio * second_best (so an ambiguous 0/0 pair is rejected) and the
// destination's own nearest source is the same pair. A set with a single descriptor
// has no second-best; it is given a virtual second-best of 257 so the ratio test
// degenerates to best < ratio * 257. Either set being empty yields an empty result;
// no error is raised. Output is ordered by ascending src_index. Deterministic.
std::vector<FeatureMatch> match_bruteforce(const OrbFeatures& src, const OrbFeatures& dst,
                                           double ratio = 0.75);

} // namespace morphcloud
