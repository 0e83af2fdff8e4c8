#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "morphcloud/view.hpp"

namespace morphcloud {

struct Keypoint {
    double x = 0.0, y = 0.0;
    double response = 0.0; // corner strength used for ranking
    double angle = 0.0;    // orientation in radians
};

using Descriptor256 = std::array<uint8_t, 32>;

struct OrbFeatures {
    std::vector<Keypoint> keypoints;
    std::vector<Descriptor256> descriptors; // parallel to keypoints
};

// Oriented-FAST + rotated-BRIEF features, single scale (the registration problem
// this serves is near-identity: equal-scale views of the same surface). Segment-test
// corners (9 of 16 contiguous) with non-max suppression, ranked by Harris response;
// orientation from the intensity centroid of a radius-15 disc; 256-bit descriptors
// from a fixed pattern table compiled into the library, steered by the quantized
// orientation. Grayscale is 0.299 R + 0.587 G + 0.114 B. Keypoints closer than 16 px
// to the border are discarded so every sampling offset stays in bounds.
// Deterministic for a fixed input. Throws ImageTooSmall below 31x31.
OrbFeatures orb_features(const ImageRgb& image, size_t max_features = 500,
                         double fast_threshold = 20.0);

} // namespace morphcloud
