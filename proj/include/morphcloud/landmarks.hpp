#pragma once

#include <string>
#include <vector>

#include "morphcloud/geometry.hpp"
#include "morphcloud/view.hpp"

namespace morphcloud {

// 68 facial landmarks plus 8 frame anchors appended at indices 68..75:
// the four corners (0,0), (W-1,0), (W-1,H-1), (0,H-1) followed by the four edge
// midpoints ((W-1)/2,0), (W-1,(H-1)/2), ((W-1)/2,H-1), (0,(H-1)/2). The anchors give
// the triangulation full-frame coverage so warps are defined everywhere.
struct LandmarkSet {
    std::vector<Vec2d> pts;

    size_t size() const { return pts.size(); }
};

constexpr size_t kFacialLandmarks = 68;
constexpr size_t kAugmentedLandmarks = 76;

// Appends the 8 frame anchors for the given view to a 68-point set.
LandmarkSet augment_landmarks(const LandmarkSet& facial, const CanonicalView& view);

// Reads a CSV of exactly 68 "x,y" rows (floats allowed, blank lines ignored) and
// augments it. Throws MissingFile, MalformedCsv, WrongLandmarkCount, OutOfBounds
// (coordinates must lie in [0, W-1] x [0, H-1]).
LandmarkSet load_landmarks(const std::string& path, const CanonicalView& view);

// Per-point convex blend alpha*a + (1-alpha)*b. Throws CountMismatch.
LandmarkSet blend_landmarks(const LandmarkSet& a, const LandmarkSet& b, double alpha);

} // namespace morphcloud
