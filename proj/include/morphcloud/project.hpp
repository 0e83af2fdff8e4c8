#pragma once

#include "morphcloud/view.hpp"

namespace morphcloud {

// Rasterizes the cloud into the canonical view (z-buffer keeps the smallest world z,
// ties keep the lowest vertex index). An all-clipped cloud yields maps with zero
// valid pixels; callers decide whether that is an error.
ViewMaps project(const ColoredPointCloud& cloud, const CanonicalView& view);

// Inverse of project for valid pixels, scanned row-major (y outer, x inner):
// world x = (px - cx) / scale, y = (cy - py) / scale, z = depth. All-invalid maps
// yield an empty cloud. Throws DimensionMismatch if map and view sizes disagree.
ColoredPointCloud back_project(const ViewMaps& maps, const CanonicalView& view);

} // namespace morphcloud
