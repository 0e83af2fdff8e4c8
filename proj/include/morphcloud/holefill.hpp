#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "morphcloud/cloud.hpp"
#include "morphcloud/geometry.hpp"
#include "morphcloud/homography.hpp"
#include "morphcloud/view.hpp"

namespace morphcloud {

// The 7 default view translations: +-d and +-d/2 along x, +-d along y and +d along z
// with d = 0.15 * radius. Small lateral shifts re-sample the raster around occluded
// high-curvature regions; the z shift only re-ranges depth but still contributes an
// extra vote to the average.
std::vector<Vec3d> default_offsets(double radius);

struct HoleFillParams {
    // Empty -> default_offsets(min enclosing sphere radius of the input cloud).
    std::vector<Vec3d> offsets;
    int inpaint_radius = 5;
    uint64_t ransac_seed = 7; // view j uses ransac_seed + j
    bool exclude_canonical = false;
    std::string debug_dir; // when nonempty, per-view PNGs are written here
};

struct HoleFillResult {
    ColoredPointCloud cloud;
    ViewMaps maps;
    // Per offset: whether the view entered the average, its registration homography
    // (identity when dropped) and a human-readable warning per dropped view.
    std::vector<uint8_t> view_used;
    std::vector<Homography> homographies;
    std::vector<std::string> warnings;
};

// Fills occlusion holes of a morphed cloud seen from the canonical view:
// project the cloud plus translated copies, inpaint each view's holes (invalid
// pixels inside the convex hull of the projected points), register every translated
// view back to the canonical color map with ORB + brute-force matching + RANSAC,
// warp color AND depth with the same homography (z offsets are subtracted from the
// warped depth), average all contributing views per pixel in double precision, and
// back-project the averaged maps. The canonical view itself joins the average
// unless exclude_canonical is set. Views with fewer than 4 usable matches (or a
// degenerate registration) are dropped with a warning; if every translated view
// drops, the result is the inpainted canonical view alone. Bit-reproducible for a
// fixed seed.
HoleFillResult fill_holes(const ColoredPointCloud& morph_cloud, const CanonicalView& view,
                          const HoleFillParams& params = {});

// Mask of invalid pixels lying inside the convex hull of the valid pixels (the
// region fill_holes inpaints). Exposed for tests and debug dumps.
MaskU8 hole_mask(const ViewMaps& maps);

} // namespace morphcloud
