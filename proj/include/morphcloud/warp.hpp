#pragma once

#include <array>

#include "morphcloud/delaunay.hpp"
#include "morphcloud/landmarks.hpp"
#include "morphcloud/view.hpp"

namespace morphcloud {

struct AffineMap {
    // row-major 2x3: [x'; y'] = m * [x; y; 1]
    double m[2][3] = {{1, 0, 0}, {0, 1, 0}};

    Vec2d apply(const Vec2d& p) const {
        return {m[0][0] * p.x + m[0][1] * p.y + m[0][2],
                m[1][0] * p.x + m[1][1] * p.y + m[1][2]};
    }
};

// Affine map sending src[i] -> dst[i] exactly. Throws DegenerateTriangle when the
// source triangle has (near-)zero area.
AffineMap affine_from_triangles(const std::array<Vec2d, 3>& src,
                                const std::array<Vec2d, 3>& dst);

// Piecewise-affine warp of color/depth/valid maps: for every mesh triangle the
// region it spans over `to_pts` is filled by sampling `maps` at the matching
// location over `from_pts` (inverse mapping + bilinear). A warped pixel is valid
// only if every bilinear support pixel with nonzero weight is in bounds and valid;
// uncovered or invalid pixels carry sentinel depth and black color. Triangles are
// rasterized in mesh order and a pixel is claimed at most once, so shared-edge
// pixels resolve deterministically. Throws MeshMismatch when point counts differ or
// an index is out of range, DegenerateTriangle never (degenerate source triangles
// are skipped: they cover no target area or admit no inverse).
ViewMaps warp_maps(const ViewMaps& maps, const LandmarkSet& from_pts,
                   const LandmarkSet& to_pts, const TriangleMesh2D& mesh, float sentinel);

// Pixelwise convex blend of two registered views: color = round-half-up of
// alpha*a + (1-alpha)*b per channel, depth likewise in float; a pixel is valid only
// where both inputs are valid (elsewhere: black, sentinel). Bitwise symmetric with
// (b, a, 1-alpha) whenever 1-alpha is exact. Throws DimensionMismatch.
ViewMaps blend_maps(const ViewMaps& a, const ViewMaps& b, double alpha, float sentinel);

} // namespace morphcloud
