#pragma once

#include <array>
#include <vector>

#include "morphcloud/geometry.hpp"

namespace morphcloud {

struct TriangleMesh2D {
    // counter-clockwise vertex index triples into the point array given to delaunay()
    std::vector<std::array<int, 3>> tris;
};

// Bowyer-Watson Delaunay triangulation over a ghost vertex at infinity, so the
// result always tiles the convex hull exactly (no finite helper triangle can steal
// flat hull triangles). Deterministic: points are inserted in index order and a point
// exactly on a circumcircle counts as OUTSIDE it, so co-circular configurations
// (e.g. the four corners of a square) resolve to the triangulation implied by
// insertion order, identically on every run. Exact duplicate points are skipped
// (they receive no triangles). Throws CollinearPoints when the input admits no
// non-degenerate triangle (fewer than 3 distinct points or all collinear).
TriangleMesh2D delaunay(const std::vector<Vec2d>& pts);

} // namespace morphcloud
