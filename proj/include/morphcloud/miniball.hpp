#pragma once

#include <span>

#include "morphcloud/cloud.hpp"

namespace morphcloud {

// Exact minimum enclosing sphere (Welzl's randomized incremental algorithm with
// support sets of up to 4 points, computed in double precision). The result is the
// unique smallest sphere containing all points; the seeded shuffle only affects the
// work done, not the output. Throws EmptyCloud on empty input.
BoundingSphere min_enclosing_sphere(std::span<const Vec3d> pts);
BoundingSphere min_enclosing_sphere(const ColoredPointCloud& cloud);

// Exact spheres through small support sets; exposed for the oracle tests.
BoundingSphere sphere_through_2(const Vec3d& a, const Vec3d& b);
// Smallest sphere with all 3 (resp. 4) points on its boundary. Degenerate inputs
// (collinear / coplanar) yield radius < 0 to signal "no such sphere".
BoundingSphere sphere_through_3(const Vec3d& a, const Vec3d& b, const Vec3d& c);
BoundingSphere sphere_through_4(const Vec3d& a, const Vec3d& b, const Vec3d& c,
                                const Vec3d& d);

} // namespace morphcloud
