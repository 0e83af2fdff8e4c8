#pragma once

#include "morphcloud/cloud.hpp"

namespace morphcloud {

// Final cleanup pass: keeps the points whose distance from sphere.center is at most
// keep_fraction * sphere.radius, preserving input order. Trims stray back-projected
// points near the bounding-sphere boundary. keep_fraction must lie in (0, 1] and the
// sphere radius must be positive (InvalidArgument / ZeroRadius); an output with no
// points raises EmptyResult.
ColoredPointCloud clip_sphere_region(const ColoredPointCloud& cloud,
                                     const BoundingSphere& sphere,
                                     double keep_fraction = 0.95);

} // namespace morphcloud
