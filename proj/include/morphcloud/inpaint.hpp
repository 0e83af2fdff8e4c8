#pragma once

#include "morphcloud/view.hpp"

namespace morphcloud {

// Fast-marching inpainting: hole pixels are filled in order of distance to the hole
// boundary, each as a weighted average of nearby known values extrapolated by their
// image gradient. Weights combine propagation direction, geometric distance and
// level-set closeness. Pixels with hole==0 are returned bit-exact; a copy is returned
// when the hole mask is empty. radius is the sampling neighborhood in pixels.
// Deterministic: the marching heap breaks distance ties by (y, x).
// Throws DimensionMismatch (mask size), MaskCoversImage (no known pixel),
// InvalidArgument (radius < 1).
ImageRgb inpaint_color(const ImageRgb& image, const MaskU8& hole, int radius = 5);
MapF32 inpaint_depth(const MapF32& depth, const MaskU8& hole, int radius = 5);

} // namespace morphcloud
