#pragma once

#include <string>

#include "morphcloud/view.hpp"

namespace morphcloud {

void write_png_rgb(const ImageRgb& img, const std::string& path);
ImageRgb read_png_rgb(const std::string& path);

// Depth is stored as 16-bit grayscale, linearly quantized over [depth_near, depth_far];
// the quantization range is recorded in a small sidecar text file at path + ".range"
// so read_png_depth can restore world units.
void write_png_depth(const MapF32& depth, double depth_near, double depth_far,
                     const std::string& path);
MapF32 read_png_depth(const std::string& path, double* depth_near = nullptr,
                      double* depth_far = nullptr);

// Mask is 8-bit grayscale, 0 or 255 on disk; read maps any nonzero to 1.
void write_png_mask(const MaskU8& mask, const std::string& path);
MaskU8 read_png_mask(const std::string& path);

} // namespace morphcloud
