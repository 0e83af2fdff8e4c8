#pragma once

#include <string>

#include "morphcloud/cloud.hpp"

namespace morphcloud {

enum class PlyFormat { BinaryLittleEndian, Ascii };

// Loads a colored point cloud from an ASCII or binary little-endian PLY file.
// vertex element must provide x/y/z (float32 or float64) and red/green/blue (uint8);
// extra scalar properties are skipped. Throws MissingFile, MalformedPly (bad header,
// truncated data, big-endian, list property on vertices), MissingColor, EmptyCloud.
ColoredPointCloud load_ply(const std::string& path);

// Writes x/y/z as float32 and red/green/blue as uint8. ASCII coordinates are printed
// with 9 significant digits, which round-trips float32 exactly.
void save_ply(const ColoredPointCloud& cloud, const std::string& path,
              PlyFormat format = PlyFormat::BinaryLittleEndian);

} // namespace morphcloud
