#pragma once

#include <vector>

#include "morphcloud/cloud.hpp"

namespace morphcloud {

struct Lab {
    double l = 0.0, a = 0.0, b = 0.0;
};

// sRGB (8-bit, D65) to CIELAB: linearize, sRGB->XYZ matrix, CIE f() with the
// standard 6/29 cutover. White maps to L=100 (a,b ~ 0), black to L=0.
Lab srgb_to_lab(Rgb c);

struct LabChannels {
    std::vector<double> l, a, b;
    size_t size() const { return l.size(); }
};

LabChannels lab_convert(const std::vector<Rgb>& colors);

} // namespace morphcloud
