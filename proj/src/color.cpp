#include "morphcloud/color.hpp"

#include <cmath>

namespace morphcloud {

namespace {

double srgb_linearize(uint8_t v8) {
    double v = v8 / 255.0;
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    constexpr double delta3 = delta * delta * delta;
    return t > delta3 ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

} // namespace

Lab srgb_to_lab(Rgb c) {
    double r = srgb_linearize(c.r), g = srgb_linearize(c.g), b = srgb_linearize(c.b);
    double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    double fx = lab_f(x / 0.95047), fy = lab_f(y), fz = lab_f(z / 1.08883);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabChannels lab_convert(const std::vector<Rgb>& colors) {
    LabChannels out;
    out.l.reserve(colors.size());
    out.a.reserve(colors.size());
    out.b.reserve(colors.size());
    for (Rgb c : colors) {
        Lab lab = srgb_to_lab(c);
        out.l.push_back(lab.l);
        out.a.push_back(lab.a);
        out.b.push_back(lab.b);
    }
    return out;
}

} // namespace morphcloud
