#pragma once

#include <cstdint>
#include <vector>

#include "morphcloud/cloud.hpp"

namespace morphcloud {

// Orthographic canonical view. A world point (x, y, z) lands on pixel
//   px = round(cx + scale * x),  py = round(cy - scale * y)
// and the depth map stores world z. The camera looks along +z, so among points
// sharing a pixel the SMALLEST z wins; ties keep the lowest vertex index. Points with
// z outside [depth_near, depth_far) are clipped, which keeps the invariant that a
// pixel is valid exactly when its depth differs from the depth_far sentinel.
struct CanonicalView {
    int width = 512;
    int height = 512;
    double scale = 220.0; // pixels per world unit
    double cx = 256.0;
    double cy = 256.0;
    double depth_near = -2.0;
    double depth_far = 2.0;

    static CanonicalView centered(int w, int h, double scale_px) {
        CanonicalView v;
        v.width = w;
        v.height = h;
        v.scale = scale_px;
        v.cx = w / 2.0;
        v.cy = h / 2.0;
        return v;
    }
};

template <typename T>
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Raster() = default;
    Raster(int w, int h, T fill = T{})
        : width(w), height(h), data(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {}

    T& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    const T& at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t pixels() const { return data.size(); }
};

using ImageRgb = Raster<Rgb>;
using MapF32 = Raster<float>;
using MaskU8 = Raster<uint8_t>; // 0 = invalid, 1 = valid

// One projected view: color, world-z depth (sentinel = view.depth_far on invalid
// pixels) and the validity mask.
struct ViewMaps {
    ImageRgb color;
    MapF32 depth;
    MaskU8 valid;

    size_t valid_count() const {
        size_t n = 0;
        for (uint8_t v : valid.data) n += v ? 1 : 0;
        return n;
    }
};

} // namespace morphcloud
