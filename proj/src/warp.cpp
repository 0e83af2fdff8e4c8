#include "morphcloud/warp.hpp"

#include <algorithm>
#include <cmath>

#include "morphcloud/errors.hpp"
#include "morphcloud/kernels.hpp"

namespace morphcloud {

AffineMap affine_from_triangles(const std::array<Vec2d, 3>& src,
                                const std::array<Vec2d, 3>& dst) {
    Vec2d u = src[1] - src[0];
    Vec2d v = src[2] - src[0];
    double det = cross(u, v);
    double scale = std::max({dot(u, u), dot(v, v), 1e-300});
    if (std::fabs(det) < 1e-12 * scale)
        throw Error(Errc::DegenerateTriangle, "source triangle has near-zero area");

    // columns of the linear part map u -> dst1-dst0 and v -> dst2-dst0
    Vec2d du = dst[1] - dst[0];
    Vec2d dv = dst[2] - dst[0];
    AffineMap a;
    a.m[0][0] = (du.x * v.y - dv.x * u.y) / det;
    a.m[0][1] = (dv.x * u.x - du.x * v.x) / det;
    a.m[1][0] = (du.y * v.y - dv.y * u.y) / det;
    a.m[1][1] = (dv.y * u.x - du.y * v.x) / det;
    a.m[0][2] = dst[0].x - a.m[0][0] * src[0].x - a.m[0][1] * src[0].y;
    a.m[1][2] = dst[0].y - a.m[1][0] * src[0].x - a.m[1][1] * src[0].y;
    return a;
}

namespace {

struct BilinearSample {
    bool valid = false;
    double r = 0, g = 0, b = 0, depth = 0;
};

BilinearSample sample_bilinear(const ViewMaps& maps, double sx, double sy) {
    BilinearSample out;
    double fx = std::floor(sx);
    double fy = std::floor(sy);
    int x0 = static_cast<int>(fx);
    int y0 = static_cast<int>(fy);
    double ax = sx - fx;
    double ay = sy - fy;
    const double w[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
    const int dx[4] = {0, 1, 0, 1};
    const int dy[4] = {0, 0, 1, 1};

    for (int k = 0; k < 4; ++k) {
        if (w[k] <= 1e-12) continue; // zero-weight corners may fall outside
        int px = x0 + dx[k];
        int py = y0 + dy[k];
        if (!maps.valid.in_bounds(px, py) || !maps.valid.at(px, py)) return out;
        const Rgb& c = maps.color.at(px, py);
        out.r += w[k] * c.r;
        out.g += w[k] * c.g;
        out.b += w[k] * c.b;
        out.depth += w[k] * static_cast<double>(maps.depth.at(px, py));
    }
    out.valid = true;
    return out;
}

uint8_t round_u8(double v) {
    long r = static_cast<long>(std::floor(v + 0.5));
    if (r < 0) r = 0;
    if (r > 255) r = 255;
    return static_cast<uint8_t>(r);
}

} // namespace

ViewMaps warp_maps(const ViewMaps& maps, const LandmarkSet& from_pts,
                   const LandmarkSet& to_pts, const TriangleMesh2D& mesh, float sentinel) {
    if (from_pts.size() != to_pts.size())
        throw Error(Errc::MeshMismatch, "landmark sets have different sizes");
    int w = maps.color.width;
    int h = maps.color.height;

    ViewMaps out;
    out.color = ImageRgb(w, h, Rgb{0, 0, 0});
    out.depth = MapF32(w, h, sentinel);
    out.valid = MaskU8(w, h, 0);
    MaskU8 claimed(w, h, 0);

    for (const auto& tri : mesh.tris) {
        for (int idx : tri)
            if (idx < 0 || static_cast<size_t>(idx) >= to_pts.size())
                throw Error(Errc::MeshMismatch, "triangle index out of range");

        const Vec2d d0 = to_pts.pts[static_cast<size_t>(tri[0])];
        const Vec2d d1 = to_pts.pts[static_cast<size_t>(tri[1])];
        const Vec2d d2 = to_pts.pts[static_cast<size_t>(tri[2])];
        double area2 = cross(d1 - d0, d2 - d0);
        if (std::fabs(area2) < 1e-12) continue; // covers no pixels

        AffineMap inv;
        try {
            inv = affine_from_triangles(
                {d0, d1, d2},
                {from_pts.pts[static_cast<size_t>(tri[0])],
                 from_pts.pts[static_cast<size_t>(tri[1])],
                 from_pts.pts[static_cast<size_t>(tri[2])]});
        } catch (const Error&) {
            continue; // degenerate target triangle: no inverse, covers ~no pixels
        }

        int min_x = std::max(0, static_cast<int>(std::ceil(std::min({d0.x, d1.x, d2.x}) - 1e-9)));
        int max_x = std::min(w - 1, static_cast<int>(std::floor(std::max({d0.x, d1.x, d2.x}) + 1e-9)));
        int min_y = std::max(0, static_cast<int>(std::ceil(std::min({d0.y, d1.y, d2.y}) - 1e-9)));
        int max_y = std::min(h - 1, static_cast<int>(std::floor(std::max({d0.y, d1.y, d2.y}) + 1e-9)));

        for (int py = min_y; py <= max_y; ++py) {
            for (int px = min_x; px <= max_x; ++px) {
                if (claimed.at(px, py)) continue;
                Vec2d p{static_cast<double>(px), static_cast<double>(py)};
                // barycentric inclusion, edges included
                double b0 = cross(d1 - p, d2 - p) / area2;
                double b1 = cross(d2 - p, d0 - p) / area2;
                double b2 = cross(d0 - p, d1 - p) / area2;
                if (b0 < -1e-9 || b1 < -1e-9 || b2 < -1e-9) continue;
                claimed.at(px, py) = 1;

                Vec2d s = inv.apply(p);
                BilinearSample smp = sample_bilinear(maps, s.x, s.y);
                if (!smp.valid) continue;
                out.color.at(px, py) = Rgb{round_u8(smp.r), round_u8(smp.g), round_u8(smp.b)};
                out.depth.at(px, py) = static_cast<float>(smp.depth);
                out.valid.at(px, py) = 1;
            }
        }
    }
    return out;
}

ViewMaps blend_maps(const ViewMaps& a, const ViewMaps& b, double alpha, float sentinel) {
    if (a.color.width != b.color.width || a.color.height != b.color.height)
        throw Error(Errc::DimensionMismatch, "blend inputs have different sizes");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw Error(Errc::InvalidArgument, "alpha must lie in [0,1]");

    int w = a.color.width;
    int h = a.color.height;
    size_t n = a.color.pixels();
    ViewMaps out;
    out.color = ImageRgb(w, h);
    out.depth = MapF32(w, h);
    out.valid = MaskU8(w, h, 0);

    const auto& k = kernels::ops();
    float af = static_cast<float>(alpha);
    // Rgb is 3 packed bytes, so the color planes blend as one contiguous u8 run.
    k.blend_round_u8(reinterpret_cast<uint8_t*>(out.color.data.data()),
                     reinterpret_cast<const uint8_t*>(a.color.data.data()),
                     reinterpret_cast<const uint8_t*>(b.color.data.data()), n * 3, af);
    k.blend_f32(out.depth.data.data(), a.depth.data.data(), b.depth.data.data(), n, af);

    for (size_t i = 0; i < n; ++i) {
        if (a.valid.data[i] && b.valid.data[i]) {
            out.valid.data[i] = 1;
        } else {
            out.color.data[i] = Rgb{0, 0, 0};
            out.depth.data[i] = sentinel;
        }
    }
    return out;
}

} // namespace morphcloud
