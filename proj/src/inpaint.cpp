#include "morphcloud/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>
#include <vector>

#include "morphcloud/errors.hpp"

namespace morphcloud {
namespace {

constexpr double kFar = 1e6;

// min-heap on (T, y, x); stale entries are skipped on pop
using Heap = std::priority_queue<std::tuple<double, int, int>,
                                 std::vector<std::tuple<double, int, int>>,
                                 std::greater<std::tuple<double, int, int>>>;

// |grad T| = 1 from one horizontal and one vertical neighbor value (kFar = absent)
double eikonal_pair(double a, double b) {
    if (a >= kFar && b >= kFar) return kFar;
    if (a >= kFar) return b + 1.0;
    if (b >= kFar) return a + 1.0;
    if (std::fabs(a - b) >= 1.0) return std::min(a, b) + 1.0;
    return 0.5 * (a + b + std::sqrt(2.0 - (a - b) * (a - b)));
}

struct Grid {
    int w = 0, h = 0;

    size_t idx(int x, int y) const { return static_cast<size_t>(y) * w + x; }
    bool in(int x, int y) const { return x >= 0 && x < w && y >= 0 && y < h; }
};

constexpr int kStep[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

// Distance of known pixels from the hole boundary, marching outward only; pixels
// farther than horizon never influence an inpainting weight and are clamped there.
std::vector<double> outward_distance(const Grid& g, const MaskU8& hole, double horizon) {
    std::vector<double> t(static_cast<size_t>(g.w) * g.h, kFar);
    std::vector<uint8_t> frozen(t.size(), 0);
    Heap heap;
    for (int y = 0; y < g.h; ++y)
        for (int x = 0; x < g.w; ++x) {
            if (hole.at(x, y)) continue;
            for (const auto& d : kStep)
                if (g.in(x + d[0], y + d[1]) && hole.at(x + d[0], y + d[1])) {
                    t[g.idx(x, y)] = 0.0;
                    heap.emplace(0.0, y, x);
                    break;
                }
        }
    auto solved = [&](int x, int y) {
        if (!g.in(x, y) || hole.at(x, y) || !frozen[g.idx(x, y)]) return kFar;
        return t[g.idx(x, y)];
    };
    while (!heap.empty()) {
        auto [tt, y, x] = heap.top();
        heap.pop();
        if (frozen[g.idx(x, y)]) continue;
        frozen[g.idx(x, y)] = 1;
        if (tt > horizon) continue; // freeze but do not expand further
        for (const auto& d : kStep) {
            int qx = x + d[0], qy = y + d[1];
            if (!g.in(qx, qy) || hole.at(qx, qy) || frozen[g.idx(qx, qy)]) continue;
            double best = kFar;
            for (double a : {solved(qx - 1, qy), solved(qx + 1, qy)})
                for (double b : {solved(qx, qy - 1), solved(qx, qy + 1)})
                    best = std::min(best, eikonal_pair(a, b));
            if (best < t[g.idx(qx, qy)]) {
                t[g.idx(qx, qy)] = best;
                heap.emplace(best, qy, qx);
            }
        }
    }
    for (double& v : t)
        if (v >= kFar) v = horizon + 1.0;
    return t;
}

enum Flag : uint8_t { kKnown = 0, kBand = 1, kInside = 2 };

struct March {
    Grid g;
    std::vector<uint8_t> flag; // kKnown here means "frozen / value decided"
    std::vector<double> t;

    bool decided(int x, int y) const {
        return g.in(x, y) && flag[g.idx(x, y)] != kInside;
    }
};

// gradient of field v at (x, y) from decided pixels (central, one-sided, or zero)
void decided_gradient(const March& m, const float* v, int x, int y, double& gx,
                      double& gy) {
    auto val = [&](int px, int py) { return static_cast<double>(v[m.g.idx(px, py)]); };
    if (m.decided(x - 1, y) && m.decided(x + 1, y))
        gx = 0.5 * (val(x + 1, y) - val(x - 1, y));
    else if (m.decided(x + 1, y))
        gx = val(x + 1, y) - val(x, y);
    else if (m.decided(x - 1, y))
        gx = val(x, y) - val(x - 1, y);
    else
        gx = 0.0;
    if (m.decided(x, y - 1) && m.decided(x, y + 1))
        gy = 0.5 * (val(x, y + 1) - val(x, y - 1));
    else if (m.decided(x, y + 1))
        gy = val(x, y + 1) - val(x, y);
    else if (m.decided(x, y - 1))
        gy = val(x, y) - val(x, y - 1);
    else
        gy = 0.0;
}

void inpaint_pixel(const March& m, std::vector<float*>& chans, int x, int y, int radius) {
    // propagation direction at the target: grad T over decided pixels, normalized
    double nx, ny;
    {
        auto tv = [&](int px, int py) { return m.t[m.g.idx(px, py)]; };
        nx = ny = 0.0;
        if (m.decided(x - 1, y) && m.decided(x + 1, y))
            nx = 0.5 * (tv(x + 1, y) - tv(x - 1, y));
        else if (m.decided(x + 1, y))
            nx = tv(x + 1, y) - tv(x, y);
        else if (m.decided(x - 1, y))
            nx = tv(x, y) - tv(x - 1, y);
        if (m.decided(x, y - 1) && m.decided(x, y + 1))
            ny = 0.5 * (tv(x, y + 1) - tv(x, y - 1));
        else if (m.decided(x, y + 1))
            ny = tv(x, y + 1) - tv(x, y);
        else if (m.decided(x, y - 1))
            ny = tv(x, y) - tv(x, y - 1);
        double nn = std::sqrt(nx * nx + ny * ny);
        if (nn > 0.0) {
            nx /= nn;
            ny /= nn;
        }
    }

    double num[4] = {0, 0, 0, 0};
    double den = 0.0;
    const double tp = m.t[m.g.idx(x, y)];
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (dx * dx + dy * dy > radius * radius || (dx == 0 && dy == 0)) continue;
            int qx = x + dx, qy = y + dy;
            if (!m.decided(qx, qy)) continue;
            double rx = -dx, ry = -dy; // sample -> target
            double rr = rx * rx + ry * ry;
            double dir = std::fabs((rx * nx + ry * ny) / std::sqrt(rr));
            if (dir < 1e-6) dir = 1e-6;
            double dst = 1.0 / rr;
            double lev = 1.0 / (1.0 + std::fabs(tp - m.t[m.g.idx(qx, qy)]));
            double wgt = dir * dst * lev;
            for (size_t c = 0; c < chans.size(); ++c) {
                double gx, gy;
                decided_gradient(m, chans[c], qx, qy, gx, gy);
                num[c] += wgt * (chans[c][m.g.idx(qx, qy)] + gx * rx + gy * ry);
            }
            den += wgt;
        }
    }
    for (size_t c = 0; c < chans.size(); ++c)
        chans[c][m.g.idx(x, y)] = static_cast<float>(num[c] / den);
}

// Fills chans in place; pixels with hole == 0 are never written.
void inpaint_fields(int w, int h, std::vector<float*> chans, const MaskU8& hole,
                    int radius) {
    if (radius < 1) throw Error(Errc::InvalidArgument, "inpaint radius must be >= 1");
    if (hole.width != w || hole.height != h)
        throw Error(Errc::DimensionMismatch, "hole mask size does not match image");
    if (chans.size() > 4) throw Error(Errc::InvalidArgument, "too many channels");

    size_t n_inside = 0;
    for (uint8_t v : hole.data) n_inside += v ? 1 : 0;
    if (n_inside == 0) return;
    if (n_inside == static_cast<size_t>(w) * h)
        throw Error(Errc::MaskCoversImage, "hole mask covers the entire image");

    March m;
    m.g = {w, h};
    // known-side distances enter negated so the level-set weight measures marching
    // depth across the boundary
    m.t = outward_distance(m.g, hole, radius + 2.0);
    for (double& v : m.t) v = -v;
    m.flag.assign(m.t.size(), kKnown);

    Heap heap;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (hole.at(x, y)) {
                m.flag[m.g.idx(x, y)] = kInside;
                m.t[m.g.idx(x, y)] = kFar;
            }
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (hole.at(x, y)) continue;
            for (const auto& d : kStep)
                if (m.g.in(x + d[0], y + d[1]) && hole.at(x + d[0], y + d[1])) {
                    m.flag[m.g.idx(x, y)] = kBand;
                    m.t[m.g.idx(x, y)] = 0.0;
                    heap.emplace(0.0, y, x);
                    break;
                }
        }

    // freeze in T order; a hole pixel is inpainted the moment it joins the band
    std::vector<uint8_t> frozen(m.t.size(), 0);
    auto frozen_t = [&](int x, int y) {
        if (!m.g.in(x, y) || !frozen[m.g.idx(x, y)]) return kFar;
        return m.t[m.g.idx(x, y)];
    };
    while (!heap.empty()) {
        auto [tt, y, x] = heap.top();
        heap.pop();
        size_t i = m.g.idx(x, y);
        if (frozen[i]) continue;
        frozen[i] = 1;
        m.flag[i] = kKnown;
        for (const auto& d : kStep) {
            int qx = x + d[0], qy = y + d[1];
            if (!m.g.in(qx, qy)) continue;
            size_t qi = m.g.idx(qx, qy);
            if (frozen[qi] || m.flag[qi] == kKnown) continue;
            double best = kFar;
            for (double a : {frozen_t(qx - 1, qy), frozen_t(qx + 1, qy)})
                for (double b : {frozen_t(qx, qy - 1), frozen_t(qx, qy + 1)})
                    best = std::min(best, eikonal_pair(a, b));
            if (m.flag[qi] == kInside) {
                m.t[qi] = best;
                inpaint_pixel(m, chans, qx, qy, radius);
                m.flag[qi] = kBand;
                heap.emplace(best, qy, qx);
            } else if (best < m.t[qi]) {
                m.t[qi] = best;
                heap.emplace(best, qy, qx);
            }
        }
    }
}

} // namespace

ImageRgb inpaint_color(const ImageRgb& image, const MaskU8& hole, int radius) {
    std::vector<float> r(image.pixels()), g(image.pixels()), b(image.pixels());
    for (size_t i = 0; i < image.pixels(); ++i) {
        r[i] = image.data[i].r;
        g[i] = image.data[i].g;
        b[i] = image.data[i].b;
    }
    inpaint_fields(image.width, image.height, {r.data(), g.data(), b.data()}, hole,
                   radius);
    ImageRgb out(image.width, image.height);
    auto to_u8 = [](float v) {
        float q = std::floor(v + 0.5f);
        if (q < 0.0f) q = 0.0f;
        if (q > 255.0f) q = 255.0f;
        return static_cast<uint8_t>(q);
    };
    for (size_t i = 0; i < image.pixels(); ++i)
        out.data[i] =
            hole.data[i] ? Rgb{to_u8(r[i]), to_u8(g[i]), to_u8(b[i])} : image.data[i];
    return out;
}

MapF32 inpaint_depth(const MapF32& depth, const MaskU8& hole, int radius) {
    MapF32 out = depth;
    inpaint_fields(depth.width, depth.height, {out.data.data()}, hole, radius);
    return out;
}

} // namespace morphcloud
