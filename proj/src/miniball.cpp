#include "morphcloud/miniball.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "morphcloud/errors.hpp"
#include "morphcloud/rng.hpp"

namespace morphcloud {
namespace {

// Containment with a small relative slack so support points sitting numerically on
// the boundary do not retrigger recursion.
bool inside(const BoundingSphere& b, const Vec3d& p) {
    if (b.radius < 0.0) return false;
    double rr = b.radius * b.radius;
    return norm_sq(p - b.center) <= rr + rr * 1e-13 + 1e-26;
}

BoundingSphere invalid_sphere() { return {{0, 0, 0}, -1.0}; }

} // namespace

BoundingSphere sphere_through_2(const Vec3d& a, const Vec3d& b) {
    Vec3d c = (a + b) * 0.5;
    return {c, dist(a, b) * 0.5};
}

BoundingSphere sphere_through_3(const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    Vec3d u = b - a;
    Vec3d v = c - a;
    double uu = dot(u, u);
    double vv = dot(v, v);
    double uv = dot(u, v);
    double det = uu * vv - uv * uv; // == |u x v|^2
    if (det <= 1e-14 * uu * vv) return invalid_sphere();
    double s = (0.5 / det) * (vv * (uu - uv));
    double t = (0.5 / det) * (uu * (vv - uv));
    Vec3d center = a + u * s + v * t;
    return {center, dist(center, a)};
}

BoundingSphere sphere_through_4(const Vec3d& a, const Vec3d& b, const Vec3d& c,
                                const Vec3d& d) {
    // Relative to a: center p solves p . u_i = |u_i|^2 / 2 for u_i = {b,c,d} - a.
    Vec3d u1 = b - a, u2 = c - a, u3 = d - a;
    double m[3][3] = {{u1.x, u1.y, u1.z}, {u2.x, u2.y, u2.z}, {u3.x, u3.y, u3.z}};
    double rhs[3] = {0.5 * dot(u1, u1), 0.5 * dot(u2, u2), 0.5 * dot(u3, u3)};

    // 3x3 Cramer with scale-aware degeneracy guard
    double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                 m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                 m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    double scale = std::sqrt(dot(u1, u1) * dot(u2, u2) * dot(u3, u3));
    if (std::fabs(det) <= 1e-12 * (scale + 1e-300)) return invalid_sphere();

    auto det3 = [&](int col, const double* r) {
        double t[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t[i][j] = (j == col) ? r[i] : m[i][j];
        return t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
               t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
               t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
    };
    Vec3d p = {det3(0, rhs) / det, det3(1, rhs) / det, det3(2, rhs) / det};
    Vec3d center = a + p;
    return {center, dist(center, a)};
}

namespace {

BoundingSphere trivial(const std::array<Vec3d, 4>& sup, int ns) {
    switch (ns) {
        case 0: return invalid_sphere();
        case 1: return {sup[0], 0.0};
        case 2: return sphere_through_2(sup[0], sup[1]);
        case 3: {
            BoundingSphere s = sphere_through_3(sup[0], sup[1], sup[2]);
            if (s.radius >= 0.0) return s;
            // collinear fallback: smallest 2-point sphere covering all three
            BoundingSphere best = invalid_sphere();
            const Vec3d* p[3] = {&sup[0], &sup[1], &sup[2]};
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    BoundingSphere cand = sphere_through_2(*p[i], *p[j]);
                    bool ok = true;
                    for (int k = 0; k < 3; ++k) ok = ok && inside(cand, *p[k]);
                    if (ok && (best.radius < 0.0 || cand.radius < best.radius)) best = cand;
                }
            return best;
        }
        default: {
            BoundingSphere s = sphere_through_4(sup[0], sup[1], sup[2], sup[3]);
            if (s.radius >= 0.0) return s;
            // coplanar fallback: smallest 3-point sphere covering all four
            BoundingSphere best = invalid_sphere();
            for (int drop = 0; drop < 4; ++drop) {
                std::array<Vec3d, 4> sub;
                int m = 0;
                for (int k = 0; k < 4; ++k)
                    if (k != drop) sub[m++] = sup[k];
                BoundingSphere cand = trivial(sub, 3);
                bool ok = cand.radius >= 0.0;
                for (int k = 0; ok && k < 4; ++k) ok = inside(cand, sup[k]);
                if (ok && (best.radius < 0.0 || cand.radius < best.radius)) best = cand;
            }
            return best;
        }
    }
}

// Welzl: min sphere of pts[0..end) with the ns support points pinned on the boundary.
// Recursion depth is bounded by the support size (<= 4), not the point count.
BoundingSphere welzl(const std::vector<Vec3d>& pts, size_t end, std::array<Vec3d, 4>& sup,
                     int ns) {
    BoundingSphere b = trivial(sup, ns);
    if (ns == 4) return b;
    for (size_t i = 0; i < end; ++i) {
        if (!inside(b, pts[i])) {
            sup[static_cast<size_t>(ns)] = pts[i];
            b = welzl(pts, i, sup, ns + 1);
        }
    }
    return b;
}

} // namespace

BoundingSphere min_enclosing_sphere(std::span<const Vec3d> pts) {
    if (pts.empty()) throw Error(Errc::EmptyCloud, "cannot bound an empty point set");
    std::vector<Vec3d> shuffled(pts.begin(), pts.end());
    SplitMix64 rng(0x6d696e6962616c6cULL);
    deterministic_shuffle(shuffled, rng);
    std::array<Vec3d, 4> sup;
    BoundingSphere b = welzl(shuffled, shuffled.size(), sup, 0);
    if (b.radius < 0.0) b = {shuffled[0], 0.0};
    return b;
}

BoundingSphere min_enclosing_sphere(const ColoredPointCloud& cloud) {
    cloud.validate();
    std::vector<Vec3d> pts(cloud.size());
    for (size_t i = 0; i < cloud.size(); ++i) pts[i] = cloud.point(i);
    return min_enclosing_sphere(pts);
}

} // namespace morphcloud
