#pragma once

#include <cstdint>
#include <vector>

#include "morphcloud/geometry.hpp"

namespace morphcloud {

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

// Colored point cloud, structure-of-arrays so per-axis kernels can stream it.
// Coordinates live as double in memory; PLY stores float32 (see ply_io).
struct ColoredPointCloud {
    std::vector<double> x, y, z;
    std::vector<Rgb> color;

    size_t size() const { return x.size(); }
    bool empty() const { return x.empty(); }

    void reserve(size_t n) {
        x.reserve(n);
        y.reserve(n);
        z.reserve(n);
        color.reserve(n);
    }

    void push_back(const Vec3d& p, Rgb c) {
        x.push_back(p.x);
        y.push_back(p.y);
        z.push_back(p.z);
        color.push_back(c);
    }

    Vec3d point(size_t i) const { return {x[i], y[i], z[i]}; }

    // Throws EmptyCloud / MalformedPly-style errors on structural violations:
    // nonzero size, equal array lengths, finite coordinates.
    void validate() const;
};

struct BoundingSphere {
    Vec3d center;
    double radius = 0.0;

    bool contains(const Vec3d& p, double tol = 1e-9) const {
        double r = radius * (1.0 + tol) + tol;
        return norm_sq(p - center) <= r * r;
    }
};

// Rigid translation by t (exact per-axis kernel pass: x*1 + t).
ColoredPointCloud translate(const ColoredPointCloud& cloud, const Vec3d& t);

// Maps the given bounding sphere to the origin with radius target_radius:
// p' = (p - sphere.center) * (target_radius / sphere.radius).
// Throws ZeroRadius when sphere.radius <= 0.
ColoredPointCloud center_and_scale(const ColoredPointCloud& cloud,
                                   const BoundingSphere& sphere, double target_radius);

} // namespace morphcloud
