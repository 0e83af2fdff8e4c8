#pragma once

#include <cmath>

namespace morphcloud {

struct Vec2d {
    double x = 0.0, y = 0.0;

    Vec2d operator+(const Vec2d& o) const { return {x + o.x, y + o.y}; }
    Vec2d operator-(const Vec2d& o) const { return {x - o.x, y - o.y}; }
    Vec2d operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2d& o) const = default;
};

inline double dot(const Vec2d& a, const Vec2d& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2d& a, const Vec2d& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2d& a) { return std::sqrt(dot(a, a)); }

struct Vec3d {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3d operator+(const Vec3d& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3d operator-(const Vec3d& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3d operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const Vec3d& o) const = default;
};

inline double dot(const Vec3d& a, const Vec3d& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3d cross(const Vec3d& a, const Vec3d& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm_sq(const Vec3d& a) { return dot(a, a); }
inline double norm(const Vec3d& a) { return std::sqrt(dot(a, a)); }
inline double dist(const Vec3d& a, const Vec3d& b) { return norm(a - b); }

} // namespace morphcloud
