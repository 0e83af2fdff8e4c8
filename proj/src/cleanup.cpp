#include "morphcloud/cleanup.hpp"

#include "morphcloud/errors.hpp"

namespace morphcloud {

ColoredPointCloud clip_sphere_region(const ColoredPointCloud& cloud,
                                     const BoundingSphere& sphere, double keep_fraction) {
    cloud.validate();
    if (!(sphere.radius > 0.0))
        throw Error(Errc::ZeroRadius, "clip sphere must have positive radius");
    if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
        throw Error(Errc::InvalidArgument, "keep_fraction must be in (0, 1]");

    double r = keep_fraction * sphere.radius;
    double r_sq = r * r;
    ColoredPointCloud out;
    out.reserve(cloud.size());
    for (size_t i = 0; i < cloud.size(); ++i) {
        if (norm_sq(cloud.point(i) - sphere.center) > r_sq) continue;
        out.push_back(cloud.point(i), cloud.color[i]);
    }
    if (out.empty())
        throw Error(Errc::EmptyResult, "no points remain inside the clip region");
    return out;
}

} // namespace morphcloud
