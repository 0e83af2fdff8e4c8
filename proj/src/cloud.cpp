#include "morphcloud/cloud.hpp"

#include <cmath>

#include "morphcloud/errors.hpp"
#include "morphcloud/kernels.hpp"

namespace morphcloud {

void ColoredPointCloud::validate() const {
    if (x.empty()) throw Error(Errc::EmptyCloud, "point cloud has no vertices");
    if (y.size() != x.size() || z.size() != x.size() || color.size() != x.size())
        throw Error(Errc::DimensionMismatch, "vertex/color arrays have mismatched lengths");
    for (size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]) || !std::isfinite(z[i]))
            throw Error(Errc::NumericFailure, "non-finite coordinate at vertex " +
                                                  std::to_string(i));
    }
}

namespace {

ColoredPointCloud xform_axes(const ColoredPointCloud& cloud, double scale, const Vec3d& offset) {
    ColoredPointCloud out;
    size_t n = cloud.size();
    out.x.resize(n);
    out.y.resize(n);
    out.z.resize(n);
    out.color = cloud.color;
    const auto& k = kernels::ops();
    k.xform_f64(out.x.data(), cloud.x.data(), n, scale, offset.x);
    k.xform_f64(out.y.data(), cloud.y.data(), n, scale, offset.y);
    k.xform_f64(out.z.data(), cloud.z.data(), n, scale, offset.z);
    return out;
}

} // namespace

ColoredPointCloud translate(const ColoredPointCloud& cloud, const Vec3d& t) {
    return xform_axes(cloud, 1.0, t);
}

ColoredPointCloud center_and_scale(const ColoredPointCloud& cloud,
                                   const BoundingSphere& sphere, double target_radius) {
    if (!(sphere.radius > 0.0))
        throw Error(Errc::ZeroRadius, "bounding sphere radius must be positive");
    if (!(target_radius > 0.0))
        throw Error(Errc::InvalidArgument, "target radius must be positive");
    double f = target_radius / sphere.radius;
    Vec3d offset = sphere.center * (-f);
    return xform_axes(cloud, f, offset);
}

} // namespace morphcloud
