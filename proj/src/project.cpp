#include "morphcloud/project.hpp"

#include <cmath>

#include "morphcloud/errors.hpp"

namespace morphcloud {

ViewMaps project(const ColoredPointCloud& cloud, const CanonicalView& view) {
    cloud.validate();
    if (view.width <= 0 || view.height <= 0 || !(view.scale > 0.0))
        throw Error(Errc::InvalidArgument, "view must have positive size and scale");

    ViewMaps maps;
    maps.color = ImageRgb(view.width, view.height, Rgb{0, 0, 0});
    maps.depth = MapF32(view.width, view.height, static_cast<float>(view.depth_far));
    maps.valid = MaskU8(view.width, view.height, 0);

    for (size_t i = 0; i < cloud.size(); ++i) {
        double z = cloud.z[i];
        if (!(z >= view.depth_near && z < view.depth_far)) continue;
        long px = std::lround(view.cx + view.scale * cloud.x[i]);
        long py = std::lround(view.cy - view.scale * cloud.y[i]);
        if (px < 0 || px >= view.width || py < 0 || py >= view.height) continue;
        int ix = static_cast<int>(px);
        int iy = static_cast<int>(py);
        float zf = static_cast<float>(z);
        // strict < keeps the earliest (lowest index) vertex on exact depth ties
        if (!maps.valid.at(ix, iy) || zf < maps.depth.at(ix, iy)) {
            maps.depth.at(ix, iy) = zf;
            maps.color.at(ix, iy) = cloud.color[i];
            maps.valid.at(ix, iy) = 1;
        }
    }
    return maps;
}

ColoredPointCloud back_project(const ViewMaps& maps, const CanonicalView& view) {
    if (maps.color.width != view.width || maps.color.height != view.height ||
        maps.depth.width != view.width || maps.depth.height != view.height ||
        maps.valid.width != view.width || maps.valid.height != view.height)
        throw Error(Errc::DimensionMismatch, "map dimensions do not match the view");

    ColoredPointCloud cloud;
    cloud.reserve(maps.valid_count());
    for (int py = 0; py < view.height; ++py) {
        for (int px = 0; px < view.width; ++px) {
            if (!maps.valid.at(px, py)) continue;
            Vec3d p{(px - view.cx) / view.scale, (view.cy - py) / view.scale,
                    static_cast<double>(maps.depth.at(px, py))};
            cloud.push_back(p, maps.color.at(px, py));
        }
    }
    return cloud;
}

} // namespace morphcloud
