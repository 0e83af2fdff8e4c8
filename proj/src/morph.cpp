#include "morphcloud/morph.hpp"

#include "morphcloud/errors.hpp"
#include "morphcloud/warp.hpp"

namespace morphcloud {

ColoredPointCloud morph_pair(const ColoredPointCloud& pc1, const ColoredPointCloud& pc2,
                             const LandmarkSet& lm1, const LandmarkSet& lm2,
                             const CanonicalView& view, double alpha,
                             MorphIntermediates* debug) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw Error(Errc::InvalidArgument, "alpha must lie in [0,1]");
    if (lm1.size() != kAugmentedLandmarks || lm2.size() != kAugmentedLandmarks)
        throw Error(Errc::WrongLandmarkCount, "landmark sets must hold 76 augmented points");

    float sentinel = static_cast<float>(view.depth_far);

    ViewMaps maps1 = project(pc1, view);
    ViewMaps maps2 = project(pc2, view);

    LandmarkSet blended_lm = blend_landmarks(lm1, lm2, alpha);
    TriangleMesh2D mesh = delaunay(blended_lm.pts);

    ViewMaps warped1 = warp_maps(maps1, lm1, blended_lm, mesh, sentinel);
    ViewMaps warped2 = warp_maps(maps2, lm2, blended_lm, mesh, sentinel);
    ViewMaps blended = blend_maps(warped1, warped2, alpha, sentinel);

    ColoredPointCloud morph = back_project(blended, view);
    if (debug) {
        debug->maps1 = std::move(maps1);
        debug->maps2 = std::move(maps2);
        debug->blended_lm = std::move(blended_lm);
        debug->mesh = std::move(mesh);
        debug->warped1 = std::move(warped1);
        debug->warped2 = std::move(warped2);
        debug->blended = std::move(blended);
    }
    if (morph.empty())
        throw Error(Errc::EmptyMorph, "no jointly valid pixel between the two subjects");
    return morph;
}

} // namespace morphcloud
