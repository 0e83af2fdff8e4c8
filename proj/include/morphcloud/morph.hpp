#pragma once

#include "morphcloud/delaunay.hpp"
#include "morphcloud/landmarks.hpp"
#include "morphcloud/project.hpp"

namespace morphcloud {

// Intermediate products of a 2D-domain morph; handy for debug dumps and tests.
struct MorphIntermediates {
    ViewMaps maps1, maps2;     // canonical projections of the two subjects
    LandmarkSet blended_lm;    // alpha-blend of the augmented landmark sets
    TriangleMesh2D mesh;       // Delaunay triangulation of blended_lm
    ViewMaps warped1, warped2; // each subject warped onto the blended geometry
    ViewMaps blended;          // pixelwise blend of the warped views
};

// Morphs two normalized clouds in the canonical 2D domain: project both, blend the
// 76-point landmark sets, triangulate the blended set, warp each subject's color and
// depth onto the blended geometry per triangle, blend pixelwise with weight alpha on
// subject 1, and back-project the jointly valid pixels. The morph vertex count
// therefore equals the jointly valid pixel count. Throws WrongLandmarkCount (sets
// must be augmented, 76 points), InvalidArgument (alpha outside [0,1]), EmptyMorph
// (no jointly valid pixel).
ColoredPointCloud morph_pair(const ColoredPointCloud& pc1, const ColoredPointCloud& pc2,
                             const LandmarkSet& lm1, const LandmarkSet& lm2,
                             const CanonicalView& view, double alpha,
                             MorphIntermediates* debug = nullptr);

} // namespace morphcloud
