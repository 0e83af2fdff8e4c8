#include "morphcloud/holefill.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "morphcloud/errors.hpp"
#include "morphcloud/inpaint.hpp"
#include "morphcloud/kernels.hpp"
#include "morphcloud/matcher.hpp"
#include "morphcloud/miniball.hpp"
#include "morphcloud/orb.hpp"
#include "morphcloud/parallel.hpp"
#include "morphcloud/png_io.hpp"
#include "morphcloud/project.hpp"

namespace morphcloud {

namespace {

// Monotone-chain convex hull; collinear boundary points are dropped. Returns fewer
// than 3 vertices for degenerate inputs.
std::vector<Vec2d> convex_hull(std::vector<Vec2d> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2d& a, const Vec2d& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2d& a, const Vec2d& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Vec2d> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    size_t lower = k + 1;
    for (size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

// Rasterizes the hull interior (pixel centers at integer coordinates) by horizontal
// scanline spans between edge intersections.
MaskU8 hull_raster(const std::vector<Vec2d>& hull, int w, int h) {
    MaskU8 out(w, h, 0);
    if (hull.size() < 3) return out;
    double ylo = hull[0].y, yhi = hull[0].y;
    for (const Vec2d& p : hull) {
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
    }
    int y0 = std::max(0, static_cast<int>(std::ceil(ylo - 1e-9)));
    int y1 = std::min(h - 1, static_cast<int>(std::floor(yhi + 1e-9)));
    for (int y = y0; y <= y1; ++y) {
        double yd = y;
        double xlo = 1e300, xhi = -1e300;
        for (size_t i = 0; i < hull.size(); ++i) {
            const Vec2d& p = hull[i];
            const Vec2d& q = hull[(i + 1) % hull.size()];
            if (p.y == q.y) {
                if (p.y == yd) {
                    xlo = std::min({xlo, p.x, q.x});
                    xhi = std::max({xhi, p.x, q.x});
                }
                continue;
            }
            if (yd < std::min(p.y, q.y) - 1e-9 || yd > std::max(p.y, q.y) + 1e-9) continue;
            double t = std::clamp((yd - p.y) / (q.y - p.y), 0.0, 1.0);
            double x = p.x + t * (q.x - p.x);
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
        }
        if (xlo > xhi) continue;
        int xa = std::max(0, static_cast<int>(std::ceil(xlo - 1e-7)));
        int xb = std::min(w - 1, static_cast<int>(std::floor(xhi + 1e-7)));
        for (int x = xa; x <= xb; ++x) out.at(x, y) = 1;
    }
    return out;
}

// One view's registered color + depth planes over the canonical frame.
struct Contribution {
    int w = 0, h = 0;
    std::vector<float> r, g, b, d;
    std::vector<uint8_t> mask;

    void alloc(int width, int height) {
        w = width;
        h = height;
        size_t n = static_cast<size_t>(width) * height;
        r.assign(n, 0.0f);
        g.assign(n, 0.0f);
        b.assign(n, 0.0f);
        d.assign(n, 0.0f);
        mask.assign(n, 0);
    }
};

Contribution direct_contribution(const ImageRgb& color, const MapF32& depth,
                                 const MaskU8& known) {
    Contribution c;
    c.alloc(color.width, color.height);
    for (size_t i = 0; i < known.data.size(); ++i) {
        c.r[i] = color.data[i].r;
        c.g[i] = color.data[i].g;
        c.b[i] = color.data[i].b;
        c.d[i] = depth.data[i];
        c.mask[i] = known.data[i];
    }
    return c;
}

// Inverse-maps every canonical pixel through h and samples the view bilinearly.
// A pixel contributes only when every bilinear support with nonzero weight is a
// known view pixel. dz is subtracted so translated depths return to canonical range.
Contribution warp_contribution(const ImageRgb& color, const MapF32& depth,
                               const MaskU8& known, const Homography& h, int out_w,
                               int out_h, double dz) {
    Contribution c;
    c.alloc(out_w, out_h);
    Homography inv = h.inverse();
    size_t i = 0;
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x, ++i) {
            Vec2d q = inv.apply({static_cast<double>(x), static_cast<double>(y)});
            int x0 = static_cast<int>(std::floor(q.x));
            int y0 = static_cast<int>(std::floor(q.y));
            double fx = q.x - x0;
            double fy = q.y - y0;
            const double wgt[4] = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy),
                                   (1.0 - fx) * fy, fx * fy};
            const int sx[4] = {x0, x0 + 1, x0, x0 + 1};
            const int sy[4] = {y0, y0, y0 + 1, y0 + 1};
            double ar = 0.0, ag = 0.0, ab = 0.0, ad = 0.0;
            bool ok = true;
            for (int s = 0; s < 4 && ok; ++s) {
                if (wgt[s] <= 1e-12) continue;
                if (!known.in_bounds(sx[s], sy[s]) || !known.at(sx[s], sy[s])) {
                    ok = false;
                    break;
                }
                const Rgb& px = color.at(sx[s], sy[s]);
                ar += wgt[s] * px.r;
                ag += wgt[s] * px.g;
                ab += wgt[s] * px.b;
                ad += wgt[s] * depth.at(sx[s], sy[s]);
            }
            if (!ok) continue;
            c.r[i] = static_cast<float>(ar);
            c.g[i] = static_cast<float>(ag);
            c.b[i] = static_cast<float>(ab);
            c.d[i] = static_cast<float>(ad - dz);
            c.mask[i] = 1;
        }
    }
    return c;
}

MaskU8 known_mask(const MaskU8& valid, const MaskU8& hole) {
    MaskU8 out = valid;
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = (out.data[i] || hole.data[i]) ? 1 : 0;
    return out;
}

// Inpainting extrapolates along depth gradients; at a steep silhouette rim that can
// run far past any observed depth. Values outside the view's observed range cannot
// be right, so cap the filled pixels there.
void clamp_inpainted_depth(MapF32& depth, const MaskU8& valid, const MaskU8& hole) {
    float lo = std::numeric_limits<float>::infinity();
    float hi = -lo;
    for (size_t i = 0; i < depth.data.size(); ++i) {
        if (!valid.data[i]) continue;
        lo = std::min(lo, depth.data[i]);
        hi = std::max(hi, depth.data[i]);
    }
    if (!(lo <= hi)) return;
    for (size_t i = 0; i < depth.data.size(); ++i)
        if (hole.data[i]) depth.data[i] = std::clamp(depth.data[i], lo, hi);
}

ImageRgb contribution_image(const Contribution& c) {
    ImageRgb img(c.w, c.h, Rgb{0, 0, 0});
    for (size_t i = 0; i < c.mask.size(); ++i) {
        if (!c.mask[i]) continue;
        img.data[i] = Rgb{static_cast<uint8_t>(std::floor(c.r[i] + 0.5f)),
                          static_cast<uint8_t>(std::floor(c.g[i] + 0.5f)),
                          static_cast<uint8_t>(std::floor(c.b[i] + 0.5f))};
    }
    return img;
}

void dump_view(const std::string& dir, const std::string& tag, const ImageRgb& color,
               const MapF32& depth, const MaskU8& hole, const CanonicalView& view) {
    write_png_rgb(color, dir + "/" + tag + "_color.png");
    write_png_depth(depth, view.depth_near, view.depth_far, dir + "/" + tag + "_depth.png");
    write_png_mask(hole, dir + "/" + tag + "_hole.png");
}

} // namespace

std::vector<Vec3d> default_offsets(double radius) {
    double d = 0.15 * radius;
    return {{d, 0, 0}, {-d, 0, 0}, {d / 2, 0, 0}, {-d / 2, 0, 0},
            {0, d, 0}, {0, -d, 0}, {0, 0, d}};
}

MaskU8 hole_mask(const ViewMaps& maps) {
    std::vector<Vec2d> pts;
    pts.reserve(maps.valid_count());
    for (int y = 0; y < maps.valid.height; ++y)
        for (int x = 0; x < maps.valid.width; ++x)
            if (maps.valid.at(x, y))
                pts.push_back({static_cast<double>(x), static_cast<double>(y)});
    MaskU8 hole = hull_raster(convex_hull(std::move(pts)), maps.valid.width, maps.valid.height);
    for (size_t i = 0; i < hole.data.size(); ++i)
        if (maps.valid.data[i]) hole.data[i] = 0;
    return hole;
}

HoleFillResult fill_holes(const ColoredPointCloud& morph_cloud, const CanonicalView& view,
                          const HoleFillParams& params) {
    std::vector<Vec3d> offsets = params.offsets;
    if (offsets.empty())
        offsets = default_offsets(min_enclosing_sphere(morph_cloud).radius);
    bool debug = !params.debug_dir.empty();
    if (debug) std::filesystem::create_directories(params.debug_dir);

    ViewMaps cv = project(morph_cloud, view);
    MaskU8 cv_hole = hole_mask(cv);
    ImageRgb cv_color = inpaint_color(cv.color, cv_hole, params.inpaint_radius);
    MapF32 cv_depth = inpaint_depth(cv.depth, cv_hole, params.inpaint_radius);
    clamp_inpainted_depth(cv_depth, cv.valid, cv_hole);
    MaskU8 cv_known = known_mask(cv.valid, cv_hole);
    OrbFeatures cv_orb = orb_features(cv_color);
    if (debug) dump_view(params.debug_dir, "canonical", cv_color, cv_depth, cv_hole, view);

    size_t nv = offsets.size();
    HoleFillResult result;
    result.view_used.assign(nv, 0);
    result.homographies.assign(nv, Homography::identity());
    std::vector<std::string> warn(nv);
    std::vector<Contribution> contrib(nv);

    parallel_for(0, nv, [&](size_t j) {
        std::string tag = "view" + std::to_string(j);
        ViewMaps maps = project(translate(morph_cloud, offsets[j]), view);
        MaskU8 hole = hole_mask(maps);
        ImageRgb color = inpaint_color(maps.color, hole, params.inpaint_radius);
        MapF32 depth = inpaint_depth(maps.depth, hole, params.inpaint_radius);
        MaskU8 known = known_mask(maps.valid, hole);
        if (debug) dump_view(params.debug_dir, tag, color, depth, hole, view);

        std::vector<FeatureMatch> matches = match_bruteforce(orb_features(color), cv_orb);
        if (matches.size() < 4) {
            warn[j] = tag + ": only " + std::to_string(matches.size()) +
                      " matches, need 4; view dropped";
            return;
        }
        try {
            HomographyEstimate est =
                homography_ransac(matches, 3.0, 2000, params.ransac_seed + j);
            contrib[j] = warp_contribution(color, depth, known, est.h, view.width,
                                           view.height, offsets[j].z);
            result.homographies[j] = est.h;
            result.view_used[j] = 1;
        } catch (const Error& e) {
            warn[j] = tag + ": registration failed (" + e.what() + "); view dropped";
            return;
        }
        if (debug)
            write_png_rgb(contribution_image(contrib[j]),
                          params.debug_dir + "/" + tag + "_registered.png");
    });

    for (std::string& w : warn)
        if (!w.empty()) result.warnings.push_back(std::move(w));

    bool any_view = false;
    for (uint8_t u : result.view_used) any_view = any_view || u != 0;

    if (!any_view) {
        if (nv > 0)
            result.warnings.push_back("all translated views dropped; output is the "
                                      "inpainted canonical view only");
        result.maps = ViewMaps{cv_color, cv_depth, cv_known};
    } else {
        size_t n = static_cast<size_t>(view.width) * view.height;
        std::vector<double> ar(n, 0.0), ag(n, 0.0), ab(n, 0.0), ad(n, 0.0);
        std::vector<uint32_t> cnt(n, 0);
        const auto& k = kernels::ops();
        auto add = [&](const Contribution& c) {
            k.masked_accum_f32(ar.data(), c.r.data(), c.mask.data(), n);
            k.masked_accum_f32(ag.data(), c.g.data(), c.mask.data(), n);
            k.masked_accum_f32(ab.data(), c.b.data(), c.mask.data(), n);
            k.masked_accum_f32(ad.data(), c.d.data(), c.mask.data(), n);
            for (size_t i = 0; i < n; ++i) cnt[i] += c.mask[i] ? 1 : 0;
        };
        if (!params.exclude_canonical) add(direct_contribution(cv_color, cv_depth, cv_known));
        for (size_t j = 0; j < nv; ++j)
            if (result.view_used[j]) add(contrib[j]);

        ViewMaps out;
        out.color = ImageRgb(view.width, view.height, Rgb{0, 0, 0});
        out.depth = MapF32(view.width, view.height, static_cast<float>(view.depth_far));
        out.valid = MaskU8(view.width, view.height, 0);
        for (size_t i = 0; i < n; ++i) {
            if (cnt[i] == 0) continue;
            double inv_c = 1.0 / cnt[i];
            out.color.data[i] = Rgb{static_cast<uint8_t>(std::floor(ar[i] * inv_c + 0.5)),
                                    static_cast<uint8_t>(std::floor(ag[i] * inv_c + 0.5)),
                                    static_cast<uint8_t>(std::floor(ab[i] * inv_c + 0.5))};
            out.depth.data[i] = static_cast<float>(ad[i] * inv_c);
            out.valid.data[i] = 1;
        }
        result.maps = std::move(out);
    }

    if (debug)
        dump_view(params.debug_dir, "filled", result.maps.color, result.maps.depth,
                  result.maps.valid, view);
    result.cloud = back_project(result.maps, view);
    return result;
}

} // namespace morphcloud
