#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "morphcloud/errors.hpp"
#include "morphcloud/kdtree.hpp"
#include "morphcloud/morph.hpp"
#include "morphcloud/quality.hpp"
#include "morphcloud/rng.hpp"
#include "synth.hpp"

using namespace morphcloud;

namespace {

template <typename Fn>
Errc thrown_code(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::NumericFailure; // sentinel: "did not throw"
}

std::vector<Vec3d> random_points(uint64_t seed, size_t n, double extent = 1.5) {
    SplitMix64 rng(seed);
    std::vector<Vec3d> pts(n);
    for (auto& p : pts)
        p = {rng.next_range(-extent, extent), rng.next_range(-extent, extent),
             rng.next_range(-extent, extent)};
    return pts;
}

std::vector<size_t> knn_oracle(const std::vector<Vec3d>& pts, const Vec3d& q, size_t k) {
    std::vector<std::pair<double, size_t>> ranked(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) ranked[i] = {norm_sq(pts[i] - q), i};
    std::sort(ranked.begin(), ranked.end());
    std::vector<size_t> out(k);
    for (size_t i = 0; i < k; ++i) out[i] = ranked[i].second;
    return out;
}

ColoredPointCloud cloud_from_points(const std::vector<Vec3d>& pts) {
    ColoredPointCloud cloud;
    cloud.reserve(pts.size());
    for (const auto& p : pts) cloud.push_back(p, {100, 110, 120});
    return cloud;
}

ColoredPointCloud gaussian_blob(uint64_t seed, size_t n) {
    SplitMix64 rng(seed);
    ColoredPointCloud cloud;
    cloud.reserve(n);
    for (size_t i = 0; i < n; ++i)
        cloud.push_back({rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()},
                        {90, 140, 200});
    return cloud;
}

double rel_diff(double a, double b) {
    double denom = std::max(std::abs(a), std::abs(b));
    return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

} // namespace

TEST_SUITE_BEGIN("quality");

TEST_CASE("kdtree knn matches a linear-scan oracle") {
    std::vector<Vec3d> pts = random_points(5101, 300);
    KdTree tree(pts);
    REQUIRE(tree.size() == 300);
    SplitMix64 rng(5102);
    for (size_t k : {size_t{1}, size_t{7}, size_t{30}, size_t{300}}) {
        for (int q = 0; q < 25; ++q) {
            Vec3d query = q % 2 == 0 ? pts[rng.next_below(pts.size())]
                                     : Vec3d{rng.next_range(-2, 2), rng.next_range(-2, 2),
                                             rng.next_range(-2, 2)};
            CHECK(tree.knn(query, k) == knn_oracle(pts, query, k));
        }
    }
}

TEST_CASE("kdtree breaks distance ties toward the lower index") {
    std::vector<Vec3d> pts = random_points(5111, 50);
    for (size_t i = 10; i < 20; ++i) pts[i] = {0.25, -0.5, 0.75}; // ten exact duplicates
    KdTree tree(pts);
    std::vector<size_t> got = tree.knn({0.25, -0.5, 0.75}, 5);
    CHECK(got == std::vector<size_t>{10, 11, 12, 13, 14});
    CHECK(tree.knn({0.25, -0.5, 0.75}, 12) == knn_oracle(pts, {0.25, -0.5, 0.75}, 12));
}

TEST_CASE("kdtree rejects k of zero or beyond the point count") {
    KdTree tree(random_points(5121, 40));
    CHECK(thrown_code([&] { tree.knn({0, 0, 0}, 0); }) == Errc::InvalidArgument);
    CHECK(thrown_code([&] { tree.knn({0, 0, 0}, 41); }) == Errc::InvalidArgument);
    CHECK_NOTHROW(tree.knn({0, 0, 0}, 40));
}

TEST_CASE("points on a line give linearity 1") {
    ColoredPointCloud cloud;
    Vec3d origin{1.0, -0.5, 2.0}, dir{2.0, 0.3, -1.1};
    for (int i = 0; i < 200; ++i) cloud.push_back(origin + dir * (0.05 * i), {10, 20, 30});
    EigenFeatures f = local_eigen_features(cloud, 30);
    REQUIRE(f.size() == cloud.size());
    for (size_t i = 0; i < f.size(); ++i) {
        CHECK(f.linearity[i] > 1.0 - 1e-6);
        CHECK(f.planarity[i] < 1e-6);
        CHECK(f.sphericity[i] < 1e-6);
        CHECK(f.anisotropy[i] > 1.0 - 1e-6);
        CHECK(f.curvature[i] < 1e-6);
    }
}

TEST_CASE("plane patch with tiny jitter is planar away from its border") {
    // 40x40 grid; k=28 completes full symmetric neighbor shells (4+4+4+8+4+4),
    // so interior neighborhoods have exactly equal in-plane eigenvalues
    SplitMix64 rng(5131);
    ColoredPointCloud cloud;
    std::vector<bool> interior;
    for (int gy = 0; gy < 40; ++gy)
        for (int gx = 0; gx < 40; ++gx) {
            double x = 0.1 * gx, y = 0.1 * gy;
            cloud.push_back({x, y, rng.next_range(-1e-4, 1e-4)}, {200, 180, 160});
            interior.push_back(gx >= 4 && gx <= 35 && gy >= 4 && gy <= 35);
        }
    EigenFeatures f = local_eigen_features(cloud, 28);
    double interior_sum = 0.0;
    size_t interior_count = 0;
    for (size_t i = 0; i < f.size(); ++i) {
        CHECK(f.sphericity[i] < 0.05);
        if (!interior[i]) continue;
        CHECK(f.planarity[i] > 0.9);
        CHECK(f.linearity[i] < 0.05);
        interior_sum += f.planarity[i];
        ++interior_count;
    }
    REQUIRE(interior_count > 900);
    CHECK(interior_sum / static_cast<double>(interior_count) > 0.99);
}

TEST_CASE("isotropic gaussian blob is spherical on average") {
    ColoredPointCloud cloud = gaussian_blob(5141, 3000);
    EigenFeatures f = local_eigen_features(cloud, 100);
    double sph = 0.0, aniso = 0.0;
    for (size_t i = 0; i < f.size(); ++i) {
        sph += f.sphericity[i];
        aniso += f.anisotropy[i];
    }
    sph /= static_cast<double>(f.size());
    aniso /= static_cast<double>(f.size());
    CHECK(sph > 0.5);
    CHECK(aniso < 0.5);
}

TEST_CASE("eigen features are invariant to translation and uniform scale") {
    ColoredPointCloud cloud = gaussian_blob(5151, 400);
    EigenFeatures base = local_eigen_features(cloud, 20);

    ColoredPointCloud shifted = translate(cloud, {12.25, -4.5, 100.0});
    ColoredPointCloud scaled = cloud;
    for (size_t i = 0; i < scaled.size(); ++i) {
        scaled.x[i] *= 1.7;
        scaled.y[i] *= 1.7;
        scaled.z[i] *= 1.7;
    }
    for (const ColoredPointCloud* variant : {&shifted, &scaled}) {
        EigenFeatures f = local_eigen_features(*variant, 20);
        for (size_t i = 0; i < base.size(); ++i) {
            CHECK(std::abs(f.linearity[i] - base.linearity[i]) < 1e-9);
            CHECK(std::abs(f.planarity[i] - base.planarity[i]) < 1e-9);
            CHECK(std::abs(f.sphericity[i] - base.sphericity[i]) < 1e-9);
            CHECK(std::abs(f.anisotropy[i] - base.anisotropy[i]) < 1e-9);
            CHECK(std::abs(f.curvature[i] - base.curvature[i]) < 1e-9);
        }
    }
}

TEST_CASE("ratio features stay in range and satisfy their identities") {
    ColoredPointCloud cloud = gaussian_blob(5161, 500);
    EigenFeatures f = local_eigen_features(cloud, 12);
    for (size_t i = 0; i < f.size(); ++i) {
        for (double v : {f.linearity[i], f.planarity[i], f.sphericity[i], f.anisotropy[i],
                         f.curvature[i]}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(std::abs(f.linearity[i] + f.planarity[i] - f.anisotropy[i]) < 1e-12);
        CHECK(f.anisotropy[i] >= f.linearity[i]);
        CHECK(f.anisotropy[i] >= f.planarity[i] - 1e-15);
        CHECK(f.curvature[i] <= f.sphericity[i] + 1e-15); // l3/sum <= l3/l1
    }
}

TEST_CASE("degenerate all-duplicate neighborhoods yield all-zero features") {
    ColoredPointCloud cloud;
    for (int i = 0; i < 35; ++i) cloud.push_back({0.5, 0.5, 0.5}, {1, 2, 3});
    EigenFeatures f = local_eigen_features(cloud, 30);
    for (size_t i = 0; i < f.size(); ++i) {
        CHECK(f.linearity[i] == 0.0);
        CHECK(f.planarity[i] == 0.0);
        CHECK(f.sphericity[i] == 0.0);
        CHECK(f.anisotropy[i] == 0.0);
        CHECK(f.curvature[i] == 0.0);
    }
}

TEST_CASE("eigen features reject bad neighbor counts and empty clouds") {
    ColoredPointCloud cloud = gaussian_blob(5171, 40);
    CHECK(thrown_code([&] { local_eigen_features(cloud, 0); }) == Errc::InvalidArgument);
    CHECK(thrown_code([&] { local_eigen_features(cloud, 40); }) == Errc::InvalidArgument);
    CHECK(thrown_code([&] { local_eigen_features(cloud, 99); }) == Errc::InvalidArgument);
    CHECK_NOTHROW(local_eigen_features(cloud, 39));
    ColoredPointCloud empty;
    CHECK(thrown_code([&] { local_eigen_features(empty, 5); }) == Errc::EmptyCloud);
}

TEST_CASE("lab conversion hits the standard reference values") {
    Lab white = srgb_to_lab({255, 255, 255});
    CHECK(std::abs(white.l - 100.0) < 1e-3);
    CHECK(std::abs(white.a) < 0.5);
    CHECK(std::abs(white.b) < 0.5);

    Lab black = srgb_to_lab({0, 0, 0});
    CHECK(std::abs(black.l) < 1e-12);
    CHECK(black.a == 0.0);
    CHECK(black.b == 0.0);

    Lab red = srgb_to_lab({255, 0, 0});
    CHECK(std::abs(red.l - 53.2) < 0.5);
    CHECK(std::abs(red.a - 80.1) < 0.5);
    CHECK(std::abs(red.b - 67.2) < 0.5);

    Lab gray = srgb_to_lab({128, 128, 128});
    CHECK(std::abs(gray.a) < 0.01);
    CHECK(std::abs(gray.b) < 0.01);
    CHECK(gray.l > 50.0);
    CHECK(gray.l < 55.0);

    std::vector<Rgb> colors = {{255, 255, 255}, {0, 0, 0}, {255, 0, 0}, {12, 200, 99}};
    LabChannels ch = lab_convert(colors);
    REQUIRE(ch.size() == colors.size());
    for (size_t i = 0; i < colors.size(); ++i) {
        Lab one = srgb_to_lab(colors[i]);
        CHECK(ch.l[i] == one.l);
        CHECK(ch.a[i] == one.a);
        CHECK(ch.b[i] == one.b);
    }
}

TEST_CASE("entropy analytic values") {
    CHECK(entropy_score(std::vector<double>(100, 0.37), 256, 0.0, 1.0) == 0.0);

    std::vector<double> two_bins;
    for (int i = 0; i < 500; ++i) {
        two_bins.push_back(0.2);
        two_bins.push_back(0.8);
    }
    CHECK(entropy_score(two_bins, 256, 0.0, 1.0) == 1.0);

    std::vector<double> centers;
    for (int i = 0; i < 256; ++i) centers.push_back((i + 0.5) / 256.0);
    CHECK(entropy_score(centers, 256, 0.0, 1.0) == 8.0);

    SplitMix64 rng(5181);
    std::vector<double> uniform(100000);
    for (auto& v : uniform) v = rng.next_double();
    CHECK(std::abs(entropy_score(uniform, 256, 0.0, 1.0) - 8.0) < 0.1);

    CHECK(entropy_score(uniform, 1, 0.0, 1.0) == 0.0);
    // out-of-range values are clamped into the end bins
    CHECK(entropy_score({-5.0, 5.0}, 256, 0.0, 1.0) == 1.0);
}

TEST_CASE("entropy rejects bad input") {
    CHECK(thrown_code([] { entropy_score({}, 256, 0.0, 1.0); }) == Errc::InvalidArgument);
    CHECK(thrown_code([] { entropy_score({0.5}, 0, 0.0, 1.0); }) == Errc::InvalidArgument);
    CHECK(thrown_code([] { entropy_score({0.5}, 256, 1.0, 1.0); }) == Errc::InvalidArgument);
    double nan = std::nan("");
    CHECK(thrown_code([&] { entropy_score({0.5, nan}, 256, 0.0, 1.0); }) ==
          Errc::InvalidArgument);
}

// Scan-like sampling for distribution-level quality claims: lattice xy (real
// scanners sample on sensor grids) plus z micro-roughness, so per-point features
// spread over many histogram bins instead of collapsing into one.
SynthFaceParams scan_like_params() {
    SynthFaceParams p;
    p.jitter = 0.0;
    p.z_noise = 0.01;
    return p;
}

TEST_CASE("quality report is deterministic and plausible on a synthetic face") {
    CanonicalView view = CanonicalView::centered(160, 160, 90.0);
    SynthFace face = make_synth_face(6301, view, scan_like_params());
    QualityReport r1 = quality_report(face.cloud);
    QualityReport r2 = quality_report(face.cloud);

    REQUIRE(r1.geometry.size() == face.cloud.size());
    REQUIRE(r1.lab.size() == face.cloud.size());
    CHECK(r1.neighbors == 30);
    CHECK(r1.bins == 256);

    for (double v : {r1.l_color, r1.a_color, r1.b_color, r1.linearity, r1.planarity,
                     r1.sphericity, r1.anisotropy, r1.curvature}) {
        CHECK(v > 0.0);   // textured, non-degenerate fixture
        CHECK(v <= 8.0);  // 256 bins cap the entropy at 8 bits
    }

    CHECK(r1.l_color == r2.l_color);
    CHECK(r1.a_color == r2.a_color);
    CHECK(r1.b_color == r2.b_color);
    CHECK(r1.linearity == r2.linearity);
    CHECK(r1.planarity == r2.planarity);
    CHECK(r1.sphericity == r2.sphericity);
    CHECK(r1.anisotropy == r2.anisotropy);
    CHECK(r1.curvature == r2.curvature);
    CHECK(r1.geometry.sphericity == r2.geometry.sphericity);
    CHECK(r1.geometry.curvature == r2.geometry.curvature);
    CHECK(r1.lab.l == r2.lab.l);
}

TEST_CASE("self-morph keeps quality scalars close to the bona fide cloud") {
    CanonicalView view = CanonicalView::centered(160, 160, 90.0);
    SynthFace face = make_synth_face(6311, view, scan_like_params());
    ColoredPointCloud morph = morph_pair(face.cloud, face.cloud, face.lm, face.lm, view, 0.5);

    QualityReport bona = quality_report(face.cloud);
    QualityReport self = quality_report(morph);
    CHECK(rel_diff(bona.l_color, self.l_color) < 0.10);
    CHECK(rel_diff(bona.a_color, self.a_color) < 0.10);
    CHECK(rel_diff(bona.b_color, self.b_color) < 0.10);
    CHECK(rel_diff(bona.linearity, self.linearity) < 0.10);
    CHECK(rel_diff(bona.planarity, self.planarity) < 0.10);
    CHECK(rel_diff(bona.sphericity, self.sphericity) < 0.10);
    CHECK(rel_diff(bona.anisotropy, self.anisotropy) < 0.10);
    CHECK(rel_diff(bona.curvature, self.curvature) < 0.10);
}

TEST_CASE("quality report propagates input errors") {
    ColoredPointCloud tiny = cloud_from_points(random_points(5191, 10));
    CHECK(thrown_code([&] { quality_report(tiny, 30); }) == Errc::InvalidArgument);
    ColoredPointCloud empty;
    CHECK(thrown_code([&] { quality_report(empty); }) == Errc::EmptyCloud);
}

TEST_SUITE_END();
