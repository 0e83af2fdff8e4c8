#include <doctest.h>

#include <cmath>

#include "morphcloud/cleanup.hpp"
#include "morphcloud/errors.hpp"
#include "morphcloud/miniball.hpp"
#include "morphcloud/rng.hpp"

using namespace morphcloud;

namespace {

ColoredPointCloud random_cloud(uint64_t seed, size_t n) {
    SplitMix64 rng(seed);
    ColoredPointCloud cloud;
    cloud.reserve(n);
    for (size_t i = 0; i < n; ++i)
        cloud.push_back({rng.next_range(-1.5, 1.5), rng.next_range(-1.5, 1.5),
                         rng.next_range(-1.5, 1.5)},
                        {static_cast<uint8_t>(rng.next_below(256)),
                         static_cast<uint8_t>(rng.next_below(256)),
                         static_cast<uint8_t>(rng.next_below(256))});
    return cloud;
}

bool clouds_equal(const ColoredPointCloud& a, const ColoredPointCloud& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z && a.color == b.color;
}

} // namespace

TEST_SUITE_BEGIN("cleanup");

TEST_CASE("keep_fraction 1 with an enclosing sphere keeps everything") {
    ColoredPointCloud cloud = random_cloud(901, 500);
    BoundingSphere sphere = min_enclosing_sphere(cloud);
    // the minimal sphere's support points land on the boundary only up to rounding,
    // so grow it a hair to make "encloses the cloud" unambiguous
    sphere.radius *= 1.0 + 1e-9;
    ColoredPointCloud out = clip_sphere_region(cloud, sphere, 1.0);
    CHECK(clouds_equal(out, cloud));
}

TEST_CASE("analytic distances clip as expected") {
    BoundingSphere sphere{{1.0, -2.0, 0.5}, 2.0};
    ColoredPointCloud cloud;
    for (double f : {0.4, 0.6, 0.9}) {
        double r = f * sphere.radius;
        cloud.push_back(sphere.center + Vec3d{r, 0, 0}, {static_cast<uint8_t>(f * 100), 7, 9});
    }
    ColoredPointCloud out = clip_sphere_region(cloud, sphere, 0.7);
    REQUIRE(out.size() == 2);
    CHECK(out.color[0].r == 40);
    CHECK(out.color[1].r == 60);
    CHECK(out.x[0] == cloud.x[0]);
    CHECK(out.x[1] == cloud.x[1]);
}

TEST_CASE("matches a linear-scan oracle and preserves order") {
    ColoredPointCloud cloud = random_cloud(902, 2000);
    BoundingSphere sphere{{0.2, -0.1, 0.3}, 1.1};
    double kf = 0.8;

    ColoredPointCloud expect;
    double r2 = (kf * sphere.radius) * (kf * sphere.radius);
    for (size_t i = 0; i < cloud.size(); ++i)
        if (norm_sq(cloud.point(i) - sphere.center) <= r2)
            expect.push_back(cloud.point(i), cloud.color[i]);
    REQUIRE(expect.size() > 100);
    REQUIRE(expect.size() < cloud.size());

    ColoredPointCloud out = clip_sphere_region(cloud, sphere, kf);
    CHECK(clouds_equal(out, expect));
}

TEST_CASE("clipping is idempotent and monotone in keep_fraction") {
    ColoredPointCloud cloud = random_cloud(903, 1500);
    BoundingSphere sphere{{0, 0, 0}, 2.0};
    ColoredPointCloud once = clip_sphere_region(cloud, sphere, 0.6);
    ColoredPointCloud twice = clip_sphere_region(once, sphere, 0.6);
    CHECK(clouds_equal(once, twice));

    size_t prev = 0;
    for (double kf : {0.3, 0.5, 0.7, 0.9, 1.0}) {
        size_t n = clip_sphere_region(cloud, sphere, kf).size();
        CHECK(n >= prev);
        prev = n;
    }
}

TEST_CASE("boundary points are kept inclusively") {
    BoundingSphere sphere{{0, 0, 0}, 2.0};
    ColoredPointCloud cloud;
    cloud.push_back({1.0, 0, 0}, {1, 1, 1}); // exactly keep_fraction * radius away
    cloud.push_back({std::nextafter(1.0, 2.0), 0, 0}, {2, 2, 2});
    ColoredPointCloud out = clip_sphere_region(cloud, sphere, 0.5);
    REQUIRE(out.size() == 1);
    CHECK(out.color[0].r == 1);
}

TEST_CASE("cleanup error paths") {
    ColoredPointCloud cloud = random_cloud(904, 10);
    BoundingSphere sphere{{0, 0, 0}, 1.0};

    auto code_of = [&](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::NumericFailure;
    };
    CHECK(code_of([&] { clip_sphere_region(cloud, sphere, 0.0); }) == Errc::InvalidArgument);
    CHECK(code_of([&] { clip_sphere_region(cloud, sphere, -0.5); }) == Errc::InvalidArgument);
    CHECK(code_of([&] { clip_sphere_region(cloud, sphere, 1.2); }) == Errc::InvalidArgument);
    CHECK(code_of([&] { clip_sphere_region(cloud, BoundingSphere{{0, 0, 0}, 0.0}, 0.9); }) ==
          Errc::ZeroRadius);
    CHECK(code_of([&] { clip_sphere_region(ColoredPointCloud{}, sphere, 0.9); }) ==
          Errc::EmptyCloud);

    // all points outside the kept region
    BoundingSphere far_sphere{{100, 100, 100}, 1.0};
    try {
        clip_sphere_region(cloud, far_sphere, 0.9);
        FAIL("expected EmptyResult");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyResult);
        CHECK(e.exit_code() == 3);
    }
}

TEST_SUITE_END();
