#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "helpers.hpp"
#include "morphcloud/cloud.hpp"
#include "morphcloud/errors.hpp"
#include "morphcloud/miniball.hpp"
#include "morphcloud/ply_io.hpp"
#include "morphcloud/rng.hpp"

using namespace morphcloud;

namespace {

// ---- independent oracle: exhaustive minimum enclosing sphere for small sets ----
// Candidate spheres come from every 2/3/4-point support set; circumcenters are
// derived here from scratch (perpendicular-bisector equations, Gauss elimination)
// so the oracle shares no geometry code with the library.

struct OSphere {
    Vec3d c;
    double r = -1.0;
};

bool osolve3(double m[3][4], Vec3d& out) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        if (std::fabs(m[piv][col]) < 1e-12) return false;
        for (int cc = 0; cc < 4; ++cc) std::swap(m[col][cc], m[piv][cc]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = m[r][col] / m[col][col];
            for (int cc = col; cc < 4; ++cc) m[r][cc] -= f * m[col][cc];
        }
    }
    out = {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
    return true;
}

OSphere oracle_sphere2(const Vec3d& a, const Vec3d& b) {
    Vec3d c = (a + b) * 0.5;
    return {c, dist(c, a)};
}

OSphere oracle_sphere3(const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    // bisector planes of (a,b) and (a,c), plus the triangle plane through a
    Vec3d n = cross(b - a, c - a);
    if (norm(n) < 1e-12) return {};
    Vec3d ab = b - a, ac = c - a;
    double m[3][4] = {
        {ab.x, ab.y, ab.z, 0.5 * (dot(b, b) - dot(a, a))},
        {ac.x, ac.y, ac.z, 0.5 * (dot(c, c) - dot(a, a))},
        {n.x, n.y, n.z, dot(n, a)},
    };
    Vec3d center;
    if (!osolve3(m, center)) return {};
    return {center, dist(center, a)};
}

OSphere oracle_sphere4(const Vec3d& a, const Vec3d& b, const Vec3d& c, const Vec3d& d) {
    Vec3d ab = b - a, ac = c - a, ad = d - a;
    double m[3][4] = {
        {ab.x, ab.y, ab.z, 0.5 * (dot(b, b) - dot(a, a))},
        {ac.x, ac.y, ac.z, 0.5 * (dot(c, c) - dot(a, a))},
        {ad.x, ad.y, ad.z, 0.5 * (dot(d, d) - dot(a, a))},
    };
    Vec3d center;
    if (!osolve3(m, center)) return {};
    return {center, dist(center, a)};
}

bool oracle_contains(const OSphere& s, const Vec3d& p) {
    return s.r >= 0.0 && dist(s.c, p) <= s.r * (1.0 + 1e-10) + 1e-12;
}

OSphere oracle_min_sphere(const std::vector<Vec3d>& pts) {
    OSphere best;
    auto consider = [&](const OSphere& cand) {
        if (cand.r < 0.0) return;
        for (const Vec3d& p : pts)
            if (!oracle_contains(cand, p)) return;
        if (best.r < 0.0 || cand.r < best.r) best = cand;
    };
    size_t n = pts.size();
    if (n == 1) return {pts[0], 0.0};
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            consider(oracle_sphere2(pts[i], pts[j]));
            for (size_t k = j + 1; k < n; ++k) {
                consider(oracle_sphere3(pts[i], pts[j], pts[k]));
                for (size_t l = k + 1; l < n; ++l)
                    consider(oracle_sphere4(pts[i], pts[j], pts[k], pts[l]));
            }
        }
    return best;
}

ColoredPointCloud make_cloud(const std::vector<Vec3d>& pts) {
    ColoredPointCloud c;
    for (size_t i = 0; i < pts.size(); ++i)
        c.push_back(pts[i], Rgb{static_cast<uint8_t>(i * 7 % 256),
                                static_cast<uint8_t>(i * 13 % 256),
                                static_cast<uint8_t>(i * 29 % 256)});
    return c;
}

} // namespace

TEST_SUITE_BEGIN("pc_core");

TEST_CASE("min sphere of known configurations") {
    SUBCASE("single point") {
        BoundingSphere s = min_enclosing_sphere(std::vector<Vec3d>{{1, 2, 3}});
        CHECK(s.radius == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(dist(s.center, {1, 2, 3}) < 1e-12);
    }
    SUBCASE("two points span the diameter") {
        BoundingSphere s = min_enclosing_sphere(std::vector<Vec3d>{{-1, 0, 0}, {1, 0, 0}});
        CHECK(s.radius == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(norm(s.center) < 1e-12);
    }
    SUBCASE("duplicated points collapse to radius zero") {
        std::vector<Vec3d> pts(10, Vec3d{4, -5, 6});
        BoundingSphere s = min_enclosing_sphere(pts);
        CHECK(s.radius < 1e-12);
    }
    SUBCASE("regular tetrahedron circumsphere") {
        std::vector<Vec3d> pts = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
        BoundingSphere s = min_enclosing_sphere(pts);
        CHECK(s.radius == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
        CHECK(norm(s.center) < 1e-9);
    }
    SUBCASE("cube corners") {
        std::vector<Vec3d> pts;
        for (int i = 0; i < 8; ++i)
            pts.push_back({i & 1 ? 1.0 : -1.0, i & 2 ? 1.0 : -1.0, i & 4 ? 1.0 : -1.0});
        BoundingSphere s = min_enclosing_sphere(pts);
        CHECK(s.radius == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
        CHECK(norm(s.center) < 1e-9);
    }
    SUBCASE("interior points do not change the sphere") {
        std::vector<Vec3d> pts = {{-1, 0, 0}, {1, 0, 0}, {0, 0.2, 0}, {0.1, 0.1, -0.3}};
        BoundingSphere s = min_enclosing_sphere(pts);
        CHECK(s.radius == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("collinear points use the extreme pair") {
        std::vector<Vec3d> pts = {{0, 0, 0}, {1, 0, 0}, {3, 0, 0}, {2, 0, 0}};
        BoundingSphere s = min_enclosing_sphere(pts);
        CHECK(s.radius == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(dist(s.center, {1.5, 0, 0}) < 1e-12);
    }
    SUBCASE("equilateral triangle circumradius") {
        double h = std::sqrt(3.0);
        std::vector<Vec3d> pts = {{-1, 0, 0}, {1, 0, 0}, {0, h, 0}};
        BoundingSphere s = min_enclosing_sphere(pts);
        CHECK(s.radius == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
    }
}

TEST_CASE("min sphere agrees with the exhaustive support-set oracle") {
    SplitMix64 rng(777);
    for (int trial = 0; trial < 200; ++trial) {
        size_t n = 2 + rng.next_below(11); // 2..12 points
        std::vector<Vec3d> pts(n);
        for (auto& p : pts)
            p = {rng.next_range(-1, 1), rng.next_range(-1, 1), rng.next_range(-1, 1)};
        OSphere want = oracle_min_sphere(pts);
        BoundingSphere got = min_enclosing_sphere(pts);
        REQUIRE_MESSAGE(std::fabs(got.radius - want.r) < 1e-9,
                        "trial " << trial << " got r=" << got.radius << " want " << want.r);
        REQUIRE_MESSAGE(dist(got.center, want.c) < 1e-8, "trial " << trial);
    }
}

TEST_CASE("min sphere contains every input point and is deterministic") {
    SplitMix64 rng(778);
    std::vector<Vec3d> pts(5000);
    for (auto& p : pts)
        p = {rng.next_gaussian() * 2.0, rng.next_gaussian(), rng.next_gaussian() * 0.5};
    BoundingSphere s1 = min_enclosing_sphere(pts);
    BoundingSphere s2 = min_enclosing_sphere(pts);
    CHECK(s1.center == s2.center);
    CHECK(s1.radius == s2.radius);
    for (const Vec3d& p : pts) CHECK(s1.contains(p, 1e-9));
}

TEST_CASE("min sphere rejects empty input") {
    CHECK_THROWS_AS(min_enclosing_sphere(std::vector<Vec3d>{}), Error);
    ColoredPointCloud empty;
    CHECK_THROWS_AS(min_enclosing_sphere(empty), Error);
    try {
        min_enclosing_sphere(empty);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyCloud);
        CHECK(e.exit_code() == 2);
    }
}

TEST_CASE("center_and_scale maps the bounding sphere to origin/target") {
    SplitMix64 rng(779);
    std::vector<Vec3d> pts(400);
    for (auto& p : pts)
        p = {5.0 + rng.next_range(-2, 2), -3.0 + rng.next_range(-1, 1), rng.next_range(0, 4)};
    ColoredPointCloud cloud = make_cloud(pts);
    BoundingSphere s = min_enclosing_sphere(cloud);
    ColoredPointCloud norm_cloud = center_and_scale(cloud, s, 1.0);
    BoundingSphere after = min_enclosing_sphere(norm_cloud);
    CHECK(std::fabs(after.radius - 1.0) < 1e-6);
    CHECK(norm(after.center) < 1e-6);
    CHECK(norm_cloud.color == cloud.color);

    SUBCASE("scaling to another radius") {
        ColoredPointCloud r3 = center_and_scale(cloud, s, 3.0);
        BoundingSphere a3 = min_enclosing_sphere(r3);
        CHECK(std::fabs(a3.radius - 3.0) < 1e-6);
    }
    SUBCASE("zero radius rejected") {
        CHECK_THROWS_AS(center_and_scale(cloud, BoundingSphere{{0, 0, 0}, 0.0}, 1.0), Error);
    }
}

TEST_CASE("translate is an exact per-axis shift") {
    ColoredPointCloud c = make_cloud({{0.5, -1.25, 2.0}, {3.0, 4.0, -5.0}});
    Vec3d t{1.5, -2.0, 0.25};
    ColoredPointCloud moved = translate(c, t);
    for (size_t i = 0; i < c.size(); ++i) {
        CHECK(moved.x[i] == c.x[i] + t.x);
        CHECK(moved.y[i] == c.y[i] + t.y);
        CHECK(moved.z[i] == c.z[i] + t.z);
    }
    CHECK(moved.color == c.color);
}

TEST_CASE("cloud validate flags structural problems") {
    ColoredPointCloud c = make_cloud({{0, 0, 0}});
    CHECK_NOTHROW(c.validate());
    c.y.push_back(1.0);
    CHECK_THROWS_AS(c.validate(), Error);

    ColoredPointCloud nan_cloud = make_cloud({{0, 0, 0}});
    nan_cloud.z[0] = std::nan("");
    CHECK_THROWS_AS(nan_cloud.validate(), Error);
}

// ---------------------------------- PLY ----------------------------------

TEST_CASE("ply ascii parse of a known fixture") {
    TempDir tmp;
    std::string path = tmp.file("fixture.ply");
    write_text_file(path,
                    "ply\n"
                    "format ascii 1.0\n"
                    "comment hand-written fixture\n"
                    "element vertex 2\n"
                    "property float x\n"
                    "property float y\n"
                    "property float z\n"
                    "property uchar red\n"
                    "property uchar green\n"
                    "property uchar blue\n"
                    "end_header\n"
                    "0.5 -1.25 2 255 0 10\n"
                    "-3 4.5 -0.125 1 2 3\n");
    ColoredPointCloud c = load_ply(path);
    REQUIRE(c.size() == 2);
    CHECK(c.x[0] == 0.5);
    CHECK(c.y[0] == -1.25);
    CHECK(c.z[0] == 2.0);
    CHECK(c.color[0] == Rgb{255, 0, 10});
    CHECK(c.x[1] == -3.0);
    CHECK(c.color[1] == Rgb{1, 2, 3});
}

TEST_CASE("ply round trips") {
    TempDir tmp;
    SplitMix64 rng(991);
    ColoredPointCloud c;
    for (int i = 0; i < 257; ++i) {
        // float-representable coordinates so both formats round-trip exactly
        Vec3d p{static_cast<float>(rng.next_range(-10, 10)),
                static_cast<float>(rng.next_range(-10, 10)),
                static_cast<float>(rng.next_range(-10, 10))};
        c.push_back(p, Rgb{static_cast<uint8_t>(rng.next_below(256)),
                           static_cast<uint8_t>(rng.next_below(256)),
                           static_cast<uint8_t>(rng.next_below(256))});
    }

    SUBCASE("binary little-endian is bit-exact") {
        std::string path = tmp.file("bin.ply");
        save_ply(c, path, PlyFormat::BinaryLittleEndian);
        ColoredPointCloud back = load_ply(path);
        REQUIRE(back.size() == c.size());
        CHECK(std::memcmp(back.x.data(), c.x.data(), c.size() * sizeof(double)) == 0);
        CHECK(std::memcmp(back.y.data(), c.y.data(), c.size() * sizeof(double)) == 0);
        CHECK(std::memcmp(back.z.data(), c.z.data(), c.size() * sizeof(double)) == 0);
        CHECK(back.color == c.color);
    }
    SUBCASE("ascii survives within float precision") {
        std::string path = tmp.file("ascii.ply");
        save_ply(c, path, PlyFormat::Ascii);
        ColoredPointCloud back = load_ply(path);
        REQUIRE(back.size() == c.size());
        for (size_t i = 0; i < c.size(); ++i) {
            CHECK(back.x[i] == c.x[i]); // %.9g is exact for float32
            CHECK(back.y[i] == c.y[i]);
            CHECK(back.z[i] == c.z[i]);
        }
        CHECK(back.color == c.color);
    }
    SUBCASE("binary rewrite of a loaded file is byte-identical") {
        std::string p1 = tmp.file("first.ply");
        std::string p2 = tmp.file("second.ply");
        save_ply(c, p1, PlyFormat::BinaryLittleEndian);
        save_ply(load_ply(p1), p2, PlyFormat::BinaryLittleEndian);
        std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
        std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
        std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
        CHECK(s1 == s2);
    }
}

TEST_CASE("ply loader accepts extra properties and double coordinates") {
    TempDir tmp;
    std::string path = tmp.file("extra.ply");
    write_text_file(path,
                    "ply\n"
                    "format ascii 1.0\n"
                    "element vertex 1\n"
                    "property double x\n"
                    "property double y\n"
                    "property double z\n"
                    "property float confidence\n"
                    "property uchar red\n"
                    "property uchar green\n"
                    "property uchar blue\n"
                    "property uchar alpha\n"
                    "end_header\n"
                    "1.0 2.0 3.0 0.9 10 20 30 255\n");
    ColoredPointCloud c = load_ply(path);
    REQUIRE(c.size() == 1);
    CHECK(c.point(0) == Vec3d{1, 2, 3});
    CHECK(c.color[0] == Rgb{10, 20, 30});
}

TEST_CASE("ply loader rejects malformed inputs with the right codes") {
    TempDir tmp;
    auto expect_code = [&](const std::string& name, const std::string& body, Errc code) {
        std::string path = tmp.file(name);
        write_text_file(path, body);
        try {
            load_ply(path);
            FAIL_CHECK("expected throw for " << name);
        } catch (const Error& e) {
            CHECK_MESSAGE(e.code() == code, name << " -> " << errc_name(e.code()));
        }
    };

    expect_code("magic.ply", "plyx\nformat ascii 1.0\nend_header\n", Errc::MalformedPly);
    expect_code("bigendian.ply",
                "ply\nformat binary_big_endian 1.0\nelement vertex 1\n"
                "property float x\nproperty float y\nproperty float z\n"
                "property uchar red\nproperty uchar green\nproperty uchar blue\n"
                "end_header\n",
                Errc::MalformedPly);
    expect_code("nocolor.ply",
                "ply\nformat ascii 1.0\nelement vertex 1\n"
                "property float x\nproperty float y\nproperty float z\n"
                "end_header\n0 0 0\n",
                Errc::MissingColor);
    expect_code("empty.ply",
                "ply\nformat ascii 1.0\nelement vertex 0\n"
                "property float x\nproperty float y\nproperty float z\n"
                "property uchar red\nproperty uchar green\nproperty uchar blue\n"
                "end_header\n",
                Errc::EmptyCloud);
    expect_code("truncated.ply",
                "ply\nformat ascii 1.0\nelement vertex 2\n"
                "property float x\nproperty float y\nproperty float z\n"
                "property uchar red\nproperty uchar green\nproperty uchar blue\n"
                "end_header\n0 0 0 1 2 3\n",
                Errc::MalformedPly);
    expect_code("intcolor.ply",
                "ply\nformat ascii 1.0\nelement vertex 1\n"
                "property float x\nproperty float y\nproperty float z\n"
                "property int red\nproperty int green\nproperty int blue\n"
                "end_header\n0 0 0 1 2 3\n",
                Errc::MalformedPly);
    expect_code("vertexlist.ply",
                "ply\nformat ascii 1.0\nelement vertex 1\n"
                "property float x\nproperty float y\nproperty float z\n"
                "property list uchar int vertex_indices\n"
                "property uchar red\nproperty uchar green\nproperty uchar blue\n"
                "end_header\n0 0 0 0 1 2 3\n",
                Errc::MalformedPly);
    CHECK_THROWS_AS(load_ply(tmp.file("does_not_exist.ply")), Error);
}

TEST_SUITE_END();
