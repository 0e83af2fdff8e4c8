#include "morphcloud/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "morphcloud/errors.hpp"

namespace morphcloud {
namespace {

// Bowyer-Watson with a symbolic "ghost" vertex at infinity: every hull edge carries a
// ghost triangle whose conflict region is the open half-plane beyond that edge (plus
// the open edge itself). Unlike a finite super-triangle this covers the convex hull
// exactly -- flat hull triangles with huge circumcircles cannot be stolen by far-away
// helper vertices.
constexpr int kGhost = -1;

struct Tri {
    int a, b, c; // ghost triangles keep the ghost in slot c; a->b is the hull edge
                 // oriented with the outside on its left
    Vec2d cc;    // circumcenter (finite triangles)
    double rr;   // squared circumradius (+inf marks a degenerate always-replaced tri)
    bool alive = true;
};

double orient(const Vec2d& a, const Vec2d& b, const Vec2d& c) {
    return cross(b - a, c - a);
}

Tri make_tri(const std::vector<Vec2d>& pts, int a, int b, int c) {
    Tri t{a, b, c, {0, 0}, std::numeric_limits<double>::infinity(), true};
    const Vec2d &A = pts[static_cast<size_t>(a)], &B = pts[static_cast<size_t>(b)],
                &C = pts[static_cast<size_t>(c)];
    double d = 2.0 * ((B.x - A.x) * (C.y - A.y) - (B.y - A.y) * (C.x - A.x));
    double ab2 = dot(B - A, B - A);
    double ac2 = dot(C - A, C - A);
    if (d != 0.0) {
        double ux = ((C.y - A.y) * ab2 - (B.y - A.y) * ac2) / d;
        double uy = ((B.x - A.x) * ac2 - (C.x - A.x) * ab2) / d;
        t.cc = {A.x + ux, A.y + uy};
        t.rr = ux * ux + uy * uy;
    }
    return t;
}

Tri make_ghost(int a, int b) { return Tri{a, b, kGhost, {0, 0}, 0.0, true}; }

// strictly inside: a point exactly on the circle counts as outside
bool in_circumcircle(const Tri& t, const Vec2d& p) {
    if (!std::isfinite(t.rr)) return true; // exactly degenerate, always replaced
    Vec2d d = p - t.cc;
    return dot(d, d) < t.rr * (1.0 - 1e-12);
}

bool conflicts(const Tri& t, const Vec2d& p, const std::vector<Vec2d>& pts) {
    if (t.c == kGhost) {
        const Vec2d& x = pts[static_cast<size_t>(t.a)];
        const Vec2d& y = pts[static_cast<size_t>(t.b)];
        double o = orient(x, y, p);
        if (o != 0.0) return o > 0.0; // strictly beyond the hull edge
        return dot(p - x, p - y) < 0.0; // exactly on the line: only the open segment
    }
    return in_circumcircle(t, p);
}

} // namespace

TriangleMesh2D delaunay(const std::vector<Vec2d>& pts) {
    // skip exact duplicates so slivers of zero area never enter the mesh
    std::vector<int> insert_order;
    {
        std::map<std::pair<double, double>, int> seen;
        for (size_t i = 0; i < pts.size(); ++i) {
            auto key = std::make_pair(pts[i].x, pts[i].y);
            if (seen.emplace(key, static_cast<int>(i)).second)
                insert_order.push_back(static_cast<int>(i));
        }
    }
    if (insert_order.size() < 3)
        throw Error(Errc::CollinearPoints, "need at least 3 distinct points");

    // the leading points may be collinear; buffer them until a point breaks the line
    auto at = [&](size_t k) -> const Vec2d& {
        return pts[static_cast<size_t>(insert_order[k])];
    };
    size_t qpos = insert_order.size();
    for (size_t k = 2; k < insert_order.size(); ++k) {
        if (orient(at(0), at(1), at(k)) != 0.0) {
            qpos = k;
            break;
        }
    }
    if (qpos == insert_order.size())
        throw Error(Errc::CollinearPoints, "points admit no non-degenerate triangle");

    // initial triangulation: the collinear prefix, sorted along its line, fanned out
    // to the first off-line point q, with ghosts on every boundary edge
    std::vector<int> chain(insert_order.begin(),
                           insert_order.begin() + static_cast<long>(qpos));
    {
        Vec2d origin = at(0);
        Vec2d dir = at(1) - at(0);
        std::sort(chain.begin(), chain.end(), [&](int i, int j) {
            return dot(pts[static_cast<size_t>(i)] - origin, dir) <
                   dot(pts[static_cast<size_t>(j)] - origin, dir);
        });
    }
    int q = insert_order[qpos];
    if (orient(pts[static_cast<size_t>(chain.front())],
               pts[static_cast<size_t>(chain.back())],
               pts[static_cast<size_t>(q)]) < 0.0)
        std::reverse(chain.begin(), chain.end());

    std::vector<Tri> tris;
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        tris.push_back(make_tri(pts, chain[i], chain[i + 1], q)); // CCW: q left of chain
        tris.push_back(make_ghost(chain[i + 1], chain[i]));
    }
    tris.push_back(make_ghost(q, chain.back()));
    tris.push_back(make_ghost(chain.front(), q));

    std::vector<std::pair<int, int>> boundary;
    for (size_t k = qpos + 1; k < insert_order.size(); ++k) {
        int pi = insert_order[k];
        const Vec2d& p = pts[static_cast<size_t>(pi)];

        // collect the cavity: edges of conflicting triangles, kept when seen once
        std::map<std::pair<int, int>, std::pair<int, int>> edge_count;
        bool any_bad = false;
        for (Tri& t : tris) {
            if (!t.alive || !conflicts(t, p, pts)) continue;
            t.alive = false;
            any_bad = true;
            const int e[3][2] = {{t.a, t.b}, {t.b, t.c}, {t.c, t.a}};
            for (const auto& ed : e) {
                auto key = std::minmax(ed[0], ed[1]);
                auto it = edge_count.find(key);
                if (it == edge_count.end())
                    edge_count[key] = {ed[0], ed[1]}; // keep oriented edge
                else
                    it->second = {-1, -1}; // shared edge, interior to the cavity
            }
        }
        if (!any_bad) continue; // numerically possible only for duplicates; skip

        boundary.clear();
        for (const auto& [key, oriented] : edge_count)
            if (!(oriented.first == -1 && oriented.second == -1))
                boundary.push_back(oriented);

        // boundary edges keep their direction, so new triangles inherit orientation;
        // edges touching the ghost spawn new ghosts (rotated to keep it in slot c)
        for (const auto& [ea, eb] : boundary) {
            if (ea == kGhost)
                tris.push_back(make_ghost(eb, pi));
            else if (eb == kGhost)
                tris.push_back(make_ghost(pi, ea));
            else
                tris.push_back(make_tri(pts, ea, eb, pi));
        }

        // compact dead triangles occasionally to keep passes cheap
        if (tris.size() > 4096) {
            std::vector<Tri> live;
            live.reserve(tris.size());
            for (const Tri& t : tris)
                if (t.alive) live.push_back(t);
            tris.swap(live);
        }
    }

    TriangleMesh2D mesh;
    for (const Tri& t : tris) {
        if (!t.alive || t.c == kGhost) continue;
        // normalize orientation to CCW (positive signed area)
        const Vec2d &A = pts[static_cast<size_t>(t.a)], &B = pts[static_cast<size_t>(t.b)],
                    &C = pts[static_cast<size_t>(t.c)];
        double area2 = cross(B - A, C - A);
        if (area2 == 0.0) continue;
        if (area2 > 0.0)
            mesh.tris.push_back({t.a, t.b, t.c});
        else
            mesh.tris.push_back({t.a, t.c, t.b});
    }
    if (mesh.tris.empty())
        throw Error(Errc::CollinearPoints, "points admit no non-degenerate triangle");
    return mesh;
}

} // namespace morphcloud
