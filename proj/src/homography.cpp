#include "morphcloud/homography.hpp"

#include <cmath>
#include <cstddef>

#include "morphcloud/errors.hpp"
#include "morphcloud/linalg.hpp"
#include "morphcloud/rng.hpp"

namespace morphcloud {

namespace {

constexpr double kDetTol = 1e-12;

// Similarity that moves the centroid to the origin and the mean radius to sqrt(2).
struct Similarity {
    double s = 1.0;
    Vec2d c;
};

Similarity hartley(const std::vector<Vec2d>& pts) {
    Similarity t;
    for (const Vec2d& p : pts) t.c = t.c + p;
    t.c = t.c * (1.0 / pts.size());
    double mean_r = 0.0;
    for (const Vec2d& p : pts) mean_r += norm(p - t.c);
    mean_r /= pts.size();
    if (mean_r < 1e-12)
        throw Error(Errc::SingularSystem, "coincident points in homography estimation");
    t.s = std::sqrt(2.0) / mean_r;
    return t;
}

bool collinear_triple(const Vec2d& a, const Vec2d& b, const Vec2d& c) {
    return std::abs(cross(b - a, c - a)) <= 1e-9;
}

bool degenerate_quad(const std::vector<Vec2d>& p, const size_t idx[4]) {
    for (int skip = 0; skip < 4; ++skip) {
        Vec2d t[3];
        int k = 0;
        for (int i = 0; i < 4; ++i)
            if (i != skip) t[k++] = p[idx[i]];
        if (collinear_triple(t[0], t[1], t[2])) return true;
    }
    return false;
}

double sym_transfer_error(const Homography& h, const Homography& h_inv, const Vec2d& s,
                          const Vec2d& d) {
    double e1 = norm(h.apply(s) - d);
    double e2 = norm(h_inv.apply(d) - s);
    return e1 > e2 ? e1 : e2;
}

size_t count_inliers(const Homography& h, const Homography& h_inv,
                     const std::vector<Vec2d>& src, const std::vector<Vec2d>& dst,
                     double threshold, std::vector<uint8_t>& mask) {
    size_t n = 0;
    for (size_t i = 0; i < src.size(); ++i) {
        bool in = sym_transfer_error(h, h_inv, src[i], dst[i]) < threshold;
        mask[i] = in ? 1 : 0;
        n += in ? 1 : 0;
    }
    return n;
}

} // namespace

Vec2d Homography::apply(const Vec2d& p) const {
    double w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
    if (std::abs(w) < 1e-30) return {1e30, 1e30};
    double inv_w = 1.0 / w;
    return {(m[0][0] * p.x + m[0][1] * p.y + m[0][2]) * inv_w,
            (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) * inv_w};
}

double Homography::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Homography Homography::inverse() const {
    double d = det();
    if (std::abs(d) <= kDetTol)
        throw Error(Errc::SingularSystem, "homography is not invertible");
    double inv_d = 1.0 / d;
    Homography r;
    r.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_d;
    r.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_d;
    r.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_d;
    r.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_d;
    r.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_d;
    r.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_d;
    r.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_d;
    r.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_d;
    r.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_d;
    if (std::abs(r.m[2][2]) > kDetTol) {
        double inv_h33 = 1.0 / r.m[2][2];
        for (auto& row : r.m)
            for (double& v : row) v *= inv_h33;
    }
    return r;
}

Homography homography_dlt(const std::vector<Vec2d>& src, const std::vector<Vec2d>& dst) {
    if (src.size() != dst.size())
        throw Error(Errc::CountMismatch, "correspondence lists differ in length");
    if (src.size() < 4)
        throw Error(Errc::TooFewMatches, "homography needs at least 4 correspondences");

    Similarity ts = hartley(src);
    Similarity td = hartley(dst);

    // Stack two constraint rows per pair on normalized coordinates and accumulate the
    // 9x9 normal matrix directly; its smallest eigenvector is the least-squares h.
    std::vector<double> ata(81, 0.0);
    auto accumulate = [&ata](const double row[9]) {
        for (int r = 0; r < 9; ++r)
            for (int c = r; c < 9; ++c) ata[static_cast<size_t>(r) * 9 + c] += row[r] * row[c];
    };
    for (size_t i = 0; i < src.size(); ++i) {
        Vec2d s = (src[i] - ts.c) * ts.s;
        Vec2d d = (dst[i] - td.c) * td.s;
        double r1[9] = {-s.x, -s.y, -1.0, 0.0, 0.0, 0.0, d.x * s.x, d.x * s.y, d.x};
        double r2[9] = {0.0, 0.0, 0.0, -s.x, -s.y, -1.0, d.y * s.x, d.y * s.y, d.y};
        accumulate(r1);
        accumulate(r2);
    }
    for (int r = 0; r < 9; ++r)
        for (int c = 0; c < r; ++c)
            ata[static_cast<size_t>(r) * 9 + c] = ata[static_cast<size_t>(c) * 9 + r];

    std::vector<double> eigvals, eigvecs;
    jacobi_eigen_symmetric(ata, 9, eigvals, eigvecs);
    double hn[3][3];
    for (int i = 0; i < 9; ++i) hn[i / 3][i % 3] = eigvecs[static_cast<size_t>(i) * 9 + 8];

    // Undo the normalizations: H = Td^-1 * Hn * Ts.
    double a[3][3];
    for (int r = 0; r < 3; ++r) {
        a[r][0] = hn[r][0] * ts.s;
        a[r][1] = hn[r][1] * ts.s;
        a[r][2] = hn[r][2] - a[r][0] * ts.c.x - a[r][1] * ts.c.y;
    }
    Homography h;
    double inv_sd = 1.0 / td.s;
    for (int c = 0; c < 3; ++c) {
        h.m[0][c] = a[0][c] * inv_sd + td.c.x * a[2][c];
        h.m[1][c] = a[1][c] * inv_sd + td.c.y * a[2][c];
        h.m[2][c] = a[2][c];
    }
    if (std::abs(h.m[2][2]) > kDetTol) {
        double inv_h33 = 1.0 / h.m[2][2];
        for (auto& row : h.m)
            for (double& v : row) v *= inv_h33;
    }
    if (std::abs(h.det()) <= kDetTol)
        throw Error(Errc::SingularSystem, "degenerate correspondences for homography");
    return h;
}

HomographyEstimate homography_ransac(const std::vector<FeatureMatch>& matches,
                                     double threshold, int iterations, uint64_t seed) {
    size_t n = matches.size();
    if (n < 4)
        throw Error(Errc::TooFewMatches, "RANSAC needs at least 4 matches, got " +
                                             std::to_string(n));
    std::vector<Vec2d> src(n), dst(n);
    for (size_t i = 0; i < n; ++i) {
        src[i] = {matches[i].src_x, matches[i].src_y};
        dst[i] = {matches[i].dst_x, matches[i].dst_y};
    }

    SplitMix64 rng(seed);
    std::vector<uint8_t> mask(n, 0);
    HomographyEstimate best;
    best.inlier_mask.assign(n, 0);
    bool found = false;

    std::vector<Vec2d> sample_src(4), sample_dst(4);
    for (int iter = 0; iter < iterations; ++iter) {
        size_t idx[4];
        bool usable = false;
        for (int attempt = 0; attempt < 64 && !usable; ++attempt) {
            for (int k = 0; k < 4; ++k) {
                bool fresh = false;
                while (!fresh) {
                    idx[k] = rng.next_below(n);
                    fresh = true;
                    for (int j = 0; j < k; ++j) fresh = fresh && idx[j] != idx[k];
                }
            }
            usable = !degenerate_quad(src, idx) && !degenerate_quad(dst, idx);
        }
        if (!usable) continue;

        for (int k = 0; k < 4; ++k) {
            sample_src[k] = src[idx[k]];
            sample_dst[k] = dst[idx[k]];
        }
        Homography h, h_inv;
        try {
            h = homography_dlt(sample_src, sample_dst);
            h_inv = h.inverse();
        } catch (const Error&) {
            continue;
        }
        size_t count = count_inliers(h, h_inv, src, dst, threshold, mask);
        if (!found || count > best.inlier_count) {
            found = true;
            best.h = h;
            best.inlier_count = count;
            best.inlier_mask = mask;
        }
    }
    if (!found)
        throw Error(Errc::SingularSystem, "no non-degenerate RANSAC sample found");

    // One refit on the full consensus set, then re-evaluate the mask under it.
    if (best.inlier_count >= 4) {
        std::vector<Vec2d> in_src, in_dst;
        in_src.reserve(best.inlier_count);
        in_dst.reserve(best.inlier_count);
        for (size_t i = 0; i < n; ++i) {
            if (!best.inlier_mask[i]) continue;
            in_src.push_back(src[i]);
            in_dst.push_back(dst[i]);
        }
        try {
            Homography refit = homography_dlt(in_src, in_dst);
            Homography refit_inv = refit.inverse();
            best.h = refit;
            best.inlier_count = count_inliers(refit, refit_inv, src, dst, threshold, mask);
            best.inlier_mask = mask;
        } catch (const Error&) {
            // keep the sample-fit model when the refit degenerates
        }
    }
    return best;
}

} // namespace morphcloud
