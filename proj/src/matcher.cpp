#include "morphcloud/matcher.hpp"

#include <limits>

#include "morphcloud/kernels.hpp"

namespace morphcloud {

namespace {

constexpr int kNoSecond = 257; // one more than the largest possible distance

struct Nearest {
    size_t index = 0;
    int best = kNoSecond;
    int second = kNoSecond;
};

// Nearest + second-nearest db entry for one query; ties keep the lowest index.
Nearest scan_row(const uint16_t* dist, size_t count) {
    Nearest n;
    for (size_t j = 0; j < count; ++j) {
        int d = dist[j];
        if (d < n.best) {
            n.second = n.best;
            n.best = d;
            n.index = j;
        } else if (d < n.second) {
            n.second = d;
        }
    }
    return n;
}

} // namespace

std::vector<FeatureMatch> match_bruteforce(const OrbFeatures& src, const OrbFeatures& dst,
                                           double ratio) {
    std::vector<FeatureMatch> out;
    size_t ns = src.descriptors.size();
    size_t nd = dst.descriptors.size();
    if (ns == 0 || nd == 0) return out;

    const auto& k = kernels::ops();
    const uint8_t* dst_rows = dst.descriptors[0].data();
    const uint8_t* src_rows = src.descriptors[0].data();

    // Forward pass: ratio-tested nearest dst for every src descriptor.
    std::vector<Nearest> fwd(ns);
    std::vector<uint16_t> dist(nd);
    for (size_t i = 0; i < ns; ++i) {
        k.hamming256(src.descriptors[i].data(), dst_rows, nd, dist.data());
        fwd[i] = scan_row(dist.data(), nd);
    }

    // Reverse pass: plain nearest src for every dst descriptor (cross check).
    std::vector<size_t> rev(nd);
    dist.resize(ns);
    for (size_t j = 0; j < nd; ++j) {
        k.hamming256(dst.descriptors[j].data(), src_rows, ns, dist.data());
        rev[j] = scan_row(dist.data(), ns).index;
    }

    for (size_t i = 0; i < ns; ++i) {
        const Nearest& n = fwd[i];
        if (!(n.best < ratio * n.second)) continue;
        if (rev[n.index] != i) continue;
        FeatureMatch m;
        m.src_index = i;
        m.dst_index = n.index;
        m.src_x = src.keypoints[i].x;
        m.src_y = src.keypoints[i].y;
        m.dst_x = dst.keypoints[n.index].x;
        m.dst_y = dst.keypoints[n.index].y;
        m.distance = n.best;
        out.push_back(m);
    }
    return out;
}

} // namespace morphcloud
