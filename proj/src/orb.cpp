#include "morphcloud/orb.hpp"

#include <algorithm>
#include <cmath>

#include "morphcloud/errors.hpp"

namespace morphcloud {
namespace {

constexpr int kBorder = 16;       // keeps every sampling offset in bounds
constexpr int kPatchRadius = 15;  // intensity-centroid disc
constexpr int kAngleBins = 30;    // orientation quantization for pattern steering

// radius-3 segment-test circle, clockwise from 12 o'clock
constexpr int kCircle[16][2] = {{0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0},  {3, 1},
                                {2, 2},  {1, 3},  {0, 3},  {-1, 3}, {-2, 2}, {-3, 1},
                                {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};

// fixed 256-pair sampling pattern: gaussian offsets (sigma 6.2) inside a radius-13
// disc, pairs distinct; {x1,y1,x2,y2} per bit
constexpr int8_t kPattern[256][4] = {
    {8,0,0,1}, {6,3,-5,-1}, {3,-1,1,-11}, {-8,0,-4,2},
    {0,0,-5,2}, {9,3,1,-7}, {6,-5,1,-1}, {1,-2,-8,3},
    {-9,-5,-6,1}, {-8,0,10,-5}, {3,5,6,1}, {11,2,-3,0},
    {5,-1,-1,-11}, {-8,-10,3,6}, {-10,-4,3,-1}, {-9,5,2,3},
    {4,-4,-2,-1}, {-2,-1,0,6}, {2,1,12,1}, {1,-3,-9,4},
    {-11,0,-1,6}, {-1,0,0,-8}, {1,-3,0,1}, {6,-4,-1,4},
    {-2,-4,8,-2}, {8,-2,-6,-5}, {-1,-5,-2,-8}, {10,2,-3,5},
    {0,5,0,-5}, {-5,-6,-3,4}, {-3,-5,5,11}, {-3,0,-12,-1},
    {5,-7,-2,5}, {2,-2,-8,-4}, {7,-4,3,-6}, {1,4,1,6},
    {-5,-5,-6,-7}, {0,9,-5,2}, {-8,-2,-2,-2}, {0,11,4,7},
    {-5,-4,-2,-7}, {-1,-5,0,9}, {2,6,0,-7}, {1,-6,2,9},
    {7,4,0,5}, {-3,8,5,2}, {0,-6,-5,1}, {0,-8,-5,-1},
    {-4,8,1,8}, {-4,-6,-3,-8}, {-6,1,6,-6}, {9,-5,3,0},
    {-3,5,-4,8}, {-1,1,-5,-6}, {-5,0,1,-9}, {7,9,-7,5},
    {-6,-3,8,-3}, {1,7,2,-1}, {-5,-5,3,6}, {-9,-4,3,-2},
    {-2,-6,-5,-10}, {2,2,6,6}, {8,-6,-2,-4}, {1,5,-4,0},
    {-3,5,8,2}, {4,2,8,-6}, {2,-7,2,-11}, {2,3,-9,3},
    {-2,2,2,-11}, {-9,-1,-9,-2}, {6,3,-8,6}, {9,5,1,0},
    {-6,8,-7,-2}, {-1,1,-6,-6}, {5,12,-1,-8}, {5,5,-9,0},
    {-3,1,-9,-2}, {2,-4,0,9}, {-4,0,-5,-3}, {2,-7,-3,1},
    {10,-6,-1,-4}, {-3,10,0,-7}, {2,-4,-1,4}, {-4,1,0,1},
    {-4,0,3,-9}, {-2,11,5,10}, {-3,2,5,8}, {4,9,-1,-6},
    {-2,8,2,3}, {8,5,-4,-9}, {3,-3,4,-5}, {-3,12,-3,-12},
    {1,3,-7,-2}, {-10,7,4,7}, {3,-6,2,1}, {2,3,2,-4},
    {-6,4,-5,2}, {-2,7,-2,2}, {-6,-8,-1,-3}, {9,-8,10,7},
    {0,-4,-2,-2}, {1,2,4,5}, {1,-8,-3,3}, {0,-7,7,6},
    {5,1,-4,-3}, {-2,-5,7,6}, {8,10,4,-5}, {-6,-1,-1,1},
    {-4,3,5,11}, {2,-1,-4,8}, {-7,-8,2,4}, {7,-5,-5,-4},
    {-8,3,-5,1}, {6,3,-2,-8}, {-3,6,-2,4}, {-10,-2,0,-2},
    {6,3,8,7}, {2,0,3,4}, {-2,-2,-6,-2}, {3,-4,4,-9},
    {9,-8,-1,-4}, {-4,-6,2,-4}, {-8,5,-6,3}, {-4,2,-4,4},
    {-9,-2,-6,6}, {5,7,0,-7}, {3,6,2,6}, {8,-6,-6,4},
    {0,-7,-2,-7}, {4,10,3,-2}, {-10,0,3,-12}, {3,-3,-9,4},
    {1,8,-2,6}, {5,0,-11,-4}, {11,6,-3,-1}, {4,-2,3,-4},
    {6,-2,7,8}, {0,-4,0,4}, {-7,-1,3,-7}, {-4,10,-5,-1},
    {0,-3,-5,-9}, {-4,-5,-4,10}, {-5,5,1,-10}, {2,9,3,7},
    {5,-1,-8,4}, {4,7,-3,1}, {4,-12,11,-4}, {3,1,-5,-7},
    {8,6,8,7}, {-11,4,-5,3}, {-9,0,4,-1}, {2,-3,1,-10},
    {0,-1,3,-4}, {-8,-4,-6,-6}, {-2,0,-8,7}, {-3,-6,5,0},
    {0,9,0,0}, {5,0,3,6}, {-10,-4,-5,6}, {2,1,-3,-2},
    {-6,1,-8,9}, {-3,0,-6,2}, {9,5,1,-10}, {-1,5,-12,-1},
    {5,-5,-1,-1}, {4,0,5,-4}, {-11,-2,1,-4}, {1,-1,4,9},
    {3,-8,6,8}, {0,-1,-1,-2}, {2,-2,7,4}, {-3,0,1,-3},
    {-1,2,6,-2}, {-8,3,-1,2}, {-2,-4,-1,-4}, {5,4,-1,9},
    {0,0,-1,7}, {5,2,-1,-4}, {2,-11,0,0}, {-10,-7,-11,-1},
    {1,-9,-2,-5}, {4,11,0,8}, {-2,-6,3,-1}, {5,1,0,-5},
    {-3,-6,5,-2}, {-4,9,-4,0}, {-3,9,-5,2}, {-5,6,-7,-3},
    {-3,11,-5,0}, {4,-5,-5,8}, {-3,3,9,2}, {-4,3,-4,1},
    {2,-2,3,-7}, {-4,7,-13,0}, {0,10,8,-5}, {1,-9,-4,5},
    {2,2,-2,1}, {7,6,-5,10}, {2,-1,2,-3}, {8,-4,-8,-7},
    {-7,-10,12,0}, {-8,-9,-3,-8}, {-4,4,-3,-2}, {3,-2,-11,0},
    {-1,3,3,-7}, {11,6,-6,2}, {0,-4,-4,-4}, {0,-2,-4,0},
    {0,0,2,3}, {0,-13,-1,6}, {6,10,4,-1}, {-4,-5,-1,4},
    {-9,-3,-9,2}, {9,-1,-4,8}, {-10,4,1,-7}, {4,0,3,11},
    {-8,8,4,-12}, {-2,3,-7,-3}, {-5,2,-5,-5}, {0,5,7,3},
    {11,-6,-3,7}, {4,1,5,0}, {1,7,4,9}, {-2,-9,-1,-1},
    {1,7,-1,10}, {3,-8,8,4}, {-1,-1,6,-3}, {-4,1,-1,1},
    {6,9,-6,7}, {6,2,4,1}, {8,-3,-6,-5}, {-4,2,1,-10},
    {9,-7,2,-10}, {-4,-9,0,-3}, {0,-7,0,6}, {6,0,-3,7},
    {1,1,6,2}, {2,3,-7,9}, {0,-2,3,7}, {0,-11,-8,-4},
    {6,-4,-11,0}, {2,6,-4,-1}, {-4,-8,-2,-2}, {-3,1,7,4},
    {5,-5,-2,-7}, {-4,-7,-3,-2}, {-9,0,-7,5}, {-4,-1,-4,2},
    {5,-2,-5,0}, {0,5,6,-6}, {3,0,3,4}, {7,-3,-10,-6},
    {3,-3,-2,-4}, {-6,-10,8,4}, {-3,5,4,-10}, {7,-4,7,9},
};

struct Gray {
    int w = 0, h = 0;
    std::vector<float> v;

    float at(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }
};

Gray to_gray(const ImageRgb& img) {
    Gray g{img.width, img.height, std::vector<float>(img.pixels())};
    for (size_t i = 0; i < img.pixels(); ++i) {
        const Rgb& c = img.data[i];
        g.v[i] = 0.299f * c.r + 0.587f * c.g + 0.114f * c.b;
    }
    return g;
}

// segment-test score: the largest threshold at which (x, y) still passes, i.e. the
// best min-|difference| over all 9-contiguous arcs, separately for brighter/darker
double fast_score(const Gray& g, int x, int y) {
    double d[32];
    double c = g.at(x, y);
    for (int i = 0; i < 16; ++i) {
        d[i] = g.at(x + kCircle[i][0], y + kCircle[i][1]) - c;
        d[i + 16] = d[i];
    }
    double best = 0.0;
    for (int s = 0; s < 16; ++s) {
        double mn_b = d[s], mn_d = -d[s];
        for (int k = 1; k < 9; ++k) {
            mn_b = std::min(mn_b, d[s + k]);
            mn_d = std::min(mn_d, -d[s + k]);
        }
        best = std::max({best, mn_b, mn_d});
    }
    return best;
}

// Harris corner response over a 7x7 block of Sobel gradients, k = 0.04
double harris_response(const Gray& g, int x, int y) {
    auto sobel = [&](int px, int py, double& ix, double& iy) {
        double a = g.at(px - 1, py - 1), b = g.at(px, py - 1), c = g.at(px + 1, py - 1);
        double d = g.at(px - 1, py), f = g.at(px + 1, py);
        double p = g.at(px - 1, py + 1), q = g.at(px, py + 1), r = g.at(px + 1, py + 1);
        ix = (c + 2.0 * f + r) - (a + 2.0 * d + p);
        iy = (p + 2.0 * q + r) - (a + 2.0 * b + c);
    };
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int dy = -3; dy <= 3; ++dy)
        for (int dx = -3; dx <= 3; ++dx) {
            double ix, iy;
            sobel(x + dx, y + dy, ix, iy);
            sxx += ix * ix;
            syy += iy * iy;
            sxy += ix * iy;
        }
    return sxx * syy - sxy * sxy - 0.04 * (sxx + syy) * (sxx + syy);
}

// orientation by intensity centroid over a radius-15 disc
double centroid_angle(const Gray& g, int x, int y) {
    double m10 = 0.0, m01 = 0.0;
    for (int dy = -kPatchRadius; dy <= kPatchRadius; ++dy) {
        int ux = static_cast<int>(
            std::floor(std::sqrt(double(kPatchRadius * kPatchRadius - dy * dy))));
        for (int dx = -ux; dx <= ux; ++dx) {
            double val = g.at(x + dx, y + dy);
            m10 += dx * val;
            m01 += dy * val;
        }
    }
    return std::atan2(m01, m10);
}

Descriptor256 steered_brief(const Gray& g, int x, int y, double angle) {
    // quantize the angle so nearby orientation estimates share a pattern
    double step = 2.0 * M_PI / kAngleBins;
    double a = std::floor(angle / step + 0.5) * step;
    double ca = std::cos(a), sa = std::sin(a);
    auto sample = [&](int px, int py) {
        int rx = static_cast<int>(std::lround(ca * px - sa * py));
        int ry = static_cast<int>(std::lround(sa * px + ca * py));
        return g.at(x + rx, y + ry);
    };
    Descriptor256 d{};
    for (int i = 0; i < 256; ++i) {
        float t0 = sample(kPattern[i][0], kPattern[i][1]);
        float t1 = sample(kPattern[i][2], kPattern[i][3]);
        if (t0 < t1) d[static_cast<size_t>(i >> 3)] |= static_cast<uint8_t>(1u << (i & 7));
    }
    return d;
}

} // namespace

OrbFeatures orb_features(const ImageRgb& image, size_t max_features,
                         double fast_threshold) {
    if (image.width < 31 || image.height < 31)
        throw Error(Errc::ImageTooSmall, "orb needs at least a 31x31 image");
    Gray g = to_gray(image);

    // segment-test scores inside the safe border
    MapF32 score(image.width, image.height, 0.0f);
    for (int y = kBorder; y < g.h - kBorder; ++y)
        for (int x = kBorder; x < g.w - kBorder; ++x) {
            double s = fast_score(g, x, y);
            if (s > fast_threshold) score.at(x, y) = static_cast<float>(s);
        }

    // 3x3 non-max suppression; ties resolve to the earlier pixel in scan order
    std::vector<Keypoint> kps;
    for (int y = kBorder; y < g.h - kBorder; ++y)
        for (int x = kBorder; x < g.w - kBorder; ++x) {
            float s = score.at(x, y);
            if (s == 0.0f) continue;
            if (s <= score.at(x - 1, y - 1) || s <= score.at(x, y - 1) ||
                s <= score.at(x + 1, y - 1) || s <= score.at(x - 1, y) ||
                s < score.at(x + 1, y) || s < score.at(x - 1, y + 1) ||
                s < score.at(x, y + 1) || s < score.at(x + 1, y + 1))
                continue;
            Keypoint kp;
            kp.x = x;
            kp.y = y;
            kp.response = harris_response(g, x, y);
            kps.push_back(kp);
        }

    // Harris ranking; deterministic order for equal responses
    std::stable_sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) {
        if (a.response != b.response) return a.response > b.response;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    if (kps.size() > max_features) kps.resize(max_features);

    OrbFeatures out;
    out.keypoints.reserve(kps.size());
    out.descriptors.reserve(kps.size());
    for (Keypoint& kp : kps) {
        int x = static_cast<int>(kp.x), y = static_cast<int>(kp.y);
        kp.angle = centroid_angle(g, x, y);
        out.keypoints.push_back(kp);
        out.descriptors.push_back(steered_brief(g, x, y, kp.angle));
    }
    return out;
}

} // namespace morphcloud
