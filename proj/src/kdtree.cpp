#include "morphcloud/kdtree.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "morphcloud/errors.hpp"

namespace morphcloud {

namespace {

constexpr size_t kLeafSize = 16;

double coord(const Vec3d& p, int axis) {
    return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

} // namespace

KdTree::KdTree(std::vector<Vec3d> points) : pts_(std::move(points)) {
    order_.resize(pts_.size());
    std::iota(order_.begin(), order_.end(), size_t{0});
    if (!pts_.empty()) root_ = build(0, pts_.size());
}

size_t KdTree::build(size_t begin, size_t end) {
    size_t node_index = nodes_.size();
    nodes_.emplace_back();
    if (end - begin <= kLeafSize) {
        nodes_[node_index].begin = begin;
        nodes_[node_index].end = end;
        return node_index;
    }
    // split the widest axis of this node's bounding box at the median point
    Vec3d lo = pts_[order_[begin]], hi = lo;
    for (size_t i = begin + 1; i < end; ++i) {
        const Vec3d& p = pts_[order_[i]];
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    Vec3d extent = hi - lo;
    int axis = 0;
    if (extent.y > coord(extent, axis)) axis = 1;
    if (extent.z > coord(extent, axis)) axis = 2;

    size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<ptrdiff_t>(begin),
                     order_.begin() + static_cast<ptrdiff_t>(mid),
                     order_.begin() + static_cast<ptrdiff_t>(end),
                     [&](size_t a, size_t b) {
                         double ca = coord(pts_[a], axis), cb = coord(pts_[b], axis);
                         return ca != cb ? ca < cb : a < b;
                     });
    double split = coord(pts_[order_[mid]], axis);

    size_t left = build(begin, mid);
    size_t right = build(mid, end);
    nodes_[node_index].axis = axis;
    nodes_[node_index].split = split;
    nodes_[node_index].left = left;
    nodes_[node_index].right = right;
    return node_index;
}

void KdTree::search(size_t node_index, const Vec3d& query, size_t k,
                    std::vector<std::pair<double, size_t>>& heap) const {
    const Node& node = nodes_[node_index];
    if (node.axis < 0) {
        for (size_t i = node.begin; i < node.end; ++i) {
            size_t idx = order_[i];
            std::pair<double, size_t> cand{norm_sq(pts_[idx] - query), idx};
            if (heap.size() < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end());
            } else if (cand < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end());
            }
        }
        return;
    }
    double diff = coord(query, node.axis) - node.split;
    size_t near = diff <= 0.0 ? node.left : node.right;
    size_t far = diff <= 0.0 ? node.right : node.left;
    search(near, query, k, heap);
    // the far side only holds points at axis distance >= |diff|; equality must
    // still be explored so equal-distance, lower-index candidates are found
    if (heap.size() < k || diff * diff <= heap.front().first) search(far, query, k, heap);
}

std::vector<size_t> KdTree::knn(const Vec3d& query, size_t k) const {
    if (k == 0 || k > pts_.size())
        throw Error(Errc::InvalidArgument, "knn k=" + std::to_string(k) +
                                               " out of range for " +
                                               std::to_string(pts_.size()) + " points");
    std::vector<std::pair<double, size_t>> heap;
    heap.reserve(k);
    search(root_, query, k, heap);
    std::sort(heap.begin(), heap.end());
    std::vector<size_t> out(heap.size());
    for (size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].second;
    return out;
}

} // namespace morphcloud
