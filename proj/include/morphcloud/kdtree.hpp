#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "morphcloud/geometry.hpp"

namespace morphcloud {

// Static 3-d tree over a fixed point set; built once, then queried read-only (safe
// to share across threads). Exact k-nearest-neighbor search: candidates are ranked
// by (squared distance, index), so ties resolve toward the lower index and results
// match a linear-scan oracle exactly, independent of tree layout.
class KdTree {
public:
    explicit KdTree(std::vector<Vec3d> points);

    // Indices of the k nearest stored points to `query`, sorted by (distance,
    // index) ascending. A stored point is its own 0-distance neighbor; callers
    // wanting "other points only" drop the query's own index from the result.
    // Throws InvalidArgument when k == 0 or k > size().
    std::vector<size_t> knn(const Vec3d& query, size_t k) const;

    size_t size() const { return pts_.size(); }

private:
    struct Node {
        double split = 0.0;
        int axis = -1;              // -1 marks a leaf
        size_t left = 0, right = 0; // children (internal nodes)
        size_t begin = 0, end = 0;  // range in order_ (leaves)
    };

    size_t build(size_t begin, size_t end);
    void search(size_t node_index, const Vec3d& query, size_t k,
                std::vector<std::pair<double, size_t>>& heap) const;

    std::vector<Vec3d> pts_;
    std::vector<size_t> order_;
    std::vector<Node> nodes_;
    size_t root_ = 0;
};

} // namespace morphcloud
