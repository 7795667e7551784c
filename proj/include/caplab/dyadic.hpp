#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "caplab/geometry.hpp"

namespace caplab::dyadic {

using geometry::CellClass;
using geometry::DyadicSquare;
using geometry::Region;
using geometry::SquareBox;

// Pruned quadtree over the dyadic grid anchored at `root`. Only cells whose
// interior meets the region's interior are kept; a cell fully contained in the
// region becomes a `full` leaf and is never subdivided (its descendants are
// reconstructed arithmetically where needed). One tree serves every build
// depth up to its own: levels are a prefix property.
class CoverTree {
public:
    struct Node {
        std::int32_t level;
        std::int64_t ix, iy;
        std::int32_t child[4]; // -1 when absent
        bool full;             // closed cell contained in the closed region
    };

    static CoverTree build(const Region& region, const SquareBox& root, int depth);

    const SquareBox& root() const { return root_; }
    int depth() const { return depth_; }
    bool empty() const { return nodes_.empty(); }
    const std::vector<Node>& nodes() const { return nodes_; }

    double cell_side(int level) const;

    // Minimal dyadic cover cost for the kernel values h_by_level[l] = h(side
    // at level l): cost(Q) = min(h, sum of child costs), leaves at
    // `eval_depth` pay their own h. eval_depth <= depth().
    double cover_cost(const std::vector<double>& h_by_level, int eval_depth) const;

    // Cells of the cheapest dyadic cover at eval_depth: full leaves stay at
    // their own level, partial leaves sit at eval_depth, and a parent square
    // replaces its children's covers whenever h(parent) <= their combined
    // cost, the same choice cover_cost scores. Sorted by (level, ix, iy).
    std::vector<DyadicSquare> coarsened_cover(const std::vector<double>& h_by_level,
                                              int eval_depth) const;

    // Visits every grid cell at eval_depth meeting the region (full subtrees
    // are expanded arithmetically).
    void for_each_leaf(int eval_depth,
                       const std::function<void(const DyadicSquare&)>& fn) const;

private:
    SquareBox root_;
    int depth_ = 0;
    std::vector<Node> nodes_; // nodes_[0] is the root when non-empty
};

} // namespace caplab::dyadic
