#include "caplab/dyadic.hpp"

#include <algorithm>
#include <cmath>

#include "caplab/errors.hpp"

namespace caplab::dyadic {

namespace {

struct Builder {
    const Region& region;
    SquareBox root;
    int depth;
    std::vector<CoverTree::Node> nodes;

    // Returns the node index, or -1 when the cell misses the region interior.
    std::int32_t descend(int level, std::int64_t ix, std::int64_t iy) {
        const DyadicSquare cell{level, ix, iy};
        const SquareBox box = cell.box(root);
        if (geometry::classify_cell_interior(region, box) == CellClass::Empty) return -1;
        const bool full = geometry::classify_cell(region, box) == CellClass::Full;
        const auto idx = static_cast<std::int32_t>(nodes.size());
        nodes.push_back({level, ix, iy, {-1, -1, -1, -1}, full});
        if (!full && level < depth) {
            for (int q = 0; q < 4; ++q) {
                const std::int32_t c =
                    descend(level + 1, 2 * ix + (q & 1), 2 * iy + (q >> 1));
                nodes[idx].child[q] = c;
            }
        }
        return idx;
    }
};

} // namespace

CoverTree CoverTree::build(const Region& region, const SquareBox& root, int depth) {
    if (depth < 0) throw InvalidParams("cover depth must be nonnegative");
    Builder b{region, root, depth, {}};
    b.nodes.reserve(256);
    b.descend(0, 0, 0);
    CoverTree t;
    t.root_ = root;
    t.depth_ = depth;
    t.nodes_ = std::move(b.nodes);
    return t;
}

double CoverTree::cell_side(int level) const { return root_.side * std::ldexp(1.0, -level); }

double CoverTree::cover_cost(const std::vector<double>& h_by_level, int eval_depth) const {
    if (nodes_.empty()) return 0.0;
    if (eval_depth > depth_ || static_cast<int>(h_by_level.size()) <= eval_depth)
        throw InvalidParams("cover evaluation depth exceeds tree depth");

    // Cost of a fully-contained cell by level: f(l) = min(h_l, 4 f(l+1)).
    std::vector<double> full_cost(eval_depth + 1);
    full_cost[eval_depth] = h_by_level[eval_depth];
    for (int l = eval_depth - 1; l >= 0; --l)
        full_cost[l] = std::min(h_by_level[l], 4.0 * full_cost[l + 1]);

    std::function<double(std::int32_t)> rec = [&](std::int32_t i) -> double {
        const Node& n = nodes_[i];
        if (n.full) return full_cost[n.level];
        if (n.level == eval_depth) return h_by_level[n.level];
        double sum = 0.0;
        bool any = false;
        for (std::int32_t c : n.child)
            if (c >= 0) {
                sum += rec(c);
                any = true;
            }
        if (!any) return h_by_level[n.level]; // partial leaf above eval depth
        return std::min(h_by_level[n.level], sum);
    };
    return rec(0);
}

std::vector<DyadicSquare> CoverTree::coarsened_cover(const std::vector<double>& h_by_level,
                                                     int eval_depth) const {
    std::vector<DyadicSquare> out;
    if (nodes_.empty()) return out;
    if (eval_depth > depth_ || static_cast<int>(h_by_level.size()) <= eval_depth)
        throw InvalidParams("cover evaluation depth exceeds tree depth");

    // Bottom-up cost choice mirroring cover_cost: a node keeps its own square
    // whenever h(node) is no more expensive than the best covers of its
    // present children combined, so the emitted cover realizes the minimal
    // dyadic cover cost rather than just collapsing complete sibling sets.
    std::function<double(std::int32_t, std::vector<DyadicSquare>&)> rec =
        [&](std::int32_t i, std::vector<DyadicSquare>& sink) -> double {
        const Node& n = nodes_[i];
        if (n.full || n.level == eval_depth) {
            sink.push_back({n.level, n.ix, n.iy});
            return h_by_level[n.level];
        }
        std::vector<DyadicSquare> local;
        double child_cost = 0.0;
        int present = 0;
        for (std::int32_t c : n.child)
            if (c >= 0) {
                ++present;
                child_cost += rec(c, local);
            }
        if (present == 0 || h_by_level[n.level] <= child_cost) {
            sink.push_back({n.level, n.ix, n.iy});
            return h_by_level[n.level];
        }
        sink.insert(sink.end(), local.begin(), local.end());
        return child_cost;
    };
    rec(0, out);
    std::sort(out.begin(), out.end(), [](const DyadicSquare& a, const DyadicSquare& b) {
        if (a.level != b.level) return a.level < b.level;
        if (a.ix != b.ix) return a.ix < b.ix;
        return a.iy < b.iy;
    });
    return out;
}

void CoverTree::for_each_leaf(int eval_depth,
                              const std::function<void(const DyadicSquare&)>& fn) const {
    if (nodes_.empty()) return;
    if (eval_depth > depth_) throw InvalidParams("cover evaluation depth exceeds tree depth");
    std::function<void(std::int32_t)> rec = [&](std::int32_t i) {
        const Node& n = nodes_[i];
        if (n.level == eval_depth) {
            fn({n.level, n.ix, n.iy});
            return;
        }
        if (n.full) {
            const int shift = eval_depth - n.level;
            const std::int64_t count = std::int64_t{1} << shift;
            for (std::int64_t dy = 0; dy < count; ++dy)
                for (std::int64_t dx = 0; dx < count; ++dx)
                    fn({eval_depth, (n.ix << shift) + dx, (n.iy << shift) + dy});
            return;
        }
        bool any = false;
        for (std::int32_t c : n.child)
            if (c >= 0) {
                rec(c);
                any = true;
            }
        if (!any) {
            // Partial cell with no stored children (tree shallower than
            // requested is excluded above, so this is a pruned degenerate).
            fn({n.level, n.ix, n.iy});
        }
    };
    rec(0);
}

} // namespace caplab::dyadic
