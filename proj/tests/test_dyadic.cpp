#include <doctest.h>

#include <cmath>
#include <set>
#include <tuple>

#include "caplab/dyadic.hpp"
#include "caplab/geometry.hpp"
#include "caplab/numerics.hpp"

using namespace caplab;
using dyadic::CoverTree;
using geometry::DyadicSquare;
using geometry::Point;
using geometry::Region;
using geometry::SquareBox;

namespace {

std::vector<double> linear_kernel(const SquareBox& root, int depth) {
    std::vector<double> h(static_cast<std::size_t>(depth) + 1);
    for (int l = 0; l <= depth; ++l) h[static_cast<std::size_t>(l)] = root.side * std::ldexp(1.0, -l);
    return h;
}

} // namespace

TEST_CASE("tree of an empty region is empty") {
    const CoverTree tree = CoverTree::build(Region::empty(), geometry::default_root(), 5);
    CHECK(tree.empty());
}

TEST_CASE("tree leaves cover the region") {
    const Region r = Region::disk({{0.2, -0.1}, 0.4});
    const SquareBox root = geometry::default_root();
    const CoverTree tree = CoverTree::build(r, root, 6);
    CHECK(!tree.empty());

    std::set<std::tuple<int, std::int64_t, std::int64_t>> leaves;
    tree.for_each_leaf(6, [&](const DyadicSquare& s) {
        leaves.insert({s.level, s.ix, s.iy});
    });
    CHECK(!leaves.empty());

    // Every interior sample point of the region lands in some depth-6 leaf.
    numerics::Rng rng(3);
    const double side6 = tree.cell_side(6);
    for (int k = 0; k < 3000; ++k) {
        const Point p{rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)};
        if (!r.interior_contains(p)) continue;
        const auto ix = static_cast<std::int64_t>((p.re - root.corner.re) / side6);
        const auto iy = static_cast<std::int64_t>((p.im - root.corner.im) / side6);
        CHECK(leaves.count({6, ix, iy}) == 1);
    }
}

TEST_CASE("cover cost of an aligned origin disk hits the four-cell cover") {
    // The quarter disks of radius 2^-3 inscribe exactly into four side-2^-3
    // cells at the origin corner, so the minimal dyadic cover costs 4 * 2^-3
    // under the linear kernel.
    const SquareBox root = geometry::default_root();
    const int depth = 6;
    const CoverTree tree = CoverTree::build(Region::disk({{0.0, 0.0}, 0.125}), root, depth);
    const double cost = tree.cover_cost(linear_kernel(root, depth), depth);
    CHECK(cost == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("cover cost never exceeds the root and is monotone in depth") {
    const Region r = Region::difference(Region::disk({{0.1, 0.1}, 0.5}),
                                        Region::disk({{0.1, 0.1}, 0.2}));
    const SquareBox root = geometry::default_root();
    const CoverTree tree = CoverTree::build(r, root, 7);
    double prev = root.side;
    for (int d = 1; d <= 7; ++d) {
        const double cost = tree.cover_cost(linear_kernel(root, 7), d);
        CHECK(cost <= prev * 4.0 + 1e-12);
        // Refining can only lower the DP value or keep it.
        if (d > 1) CHECK(cost <= prev + 1e-12);
        prev = cost;
    }
}

TEST_CASE("coarsened cover realizes the cover cost") {
    const Region r = Region::disk({{0.0, 0.0}, 0.125});
    const SquareBox root = geometry::default_root();
    const int depth = 6;
    const CoverTree tree = CoverTree::build(r, root, depth);
    const auto h = linear_kernel(root, depth);
    const auto squares = tree.coarsened_cover(h, depth);

    double total = 0.0;
    for (const DyadicSquare& s : squares) total += h[static_cast<std::size_t>(s.level)];
    CHECK(total == doctest::Approx(tree.cover_cost(h, depth)).epsilon(1e-12));

    // The emitted squares still cover the region.
    numerics::Rng rng(17);
    for (int k = 0; k < 2000; ++k) {
        const Point p{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
        if (!r.interior_contains(p)) continue;
        bool inside = false;
        for (const DyadicSquare& s : squares) {
            const SquareBox b = s.box(root);
            inside = inside || (p.re >= b.corner.re && p.re <= b.corner.re + b.side &&
                                p.im >= b.corner.im && p.im <= b.corner.im + b.side);
        }
        CHECK(inside);
    }
}

TEST_CASE("coarsened cover squares are interior disjoint") {
    const Region r = Region::join({Region::disk({{-0.4, 0.3}, 0.3}),
                                   Region::square({{0.1, -0.6}, 0.45})});
    const SquareBox root = geometry::default_root();
    const CoverTree tree = CoverTree::build(r, root, 6);
    const auto squares = tree.coarsened_cover(linear_kernel(root, 6), 6);
    for (std::size_t a = 0; a < squares.size(); ++a) {
        const SquareBox ba = squares[a].box(root);
        for (std::size_t b = a + 1; b < squares.size(); ++b) {
            const SquareBox bb = squares[b].box(root);
            const double ox = std::min(ba.corner.re + ba.side, bb.corner.re + bb.side) -
                              std::max(ba.corner.re, bb.corner.re);
            const double oy = std::min(ba.corner.im + ba.side, bb.corner.im + bb.side) -
                              std::max(ba.corner.im, bb.corner.im);
            CHECK((ox <= 1e-12 || oy <= 1e-12));
        }
    }
}
