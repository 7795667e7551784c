#pragma once

#include <cstdint>
#include <vector>

#include "caplab/dyadic.hpp"
#include "caplab/geometry.hpp"
#include "caplab/hausdorff.hpp"

namespace caplab::frostman {

using geometry::Disk;
using geometry::Point;
using geometry::Region;
using geometry::SquareBox;
using hausdorff::MeasureFunction;

struct Atom {
    Point position;
    double weight = 0.0; // > 0
};

struct DiscreteMeasure {
    std::vector<Atom> atoms;
    Region support_hint = Region::empty();
    double resolution = 0.0; // finest cell side used by the construction
    SquareBox root = geometry::default_root();

    double total_mass() const;
    // Mass inside the closed ball of the given radius.
    double ball_mass(const Point& center, double radius) const;
    geometry::BBox atom_bounds() const;
};

struct FrostmanReport {
    double constant_C = 0.0;
    Disk worst_ball{};
    double total_mass = 0.0;
    int samples = 0;
};

// Bottom-up capped construction on the non-empty depth cells of K: one atom
// per cell at weight h(side), rescaled whenever an ancestor cell exceeds its
// cap h(ancestor side). Every dyadic cell then satisfies nu(Q) <= h(side Q)
// to within one rounding step. Throws "empty support" when K has no cells.
DiscreteMeasure build_frostman(const Region& K, const MeasureFunction& h, int depth,
                               const SquareBox& root = geometry::default_root());

// Variant reusing a prebuilt tree; eval_depth <= tree.depth().
DiscreteMeasure build_frostman_on(const dyadic::CoverTree& tree, const Region& K,
                                  const MeasureFunction& h, int eval_depth);

// Samples balls with uniform centers in the atom bounding box and log-uniform
// radii between the finest cell side and the root side; reports the largest
// nu(B)/h(radius) seen and the ball achieving it.
FrostmanReport verify_frostman(const DiscreteMeasure& nu, const MeasureFunction& h,
                               int n_samples, std::uint64_t seed);

// Deterministic growth-constant probe used by the content machinery: the
// random sample above plus atom-centered radius ladders, so near-extremal
// balls (for example one enclosing the whole support) are always visited.
FrostmanReport growth_constant(const DiscreteMeasure& nu, const MeasureFunction& h,
                               int n_random, std::uint64_t seed);

} // namespace caplab::frostman
