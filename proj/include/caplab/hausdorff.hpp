#pragma once

#include <string>
#include <vector>

#include "caplab/dyadic.hpp"
#include "caplab/geometry.hpp"

namespace caplab::hausdorff {

using geometry::Region;
using geometry::SquareBox;

// Kernel h(t) = t^alpha * min(1, (t/cutoff)^gamma). gamma > 0 makes the
// kernel admissible for the lower-content supremum (h(t)/t^alpha -> 0 as
// t -> 0); gamma == 0 degenerates to the pure power t^alpha.
struct MeasureFunction {
    double alpha = 1.0;
    double gamma = 0.0;
    double cutoff = 1.0;

    double operator()(double t) const;
    bool admissible() const { return gamma > 0.0; }
};

MeasureFunction power_kernel(double alpha);
MeasureFunction cutoff_kernel(double alpha, double gamma, double cutoff);

struct IntervalEstimate {
    double lower = 0.0;
    double upper = 0.0;
    int depth = 0;
    std::string method_notes;
};

// Minimal dyadic cover cost of E with kernel h down to the given depth;
// an upper bound for the square-cover content of E. Throws when E's bounding
// box leaves the dyadic root.
double content_upper(const Region& E, const MeasureFunction& h, int depth,
                     const SquareBox& root = geometry::default_root());

// Certified lower bound via the mass-distribution principle: a capped bottom-up
// measure is built on E, its ball-growth constant is measured, and total mass
// is divided by that constant (inflated by a displacement allowance for the
// half-cell transport between atoms and E). Monotone in depth by taking the
// best certificate over coarser builds.
double content_lower(const Region& E, const MeasureFunction& h, int depth,
                     const SquareBox& root = geometry::default_root());

// Two-sided bracket for the alpha-dimensional lower content: upper from the
// pure power kernel, lower as the best content_lower over a sampled family of
// admissible kernels. alpha must lie in (0, 2).
IntervalEstimate lower_content_interval(const Region& E, double alpha, int depth,
                                        const SquareBox& root = geometry::default_root());

// Kernel values by grid level for a root square: values[l] = h(side at l).
std::vector<double> kernel_by_level(const MeasureFunction& h, const SquareBox& root,
                                    int depth);

// Shared tree construction with the root-containment check.
dyadic::CoverTree build_cover_tree(const Region& E, const SquareBox& root, int depth);

} // namespace caplab::hausdorff
