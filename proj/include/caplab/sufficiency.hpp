#pragma once

#include <cstddef>
#include <vector>

#include "caplab/campanato.hpp"
#include "caplab/geometry.hpp"
#include "caplab/numerics.hpp"

namespace caplab::sufficiency {

using campanato::CampanatoParams;
using campanato::FunctionHandle;
using geometry::DyadicSquare;
using geometry::Point;
using geometry::Region;
using geometry::SquareBox;
using numerics::Complex;

// Interior-disjoint dyadic squares covering the target region, coarsened to
// the cheapest cover under the cost kernel and 2:1 balanced across edges.
struct DyadicCover {
    std::vector<DyadicSquare> squares;
    Region target = Region::empty();
    SquareBox root = geometry::default_root();

    bool balanced() const;
};

// cost_alpha is the kernel exponent of the coarsening heuristic (merge four
// children when side^cost_alpha <= 4 * (side/2)^cost_alpha).
DyadicCover dyadic_cover(const Region& K, int depth,
                         const SquareBox& root = geometry::default_root(),
                         double cost_alpha = 1.0);

// Partition of unity subordinate to the 3/2-dilated cover squares: tensor
// polynomial ramps psi_j equal to 1 on a slightly dilated Q_j and 0 off
// Q_j* = (3/2)Q_j, with C^smoothness joins, combined by ordered telescoping
// products phi_j = psi_j * prod_{k<j} (1 - psi_k). The partial sums then
// equal 1 - prod(1 - psi_k): exactly 1 on a neighborhood of the covered set,
// falling smoothly to 0 across the outer collars, which is the shape the
// derivative-bound identity integrates against. The d/dzbar of each phi_j
// comes from the closed-form ramp derivatives, no numerical differentiation.
// Construction requires a 2:1 balanced cover
// (InvalidParams("balance required") otherwise).
class BumpPartition {
public:
    std::size_t size() const { return squares_.size(); }
    const DyadicSquare& square(std::size_t j) const { return squares_[j]; }
    double side(std::size_t j) const;
    // Support box of phi_j (the dilated square).
    geometry::BBox support(std::size_t j) const;

    double psi(std::size_t j, Point z) const;
    double phi(std::size_t j, Point z) const;
    Complex dbar_phi(std::size_t j, Point z) const;
    double partition_sum(Point z) const; // sum of psi over all squares

    // Sampled max over j of side_j * sup |grad phi_j|.
    double gradient_constant() const { return gradient_constant_; }
    int smoothness() const { return smoothness_; }
    const SquareBox& root() const { return root_; }

    friend BumpPartition bump_partition(const DyadicCover& cover, int smoothness);

private:
    std::vector<DyadicSquare> squares_;
    std::vector<std::vector<std::uint32_t>> neighbors_; // overlapping supports
    SquareBox root_;
    int smoothness_ = 2;
    double gradient_constant_ = 0.0;

    double ramp(double tau) const;
    double ramp_deriv(double tau) const;
    // Axis profile of psi_j and its derivative.
    double profile(std::size_t j, double coord, double lo, double hi, double* deriv) const;
    double psi_with_grad(std::size_t j, Point z, double* gx, double* gy) const;
};

BumpPartition bump_partition(const DyadicCover& cover, int smoothness);

// Max over j of |integral over Q_j* of (z-x)^-(t+1) dbar(phi_j) dA| by tensor
// quadrature with about nodes^2 points per square; analytically zero since
// phi_j vanishes on the dilated boundary, so the return value is a direct
// read of the quadrature error. x must stay at least one cell side away from
// every support (InvalidParams("singularity inside support")).
double moment_vanish_check(const BumpPartition& partition, Point x, int t, int nodes);

// Numerical value of (t!/pi) * sum_j integral |f - mean_{Q_j*} f| *
// |z-x|^-(t+1) * |dbar phi_j| dA, the Cauchy-Green majorant of |f^(t)(x)|
// for f analytic off the covered set. Listed poles of f must lie inside the
// cover (InvalidParams("cover does not isolate poles")) and x outside every
// support.
double green_derivative_bound(const FunctionHandle& f, Point x, int t,
                              const CampanatoParams& params, const DyadicCover& cover,
                              int nodes);

} // namespace caplab::sufficiency
