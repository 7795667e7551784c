#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "caplab/geometry.hpp"
#include "caplab/numerics.hpp"

namespace caplab::campanato {

using geometry::Disk;
using geometry::Point;
using geometry::Region;
using numerics::Complex;

// Exponent pair (p, lambda) for mean-oscillation spaces. alpha = (lambda-2)/p
// is the derived smoothness exponent and 1+alpha the content dimension used
// by the series criterion. Estimator routines only need p >= 1, lambda >= 0;
// the strict window 2-p < lambda < 2+p is enforced where the criterion
// requires it (require_window), while boundary values are admitted by the
// classifier and the exponent-transfer maps.
struct CampanatoParams {
    double p = 2.0;
    double lambda = 2.0;

    CampanatoParams() = default;
    CampanatoParams(double p_, double lambda_);

    double alpha() const { return (lambda - 2.0) / p; }
    double content_dim() const { return 1.0 + alpha(); }
    // Conjugate exponent p/(p-1); infinity when p == 1.
    double q() const;

    bool in_window() const;        // 2-p < lambda < 2+p, strict
    bool in_closed_window() const; // boundary included
    void require_window() const;   // throws InvalidParams outside the open window
};

enum class OscMode { MeanBased, InfC };

// A sampled complex-valued function. The evaluator must be pure and safe for
// concurrent calls. Known singularities are listed so cover-based routines
// can check isolation; Rational marks functions analytic off those points.
struct FunctionHandle {
    std::function<Complex(Complex)> evaluator;
    Region domain = Region::square({{-8.0, -8.0}, 16.0});
    enum class Hint { Rational, Generic } hint = Hint::Generic;
    std::vector<Point> poles;
    std::string name;
};

// Built-in library (addressable by name from the command line).
FunctionHandle fn_constant(Complex c);
FunctionHandle fn_re();   // z -> Re z
FunctionHandle fn_z();    // identity
FunctionHandle fn_conj(); // z -> conjugate

struct PoleTerm {
    Point location;
    int order = 1;
    Complex coefficient = 1.0;
};
// Sum of coefficient * (z - location)^-order terms.
FunctionHandle fn_poles(std::vector<PoleTerm> terms);

FunctionHandle scaled(FunctionHandle f, Complex c);  // c * f
FunctionHandle shifted(FunctionHandle f, Complex c); // f + c

// Resolves a library name ("const_1", "re_z", "z", "conj_z"); throws
// ConfigError for unknown names.
FunctionHandle named_function(const std::string& name);

// Ball family for seminorm sampling: a centers_per_axis^2 grid of centers in
// center_box crossed with a dyadic radius ladder max_radius * 2^-k,
// k = 0..radius_levels-1. Balls whose bounding box leaves the function's
// domain are skipped. Doubling a grid as n -> 2n-1 centers nests the samples,
// which is what the refinement-monotonicity guarantee assumes.
struct BallSamplingSpec {
    geometry::BBox center_box{-0.75, -0.75, 0.75, 0.75};
    int centers_per_axis = 8;
    double max_radius = 0.5;
    int radius_levels = 6;
    int nodes_per_ball = 256;
    OscMode mode = OscMode::MeanBased;
};

struct SeminormEstimate {
    double value = 0.0;
    int balls_sampled = 0;
    int quadrature_nodes = 0;
    OscMode mode = OscMode::MeanBased;
};

// Normalized p-oscillation (r^-lambda int_B |f - c|^p dA)^(1/p) by polar
// midpoint quadrature with about `nodes` nodes. MeanBased takes c as the
// quadrature mean of f over B; InfC minimizes over c (closed form c = mean
// for p = 2, simplex search otherwise). Non-finite samples raise
// NumericError("function not integrable on ball").
double oscillation(const FunctionHandle& f, const Disk& B, const CampanatoParams& params,
                   OscMode mode, int nodes);

// Max oscillation over the sampled family: a lower estimate of the seminorm
// sup, nondecreasing under sampling refinement.
SeminormEstimate seminorm_estimate(const FunctionHandle& f, const CampanatoParams& params,
                                   const BallSamplingSpec& sampling);

// seminorm_estimate restricted to sampled radii <= delta.
double vanishing_modulus(const FunctionHandle& f, double delta, const CampanatoParams& params,
                         const BallSamplingSpec& sampling);

// L^p quadrature norm over X: quadtree cells at `depth`, full cells at
// center-value weight, partial cells weighted by a sampled area fraction.
double lp_norm(const FunctionHandle& f, const Region& X, double p, int depth = 7,
               const geometry::SquareBox& root = geometry::default_root());

// Seminorm plus L^p norm over X.
double norm_estimate(const FunctionHandle& f, const Region& X, const CampanatoParams& params,
                     const BallSamplingSpec& sampling);

enum class TransferDirection { ToGivenP, ReduceBelow2 };

// Moves (p, lambda) along the line of constant alpha. ToGivenP solves for
// lambda at target_p; ReduceBelow2 lands at p1 = 1.5 with lambda1 = 2 +
// 1.5*alpha, the midpoint of the admissible reduction interval. Throws
// InvalidParams("no admissible reduction") when the image violates the
// parameter constraints.
CampanatoParams transfer_params(const CampanatoParams& params, TransferDirection direction,
                                double target_p = 0.0);

struct SpaceClass {
    enum class Tag { BMO, Lipschitz, MorreyNegLip, ConstantsOnly } tag = Tag::BMO;
    double exponent = 0.0; // (lambda-2)/p for the Lipschitz / Morrey tags
};

// lambda = 2 -> BMO; 2 < lambda <= 2+p -> Lipschitz((lambda-2)/p);
// lambda < 2 -> MorreyNegLip; lambda > 2+p -> ConstantsOnly.
SpaceClass classify_space(const CampanatoParams& params);

} // namespace caplab::campanato
