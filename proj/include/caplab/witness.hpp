#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "caplab/campanato.hpp"
#include "caplab/frostman.hpp"
#include "caplab/geometry.hpp"
#include "caplab/numerics.hpp"

namespace caplab::witness {

using campanato::CampanatoParams;
using geometry::Point;
using geometry::Region;
using numerics::Complex;

// Twisted Cauchy kernel sum over a discrete measure:
//   scale * sum_a twist(zeta_a) * w_a / (zeta_a - z)
// with twist(zeta) = (zeta/|zeta|)^(t+1) when enabled. annulus_index records
// which dyadic shell the measure lives on (negative when not shell-bound).
struct WitnessFunction {
    frostman::DiscreteMeasure measure;
    int t = 0;
    bool twist = true;
    int annulus_index = -1;
    double scale = 1.0;
};

Complex witness_eval(const WitnessFunction& w, Point z);

// Exact t-th derivative at the origin, t! * scale * sum w_a / |zeta_a|^(t+1).
// Requires the twist with matching order; real and positive for positive
// scale. Shell terms are accumulated in scaled form so shells far below the
// root scale do not overflow.
double witness_derivative(const WitnessFunction& w, int t);

// Rescales so the far-field expansion is exactly z^-1 + O(z^-2):
// scale = -1 / total mass.
WitnessFunction normalized_far_field(WitnessFunction w);

// Wraps a witness function (or a sum of them) for the seminorm machinery.
campanato::FunctionHandle to_function(std::vector<WitnessFunction> parts,
                                      std::string name = "witness");

struct EpsilonSequence {
    std::vector<double> values; // nonincreasing, each in (0, 1]
};

// eps_n = running min of (1, 1/term_n, 1/S_n) with S_n the partial sum.
// Guarantees eps_n * term_n <= 1; for divergent input series the weighted
// series sum eps_n * term_n still diverges. Throws
// InvalidParams("degenerate series") when every term is zero.
EpsilonSequence epsilon_sequence(const std::vector<double>& terms);

// Smallest M >= m with sum_{n=m}^{M} weighted_terms >= 1 (1-based m). Each
// term <= 1 keeps the landing window within [1, 2]. Throws
// InvalidParams("tail exhausted") when the tail sum stays below 1.
int block_select(const std::vector<double>& weighted_terms, int m);

struct NecessityConfig {
    int m_lo = 1;
    int m_hi = 8;
    // Hard cap on the shell index reachable by block selection.
    int shell_limit = 400;
    // Measure resolution: each shell is rescaled to unit size and built
    // extra_depth levels below its coarsest resolving cell.
    int extra_depth = 4;
    // Analytic series terms (1-based from n = 1). When set they replace the
    // measured shell contents in the epsilon normalization, which is what
    // the exactly-calibrated divergent families are for. Empty means terms
    // are measured from the geometry.
    std::vector<double> exact_terms;
    // Exponent override for the measure growth law h(r) = eps_n r^(1+alpha).
    // Lets the harness run boundary exponents; defaults to params.alpha().
    std::optional<double> alpha_override;
    // Sampling for the block norm estimates.
    campanato::BallSamplingSpec norm_sampling;
    int lp_depth = 6;
    // Optional override returning the retained part of shell n around the
    // (already translated) point: by default the n-th dyadic annulus minus
    // the set. Exact layouts can hand back their deleted disks directly,
    // which skips the difference walk on very deep shells.
    std::function<Region(int)> shell_region;
    // Oscillation-bound measurement: shells n in [lemma_n_lo, lemma_n_hi],
    // balls sampled in shells k with offset |k-n| in [2, lemma_k_span].
    int lemma_n_lo = 2;
    int lemma_n_hi = 10;
    int lemma_k_span = 4;
    int lemma_balls = 200;
    int lemma_nodes = 192;
    unsigned seed = 0x5eedu;
};

struct BlockRecord {
    int m = 0;
    int M = 0;
    double block_weight = 0.0; // sum of weighted terms over [m, M]
    double derivative_at_x = 0.0;
    double seminorm_part = 0.0;
    double lp_part = 0.0;
    double norm_estimate = 0.0;
};

// Measured constants for one shell measure: the fitted ratios of observed
// quantities to their predicted scales.
struct ShellConstants {
    int n = 0;
    double epsilon = 0.0;
    double content = 0.0;       // shell content estimate used for the term
    double mass = 0.0;          // achieved measure mass
    double weighted_term = 0.0; // eps_n * 2^{n(t+1)} * content
    double osc_ratio = 0.0;     // far-ball p-oscillation vs eps_n 2^{n(1+a)} content
    double mean_ratio = 0.0;    // same for the ball-mean variant
    double lp_ratio = 0.0;      // L^p norm over X vs eps_n * content
};

struct WitnessReport {
    std::string status; // "ok" or "series converges; no witness"
    CampanatoParams params_used;
    double alpha = 0.0;
    int t = 0;
    std::vector<BlockRecord> blocks;
    std::vector<ShellConstants> shells;
    double derivative_floor = 0.0; // min over blocks of derivative_at_x
};

// Runs the divergence-side construction around x: per-shell capped measures
// with growth h(r) = eps_n r^(1+alpha), kernel sums f_n, block sums g_m with
// unit epsilon-weighted window, their derivatives at x, norm estimates, and
// the per-shell oscillation constants. Requires p < 2 after reduction;
// params with p >= 2 are passed through transfer_params(ReduceBelow2) first
// and the reduced pair is recorded in the report.
WitnessReport necessity_suite(const Region& X, Point x, int t, CampanatoParams params,
                              const NecessityConfig& config);

} // namespace caplab::witness
