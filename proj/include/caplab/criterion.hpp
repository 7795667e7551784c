#pragma once

#include <optional>
#include <string>
#include <vector>

#include "caplab/campanato.hpp"
#include "caplab/geometry.hpp"
#include "caplab/hausdorff.hpp"

namespace caplab::criterion {

using campanato::CampanatoParams;
using geometry::Point;
using geometry::Region;

// Dyadic-shell family with one deleted disk per shell. Disk n sits in the
// annulus 2^-(n+1) <= |z| <= 2^-n, centered at the midpoint radius by
// default, and must stay inside the open shell: r_n <= 2^-(n+2), tangency
// tolerated to one part in 1e12.
struct RoadrunnerSpec {
    enum class Law { Factorial, Geometric, PowerScaled, Custom };
    Law law = Law::Factorial;
    double q = 8.0;            // Geometric: r_n = q^-n
    double a = 2.0;            // PowerScaled: r_n = a^-n * n^-s
    double s = 1.0;
    std::vector<double> radii; // Custom, 1-based from n = 1
    int n_max = 12;
    double center_angle = 0.0; // radians, placement within the shell
};

// Radius of disk n under the spec's law (no feasibility check).
double roadrunner_radius(const RoadrunnerSpec& spec, int n);
// Largest admissible radius at shell n (quarter of the shell's outer radius).
double max_disk_radius(int n);
Point roadrunner_center(const RoadrunnerSpec& spec, int n);

// Shells actually built: parametric laws drop leading shells whose disk
// would not fit and record the shift; Custom radii must all fit
// (InvalidParams("disk touches annulus edge") otherwise).
struct RoadrunnerLayout {
    std::vector<int> indices; // shell numbers kept, ascending
    std::vector<double> radii;
    std::vector<Point> centers;
    int dropped = 0; // leading shells removed for parametric laws
};
RoadrunnerLayout roadrunner_layout(const RoadrunnerSpec& spec);

// Union over the layout of (shell minus disk), a compact set around the
// origin. n_max = 0 gives the empty region.
Region build_roadrunner(const RoadrunnerSpec& spec);

// Exact series terms 2^{n(t+1)} * r_n^{1+alpha} for n = 1..n_max, pure
// arithmetic. Parametric laws are evaluated as formulas whether or not the
// leading disks fit (the geometry builder is what shifts); Custom tables are
// feasibility-checked. Requires 0 < 1+alpha <= 2: the exact path admits the
// top boundary exponent, unlike the quadtree content machinery.
std::vector<double> roadrunner_terms(const RoadrunnerSpec& spec, int t, double alpha);

enum class Verdict { Converges, Diverges, Undecided };
enum class SeriesMethod { ExactDisk, QuadtreeInterval };

struct RatioResult {
    std::optional<double> limit_estimate;
    Verdict verdict = Verdict::Undecided;
};

// Estimates lim term_{n+1}/term_n from the tail. Ratios drifting along a
// power law (ratio ~ c * n^-g) are extrapolated to a fixed horizon of 1e6
// before thresholding, so factorial-type families report their limit rather
// than the last finite ratio. Requires >= 8 positive terms
// (InvalidParams otherwise).
RatioResult ratio_test(const std::vector<double>& terms);

struct NRange {
    int lo = 1;
    int hi = 20;
};

struct CriterionReport {
    CampanatoParams params;
    int t = 0;
    SeriesMethod method = SeriesMethod::QuadtreeInterval;
    Verdict verdict = Verdict::Undecided;
    std::vector<int> n_values;
    std::vector<hausdorff::IntervalEstimate> terms; // weighted series terms
    std::vector<double> partial_lower, partial_upper;
    double sum_lower = 0.0;
    double sum_upper = 0.0;
    std::optional<double> ratio_limit;
    std::string notes;
};

// Geometry path: per shell n, the weighted term interval
// 2^{n(t+1)} * content interval of (shell n around x) minus X, computed on
// the shell rescaled to unit size with `depth` extra levels. Verdicts:
// Converges when every term is identically zero; Diverges when the term
// lower bounds have a positive nondecreasing tail (scale-free rule);
// Undecided otherwise.
CriterionReport criterion_series(const Region& X, Point x, int t,
                                 const CampanatoParams& params, NRange n_range, int depth);

// Exact path for roadrunner families: zero-width terms from the radius law,
// verdict by exact tail classification (geometric ratio and power-law index),
// ratio_limit from ratio_test.
CriterionReport criterion_series(const RoadrunnerSpec& spec, int t,
                                 const CampanatoParams& params);

const char* verdict_name(Verdict v);
const char* method_name(SeriesMethod m);

} // namespace caplab::criterion
