#include "caplab/campanato.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "caplab/dyadic.hpp"
#include "caplab/errors.hpp"
#include "caplab/hausdorff.hpp"

namespace caplab::campanato {

CampanatoParams::CampanatoParams(double p_, double lambda_) : p(p_), lambda(lambda_) {
    if (!std::isfinite(p) || !std::isfinite(lambda) || p < 1.0 || lambda < 0.0)
        throw InvalidParams("parameters out of range: need p >= 1 and lambda >= 0");
}

double CampanatoParams::q() const {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
}

bool CampanatoParams::in_window() const {
    return lambda > 2.0 - p && lambda < 2.0 + p;
}

bool CampanatoParams::in_closed_window() const {
    return lambda >= 2.0 - p && lambda <= 2.0 + p;
}

void CampanatoParams::require_window() const {
    if (!in_window())
        throw InvalidParams("parameters outside admissible range: need 2-p < lambda < 2+p");
}

FunctionHandle fn_constant(Complex c) {
    FunctionHandle f;
    f.evaluator = [c](Complex) { return c; };
    f.name = "const";
    return f;
}

FunctionHandle fn_re() {
    FunctionHandle f;
    f.evaluator = [](Complex z) { return Complex(z.real(), 0.0); };
    f.name = "re_z";
    return f;
}

FunctionHandle fn_z() {
    FunctionHandle f;
    f.evaluator = [](Complex z) { return z; };
    f.name = "z";
    return f;
}

FunctionHandle fn_conj() {
    FunctionHandle f;
    f.evaluator = [](Complex z) { return std::conj(z); };
    f.name = "conj_z";
    return f;
}

FunctionHandle fn_poles(std::vector<PoleTerm> terms) {
    for (const PoleTerm& t : terms)
        if (t.order < 1) throw InvalidParams("pole order must be positive");
    FunctionHandle f;
    f.hint = FunctionHandle::Hint::Rational;
    for (const PoleTerm& t : terms) f.poles.push_back(t.location);
    f.name = "rational";
    f.evaluator = [terms = std::move(terms)](Complex z) {
        Complex sum = 0.0;
        for (const PoleTerm& t : terms) {
            const Complex d = z - Complex(t.location.re, t.location.im);
            Complex k = 1.0 / d;
            for (int j = 1; j < t.order; ++j) k /= d;
            sum += t.coefficient * k;
        }
        return sum;
    };
    return f;
}

FunctionHandle scaled(FunctionHandle f, Complex c) {
    FunctionHandle out = f;
    out.evaluator = [inner = std::move(f.evaluator), c](Complex z) { return c * inner(z); };
    out.name = f.name + "_scaled";
    return out;
}

FunctionHandle shifted(FunctionHandle f, Complex c) {
    FunctionHandle out = f;
    out.evaluator = [inner = std::move(f.evaluator), c](Complex z) { return inner(z) + c; };
    out.name = f.name + "_shifted";
    return out;
}

FunctionHandle named_function(const std::string& name) {
    if (name == "const_0") return fn_constant(0.0);
    if (name == "const_1") return fn_constant(1.0);
    if (name == "re_z") return fn_re();
    if (name == "z") return fn_z();
    if (name == "conj_z") return fn_conj();
    throw ConfigError("unknown function name: " + name);
}

namespace {

struct BallSamples {
    std::vector<Complex> values;
    std::vector<double> weights;
    double total_weight = 0.0;
    Complex mean = 0.0;
};

BallSamples sample_ball(const FunctionHandle& f, const Disk& B, int nodes) {
    const auto quad = numerics::disk_quadrature(B.center.re, B.center.im, B.radius, nodes);
    BallSamples s;
    s.values.reserve(quad.size());
    s.weights.reserve(quad.size());
    for (const auto& node : quad) {
        const Complex v = f.evaluator(Complex(node.x, node.y));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericError("function not integrable on ball");
        s.values.push_back(v);
        s.weights.push_back(node.w);
        s.total_weight += node.w;
    }
    // The oscillation is invariant under subtracting a constant, so center
    // the samples at the first node; a constant integrand then lands on an
    // exact zero instead of a rounding residue of the weighted mean.
    const Complex base = s.values.front();
    Complex acc = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        s.values[i] -= base;
        acc += s.weights[i] * s.values[i];
    }
    s.mean = acc / s.total_weight;
    return s;
}

double power_integral(const BallSamples& s, Complex c, double p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        acc += s.weights[i] * std::pow(std::abs(s.values[i] - c), p);
    return acc;
}

} // namespace

double oscillation(const FunctionHandle& f, const Disk& B, const CampanatoParams& params,
                   OscMode mode, int nodes) {
    if (nodes < 16) throw InvalidParams("nodes must be at least 16");
    if (!(B.radius > 0.0)) throw InvalidParams("ball radius must be positive");
    const geometry::BBox domain = f.domain.bounding_box();
    const geometry::BBox bb{B.center.re - B.radius, B.center.im - B.radius,
                            B.center.re + B.radius, B.center.im + B.radius};
    if (!domain.contains(bb, 1e-9 * std::max(1.0, B.radius)))
        throw InvalidParams("ball outside function domain");

    const BallSamples s = sample_ball(f, B, nodes);
    Complex c = s.mean;
    if (mode == OscMode::InfC && params.p != 2.0) {
        // The objective is convex in c, so a simplex search seeded at the
        // mean is reliable; the scale of the spread seeds the step.
        double spread = 0.0;
        for (const Complex& v : s.values) spread = std::max(spread, std::abs(v - c));
        if (spread > 0.0) {
            const auto objective = [&](Complex cand) {
                return power_integral(s, cand, params.p);
            };
            c = numerics::minimize_2d(objective, c, 0.25 * spread, 1e-10, 400);
        }
    }
    const double integral = power_integral(s, c, params.p);
    return std::pow(std::pow(B.radius, -params.lambda) * integral, 1.0 / params.p);
}

namespace {

struct BallList {
    std::vector<Disk> balls;
};

BallList enumerate_balls(const FunctionHandle& f, const BallSamplingSpec& sampling,
                         double radius_cap) {
    if (sampling.centers_per_axis < 1 || sampling.radius_levels < 1)
        throw InvalidParams("sampling grid must be nonempty");
    if (!(sampling.max_radius > 0.0)) throw InvalidParams("sampling radius must be positive");
    const geometry::BBox domain = f.domain.bounding_box();
    BallList out;
    const int n = sampling.centers_per_axis;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const double fx = n == 1 ? 0.5 : static_cast<double>(ix) / (n - 1);
            const double fy = n == 1 ? 0.5 : static_cast<double>(iy) / (n - 1);
            const geometry::Point center{
                sampling.center_box.xlo + fx * sampling.center_box.width(),
                sampling.center_box.ylo + fy * sampling.center_box.height()};
            for (int k = 0; k < sampling.radius_levels; ++k) {
                const double r = sampling.max_radius * std::ldexp(1.0, -k);
                if (r > radius_cap * (1.0 + 1e-12)) continue;
                const geometry::BBox bb{center.re - r, center.im - r, center.re + r,
                                        center.im + r};
                if (!domain.contains(bb, 1e-9)) continue;
                out.balls.push_back(Disk{center, r});
            }
        }
    }
    return out;
}

SeminormEstimate sup_oscillation(const FunctionHandle& f, const CampanatoParams& params,
                                 const BallSamplingSpec& sampling, double radius_cap) {
    const BallList list = enumerate_balls(f, sampling, radius_cap);
    std::vector<double> osc(list.balls.size(), 0.0);
    std::vector<std::string> errors(list.balls.size());
    numerics::parallel_for(list.balls.size(), [&](std::size_t i) {
        try {
            osc[i] = oscillation(f, list.balls[i], params, sampling.mode,
                                 sampling.nodes_per_ball);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const std::string& e : errors)
        if (!e.empty()) throw NumericError(e);
    SeminormEstimate est;
    est.mode = sampling.mode;
    est.balls_sampled = static_cast<int>(list.balls.size());
    est.quadrature_nodes = sampling.nodes_per_ball;
    for (double v : osc) est.value = std::max(est.value, v);
    return est;
}

} // namespace

SeminormEstimate seminorm_estimate(const FunctionHandle& f, const CampanatoParams& params,
                                   const BallSamplingSpec& sampling) {
    return sup_oscillation(f, params, sampling, std::numeric_limits<double>::infinity());
}

double vanishing_modulus(const FunctionHandle& f, double delta, const CampanatoParams& params,
                         const BallSamplingSpec& sampling) {
    if (!(delta > 0.0)) throw InvalidParams("delta must be positive");
    return sup_oscillation(f, params, sampling, delta).value;
}

double lp_norm(const FunctionHandle& f, const Region& X, double p, int depth,
               const geometry::SquareBox& root) {
    if (!(p >= 1.0)) throw InvalidParams("parameters out of range: need p >= 1 and lambda >= 0");
    const dyadic::CoverTree tree = hausdorff::build_cover_tree(X, root, depth);
    if (tree.empty()) return 0.0;
    const auto& nodes = tree.nodes();
    std::vector<double> contrib(nodes.size(), 0.0);
    std::vector<std::string> errors(nodes.size());
    numerics::parallel_for(nodes.size(), [&](std::size_t i) {
        const auto& node = nodes[i];
        const bool leaf = node.full || node.level == depth;
        if (!leaf) return;
        try {
            const geometry::SquareBox cell =
                geometry::DyadicSquare{node.level, node.ix, node.iy}.box(root);
            double fraction = 1.0;
            if (!node.full) {
                // Area fraction of the cell inside X from a 4x4 membership
                // stencil; keeps boundary cells from over- or under-counting.
                int inside = 0;
                for (int sy = 0; sy < 4; ++sy)
                    for (int sx = 0; sx < 4; ++sx) {
                        const geometry::Point pt{cell.corner.re + (sx + 0.5) * cell.side / 4.0,
                                                 cell.corner.im + (sy + 0.5) * cell.side / 4.0};
                        if (X.contains(pt)) ++inside;
                    }
                fraction = inside / 16.0;
            }
            if (fraction == 0.0) return;
            const Complex center(cell.corner.re + 0.5 * cell.side,
                                 cell.corner.im + 0.5 * cell.side);
            Complex v;
            try {
                v = f.evaluator(center);
            } catch (const NumericError&) {
                // Cell centers are dyadic rationals and so are the atoms of
                // kernel-sum integrands, so the midpoint can land exactly on
                // an integrable singularity. An irrational offset inside the
                // cell cannot realign with that grid; resample there once.
                v = f.evaluator(center + cell.side * Complex(0.086602540378443865,
                                                             0.070710678118654752));
            }
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NumericError("function not integrable on ball");
            contrib[i] = std::pow(std::abs(v), p) * cell.side * cell.side * fraction;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const std::string& e : errors)
        if (!e.empty()) throw NumericError(e);
    double acc = 0.0;
    for (double c : contrib) acc += c;
    return std::pow(acc, 1.0 / p);
}

double norm_estimate(const FunctionHandle& f, const Region& X, const CampanatoParams& params,
                     const BallSamplingSpec& sampling) {
    const SeminormEstimate semi = seminorm_estimate(f, params, sampling);
    return semi.value + lp_norm(f, X, params.p);
}

CampanatoParams transfer_params(const CampanatoParams& params, TransferDirection direction,
                                double target_p) {
    if (!params.in_closed_window()) throw InvalidParams("no admissible reduction");
    const double alpha = params.alpha();
    double p1, lambda1;
    if (direction == TransferDirection::ToGivenP) {
        if (!std::isfinite(target_p) || target_p < 1.0)
            throw InvalidParams("target exponent must be at least 1");
        p1 = target_p;
        lambda1 = 2.0 + p1 * alpha;
    } else {
        // Midpoint of the admissible reduction interval, which works out to
        // the same sub-2 exponent for every input.
        p1 = 1.5;
        lambda1 = 2.0 + 1.5 * alpha;
    }
    if (lambda1 < 0.0) throw InvalidParams("no admissible reduction");
    CampanatoParams out(p1, lambda1);
    if (!out.in_closed_window()) throw InvalidParams("no admissible reduction");
    return out;
}

SpaceClass classify_space(const CampanatoParams& params) {
    SpaceClass out;
    if (params.lambda == 2.0) {
        out.tag = SpaceClass::Tag::BMO;
    } else if (params.lambda > 2.0 && params.lambda <= 2.0 + params.p) {
        out.tag = SpaceClass::Tag::Lipschitz;
        out.exponent = params.alpha();
    } else if (params.lambda < 2.0) {
        out.tag = SpaceClass::Tag::MorreyNegLip;
        out.exponent = params.alpha();
    } else {
        out.tag = SpaceClass::Tag::ConstantsOnly;
    }
    return out;
}

} // namespace caplab::campanato
