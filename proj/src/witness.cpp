#include "caplab/witness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>

#include "caplab/errors.hpp"
#include "caplab/hausdorff.hpp"

namespace caplab::witness {

namespace {

constexpr int kMoments = 26;

double factorial(int t) {
    double f = 1.0;
    for (int i = 2; i <= t; ++i) f *= i;
    return f;
}

Complex ldexp_c(Complex z, int e) {
    return {std::ldexp(z.real(), e), std::ldexp(z.imag(), e)};
}

Complex unit_twist(Complex zeta, int power) {
    const double a = std::abs(zeta);
    if (a == 0.0) throw InvalidParams("atom at origin");
    const Complex u = zeta / a;
    Complex out = 1.0;
    for (int i = 0; i < power; ++i) out *= u;
    return out;
}

// One shell's atoms with the series data for evaluation away from the shell.
struct ShellPart {
    int n = -1;
    int t = 0;
    bool twist = true;
    bool expandable = false;
    std::vector<Complex> pos;
    std::vector<double> weight; // twist-free weights including the part scale
    std::vector<Complex> twisted; // twist(zeta) * weight
    std::array<Complex, kMoments> far{};   // sum twisted * (zeta * 2^n)^k
    std::array<Complex, kMoments> inner{}; // sum twisted * (2^-n / zeta)^(k+1)
    double derivative = 0.0; // sum weight / |zeta|^(t+1), exactly scaled
};

Complex direct_sum(const ShellPart& part, Complex z) {
    Complex acc = 0.0;
    for (std::size_t a = 0; a < part.pos.size(); ++a) {
        const Complex d = part.pos[a] - z;
        if (d.real() == 0.0 && d.imag() == 0.0)
            throw NumericError("evaluation at pole");
        acc += part.twisted[a] / d;
    }
    return acc;
}

ShellPart make_part(const WitnessFunction& w) {
    ShellPart part;
    part.n = w.annulus_index;
    part.t = w.t;
    part.twist = w.twist;
    const int power = w.twist ? w.t + 1 : 0;
    part.pos.reserve(w.measure.atoms.size());
    part.weight.reserve(w.measure.atoms.size());
    part.twisted.reserve(w.measure.atoms.size());
    for (const auto& atom : w.measure.atoms) {
        const Complex zeta(atom.position.re, atom.position.im);
        part.pos.push_back(zeta);
        part.weight.push_back(atom.weight * w.scale);
        part.twisted.push_back(power == 0 ? Complex(atom.weight * w.scale)
                                          : unit_twist(zeta, power) * (atom.weight * w.scale));
    }

    // Series expansions are valid when every atom sits in the nominal shell
    // band; anything else falls back to direct summation.
    part.expandable = part.n >= 0;
    if (part.expandable) {
        for (const Complex& zeta : part.pos) {
            const double scaled = std::abs(zeta) * std::ldexp(1.0, part.n);
            if (!(scaled >= 0.4 && scaled <= 1.1)) {
                part.expandable = false;
                break;
            }
        }
    }
    if (part.expandable) {
        for (std::size_t a = 0; a < part.pos.size(); ++a) {
            const Complex zs(std::ldexp(part.pos[a].real(), part.n),
                             std::ldexp(part.pos[a].imag(), part.n));
            Complex pw = 1.0;
            for (int k = 0; k < kMoments; ++k) {
                part.far[k] += part.twisted[a] * pw;
                pw *= zs;
            }
            const Complex ws = 1.0 / zs;
            Complex qw = ws;
            for (int k = 0; k < kMoments; ++k) {
                part.inner[k] += part.twisted[a] * qw;
                qw *= ws;
            }
        }
    }

    // Exact derivative accumulator in shell-scaled form: dividing by the
    // scaled radius in [1/2, 1] keeps the partial sum representable, and the
    // final ldexp restores the true scale.
    if (part.n >= 0) {
        double s = 0.0;
        for (std::size_t a = 0; a < part.pos.size(); ++a) {
            const double scaled = std::abs(part.pos[a]) * std::ldexp(1.0, part.n);
            s += part.weight[a] / std::pow(scaled, part.t + 1);
        }
        part.derivative = std::ldexp(s, part.n * (part.t + 1));
    } else {
        double s = 0.0;
        for (std::size_t a = 0; a < part.pos.size(); ++a) {
            const double r = std::abs(part.pos[a]);
            if (r == 0.0) throw InvalidParams("atom at origin");
            int e;
            const double m = std::frexp(r, &e);
            s += std::ldexp(part.weight[a] * std::pow(m, -(part.t + 1)), -e * (part.t + 1));
        }
        part.derivative = s;
    }
    return part;
}

// Evaluator for a sum of shell kernels. Shells far below the evaluation
// radius are collapsed into one polynomial in 1/z, shells far above into one
// polynomial in z, and only the handful of shells at the evaluation scale
// are summed atom by atom.
class ShellField {
public:
    explicit ShellField(const std::vector<WitnessFunction>& parts) {
        for (const WitnessFunction& w : parts) {
            if (w.measure.atoms.empty()) continue;
            ShellPart part = make_part(w);
            if (part.expandable)
                shells_.push_back(std::move(part));
            else
                direct_.push_back(std::move(part));
        }
        std::sort(shells_.begin(), shells_.end(),
                  [](const ShellPart& a, const ShellPart& b) { return a.n < b.n; });

        far_suffix_.assign(shells_.size() + 1, {});
        for (std::size_t j = shells_.size(); j-- > 0;) {
            const double sn = std::ldexp(1.0, -shells_[j].n);
            double pw = 1.0;
            for (int k = 0; k < kMoments; ++k) {
                far_suffix_[j][k] = far_suffix_[j + 1][k] + shells_[j].far[k] * pw;
                pw *= sn;
            }
        }
        inner_prefix_.assign(shells_.size(), {});
        for (std::size_t j = 0; j < shells_.size(); ++j) {
            if (j == 0) {
                inner_prefix_[0] = shells_[0].inner;
                continue;
            }
            const int delta = shells_[j].n - shells_[j - 1].n;
            for (int k = 0; k < kMoments; ++k)
                inner_prefix_[j][k] = shells_[j].inner[k] +
                                      ldexp_c(inner_prefix_[j - 1][k], -delta * (k + 1));
        }
    }

    Complex eval(Complex z) const {
        Complex acc = 0.0;
        for (const ShellPart& part : direct_) acc += direct_sum(part, z);
        if (shells_.empty()) return acc;

        const double az = std::abs(z);
        // Shells with outer radius <= az/4 admit the 1/z series; shells with
        // outer radius >= 8 az admit the z series; the window in between is
        // summed directly.
        const auto far_begin = std::partition_point(
            shells_.begin(), shells_.end(),
            [az](const ShellPart& p) { return std::ldexp(4.0, -p.n) > az; });
        const auto inner_end = std::partition_point(
            shells_.begin(), shells_.end(),
            [az](const ShellPart& p) { return std::ldexp(1.0, -p.n) >= 8.0 * az; });

        for (auto it = inner_end; it != far_begin; ++it) acc += direct_sum(*it, z);

        const std::size_t jf = static_cast<std::size_t>(far_begin - shells_.begin());
        if (jf < shells_.size()) {
            const Complex u = 1.0 / z;
            const auto& coeff = far_suffix_[jf];
            Complex poly = coeff[kMoments - 1];
            for (int k = kMoments - 2; k >= 0; --k) poly = poly * u + coeff[k];
            acc -= u * poly;
        }
        if (inner_end != shells_.begin()) {
            const std::size_t ji = static_cast<std::size_t>(inner_end - shells_.begin()) - 1;
            const int n = shells_[ji].n;
            const Complex v(std::ldexp(z.real(), n), std::ldexp(z.imag(), n));
            const auto& coeff = inner_prefix_[ji];
            Complex poly = coeff[kMoments - 1];
            for (int k = kMoments - 2; k >= 0; --k) poly = poly * v + coeff[k];
            acc += Complex(std::ldexp(poly.real(), n), std::ldexp(poly.imag(), n));
        }
        return acc;
    }

    double derivative_at_origin() const {
        double acc = 0.0;
        for (const ShellPart& part : direct_) acc += factorial(part.t) * part.derivative;
        for (const ShellPart& part : shells_) acc += factorial(part.t) * part.derivative;
        return acc;
    }

private:
    std::vector<ShellPart> shells_; // ascending shell index
    std::vector<ShellPart> direct_;
    std::vector<std::array<Complex, kMoments>> far_suffix_;
    std::vector<std::array<Complex, kMoments>> inner_prefix_;
};

} // namespace

Complex witness_eval(const WitnessFunction& w, Point z) {
    const Complex zz(z.re, z.im);
    const int power = w.twist ? w.t + 1 : 0;
    Complex acc = 0.0;
    for (const auto& atom : w.measure.atoms) {
        const Complex zeta(atom.position.re, atom.position.im);
        const Complex d = zeta - zz;
        if (d.real() == 0.0 && d.imag() == 0.0)
            throw NumericError("evaluation at pole");
        const Complex num =
            power == 0 ? Complex(atom.weight) : unit_twist(zeta, power) * atom.weight;
        acc += num / d;
    }
    return w.scale * acc;
}

double witness_derivative(const WitnessFunction& w, int t) {
    if (!w.twist || t != w.t)
        throw InvalidParams("derivative requires the twisted kernel of matching order");
    double acc = 0.0;
    for (const auto& atom : w.measure.atoms) {
        const double r = std::hypot(atom.position.re, atom.position.im);
        if (r == 0.0) throw InvalidParams("atom at origin");
        int e;
        const double m = std::frexp(r, &e);
        acc += std::ldexp(atom.weight * std::pow(m, -(t + 1)), -e * (t + 1));
    }
    return w.scale * factorial(t) * acc;
}

WitnessFunction normalized_far_field(WitnessFunction w) {
    const double mass = w.measure.total_mass();
    if (!(mass > 0.0)) throw InvalidParams("empty support");
    w.scale = -1.0 / mass;
    return w;
}

campanato::FunctionHandle to_function(std::vector<WitnessFunction> parts, std::string name) {
    auto field = std::make_shared<ShellField>(parts);
    campanato::FunctionHandle f;
    f.evaluator = [field](Complex z) { return field->eval(z); };
    f.name = std::move(name);
    return f;
}

EpsilonSequence epsilon_sequence(const std::vector<double>& terms) {
    bool any_positive = false;
    for (double t : terms) {
        if (!std::isfinite(t) || t < 0.0)
            throw InvalidParams("terms must be finite and nonnegative");
        if (t > 0.0) any_positive = true;
    }
    if (!any_positive) throw InvalidParams("degenerate series");
    EpsilonSequence out;
    out.values.reserve(terms.size());
    double running_sum = 0.0;
    double eps = 1.0;
    for (double t : terms) {
        running_sum += t;
        if (t > 0.0) eps = std::min(eps, 1.0 / t);
        if (running_sum > 0.0) eps = std::min(eps, 1.0 / running_sum);
        out.values.push_back(eps);
    }
    return out;
}

int block_select(const std::vector<double>& weighted_terms, int m) {
    if (m < 1) throw InvalidParams("block start must be at least 1");
    for (double t : weighted_terms)
        if (!(t <= 1.0 + 1e-9) || t < 0.0)
            throw InvalidParams("weighted terms must lie in [0, 1]");
    double sum = 0.0;
    for (std::size_t i = static_cast<std::size_t>(m) - 1; i < weighted_terms.size(); ++i) {
        sum += weighted_terms[i];
        if (sum >= 1.0) return static_cast<int>(i) + 1;
    }
    throw InvalidParams("tail exhausted");
}

namespace {

struct ShellBuild {
    int n = 0;
    double content = 0.0; // content estimate of the shell remainder
    double term = 0.0;    // 2^{n(t+1)} * content
    Region scaled_region = Region::empty();
    dyadic::CoverTree tree;
    frostman::DiscreteMeasure scaled_nu; // unit-scale measure, growth <= s^(1+a)
    double growth_c = 1.0;
    bool empty = true;
};

// Builds the shell remainder at unit scale and measures it with the plain
// power kernel; the epsilon weighting and the 2^-n(1+alpha) scale factor are
// applied when the true-scale atoms are emitted.
ShellBuild build_shell(const Region& shell_region, int n, double alpha, int extra_depth,
                       unsigned seed) {
    ShellBuild out;
    out.n = n;
    out.scaled_region = shell_region.scale(std::ldexp(1.0, n));
    const geometry::SquareBox root = geometry::default_root();
    const hausdorff::MeasureFunction kernel{1.0 + alpha, 0.0, 1.0};

    const geometry::BBox bb = out.scaled_region.bounding_box();
    const double feature = std::max(1e-3, std::min(bb.width(), bb.height()));
    int depth = extra_depth + 1;
    while (std::ldexp(2.0, -depth) > 0.5 * feature && depth < extra_depth + 12) ++depth;

    out.tree = dyadic::CoverTree::build(out.scaled_region, root, depth);
    if (out.tree.empty()) return out;
    out.scaled_nu = frostman::build_frostman_on(out.tree, out.scaled_region, kernel, depth);
    if (!(out.scaled_nu.total_mass() > 0.0)) return out;
    out.empty = false;
    const frostman::FrostmanReport rep =
        frostman::growth_constant(out.scaled_nu, kernel, 256, seed);
    out.growth_c = std::max(rep.constant_C, 1.0);
    out.content = std::ldexp(out.scaled_nu.total_mass() / out.growth_c, -n * 1) *
                  std::pow(2.0, -n * alpha);
    return out;
}

// True-scale shell measure with growth eps * r^(1+alpha): scaled-unit atoms
// mapped down by 2^-n with weights eps * 2^-n(1+alpha) / C.
WitnessFunction emit_measure(const ShellBuild& shell, double eps, double alpha, int t) {
    WitnessFunction w;
    w.t = t;
    w.twist = true;
    w.annulus_index = shell.n;
    const double factor =
        eps * std::ldexp(1.0, -shell.n) * std::pow(2.0, -shell.n * alpha) / shell.growth_c;
    w.measure.atoms.reserve(shell.scaled_nu.atoms.size());
    for (const auto& atom : shell.scaled_nu.atoms) {
        frostman::Atom mapped;
        mapped.position = {std::ldexp(atom.position.re, -shell.n),
                           std::ldexp(atom.position.im, -shell.n)};
        mapped.weight = atom.weight * factor;
        w.measure.atoms.push_back(mapped);
    }
    w.measure.resolution = std::ldexp(shell.scaled_nu.resolution, -shell.n);
    w.measure.root = geometry::default_root();
    return w;
}

struct LemmaSamples {
    double osc_ratio = 0.0;
    double mean_ratio = 0.0;
};

// Far-ball oscillation ratios for one shell function: balls B in annuli A_k
// with |k - n| >= 2, measuring (r^-lambda int_B |f|^p)^(1/p) and the same
// with the ball mean of |f|, both against eps * 2^{n(1+alpha)} * content.
LemmaSamples measure_far_balls(const ShellField& field, int n, double rhs,
                               const CampanatoParams& params, const NecessityConfig& config) {
    LemmaSamples out;
    if (!(rhs > 0.0)) return out;
    std::vector<int> ks;
    for (int k = n - config.lemma_k_span; k <= n + config.lemma_k_span; ++k) {
        if (k < 0 || std::abs(k - n) < 2) continue;
        ks.push_back(k);
    }
    if (ks.empty()) return out;
    numerics::Rng rng(config.seed ^ (0x9e37u * static_cast<unsigned>(n) + 17u));
    const int balls = std::max(8, config.lemma_balls);
    for (int b = 0; b < balls; ++b) {
        const int k = ks[static_cast<std::size_t>(b) % ks.size()];
        const double outer = std::ldexp(1.0, -k);
        const double inner = 0.5 * outer;
        const double r = rng.log_uniform(outer / 16.0, outer / 4.0);
        const double rho = rng.uniform(inner + r, outer - r);
        const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const Complex center = std::polar(rho, theta);
        const auto quad =
            numerics::disk_quadrature(center.real(), center.imag(), r, config.lemma_nodes);
        double pint = 0.0, aint = 0.0, wsum = 0.0;
        for (const auto& node : quad) {
            const double a = std::abs(field.eval(Complex(node.x, node.y)));
            pint += node.w * std::pow(a, params.p);
            aint += node.w * a;
            wsum += node.w;
        }
        const double osc = std::pow(std::pow(r, -params.lambda) * pint, 1.0 / params.p);
        const double mean = aint / wsum;
        const double mosc =
            std::pow(std::pow(r, -params.lambda) * std::pow(mean, params.p) * wsum,
                     1.0 / params.p);
        out.osc_ratio = std::max(out.osc_ratio, osc / rhs);
        out.mean_ratio = std::max(out.mean_ratio, mosc / rhs);
    }
    return out;
}

} // namespace

WitnessReport necessity_suite(const Region& X, Point x, int t, CampanatoParams params,
                              const NecessityConfig& config) {
    if (t < 0) throw InvalidParams("derivation order must be nonnegative");
    if (!params.in_closed_window())
        throw InvalidParams("parameters outside admissible range: need 2-p < lambda < 2+p");
    WitnessReport report;
    if (params.p >= 2.0) params = campanato::transfer_params(params, campanato::TransferDirection::ReduceBelow2);
    report.params_used = params;
    report.t = t;
    const double alpha = config.alpha_override.value_or(params.alpha());
    if (!(alpha > -1.0) || !(alpha <= 1.0))
        throw InvalidParams("content dimension out of range");
    report.alpha = alpha;
    report.status = "ok";

    const Region X0 = X.translate(-x.re, -x.im);
    const auto shell_region = [&](int n) -> Region {
        if (config.shell_region) return config.shell_region(n);
        return Region::difference(
            Region::annulus(geometry::annulus_shell(Point{0.0, 0.0}, n)), X0);
    };

    // Shell terms, extended on demand: exact analytic values when supplied,
    // measured contents otherwise.
    std::vector<double> terms;
    std::vector<ShellBuild> builds; // builds[i] is shell n = i + 1
    const auto ensure_shells = [&](int upto) {
        upto = std::min(upto, config.shell_limit);
        while (static_cast<int>(builds.size()) < upto) {
            const int n = static_cast<int>(builds.size()) + 1;
            builds.push_back(build_shell(shell_region(n), n, alpha, config.extra_depth,
                                         config.seed + static_cast<unsigned>(n)));
            double term;
            if (!config.exact_terms.empty()) {
                term = n <= static_cast<int>(config.exact_terms.size())
                           ? config.exact_terms[static_cast<std::size_t>(n) - 1]
                           : 0.0;
                builds.back().content = std::ldexp(term, -n * (t + 1));
            } else {
                term = std::ldexp(builds.back().content, n * (t + 1));
            }
            builds.back().term = term;
            terms.push_back(term);
        }
    };

    const auto converges_out = [&](const char* note) {
        (void)note;
        report.status = "series converges; no witness";
        return report;
    };

    ensure_shells(std::max(config.m_hi + 4, 16));
    bool any = false;
    for (double v : terms) any = any || v > 0.0;
    if (!any) return converges_out("all terms zero");

    // Block windows against the epsilon-weighted terms, growing the shell
    // range until each block lands or the limit is reached.
    std::vector<int> block_end(static_cast<std::size_t>(config.m_hi) + 1, 0);
    std::vector<double> weighted;
    for (int m = config.m_lo; m <= config.m_hi; ++m) {
        for (;;) {
            const EpsilonSequence eps = epsilon_sequence(terms);
            weighted.resize(terms.size());
            for (std::size_t i = 0; i < terms.size(); ++i)
                weighted[i] = std::min(1.0, eps.values[i] * terms[i]);
            try {
                block_end[static_cast<std::size_t>(m)] = block_select(weighted, m);
                break;
            } catch (const InvalidParams&) {
                if (static_cast<int>(builds.size()) >= config.shell_limit)
                    return converges_out("tail below window");
                ensure_shells(static_cast<int>(builds.size()) + 32);
            }
        }
    }
    const EpsilonSequence eps = epsilon_sequence(terms);

    // Emit the true-scale shell measures once, shared across blocks.
    const int top_shell = *std::max_element(block_end.begin(), block_end.end());
    std::vector<WitnessFunction> funcs(static_cast<std::size_t>(top_shell) + 1);
    for (int n = config.m_lo; n <= top_shell; ++n) {
        const ShellBuild& sb = builds[static_cast<std::size_t>(n) - 1];
        if (sb.empty) continue;
        funcs[static_cast<std::size_t>(n)] =
            emit_measure(sb, eps.values[static_cast<std::size_t>(n) - 1], alpha, t);
    }

    for (int m = config.m_lo; m <= config.m_hi; ++m) {
        const int M = block_end[static_cast<std::size_t>(m)];
        BlockRecord rec;
        rec.m = m;
        rec.M = M;
        std::vector<WitnessFunction> parts;
        for (int n = m; n <= M; ++n) {
            rec.block_weight += weighted[static_cast<std::size_t>(n) - 1];
            if (!funcs[static_cast<std::size_t>(n)].measure.atoms.empty())
                parts.push_back(funcs[static_cast<std::size_t>(n)]);
        }
        ShellField field(parts);
        rec.derivative_at_x = field.derivative_at_origin();
        campanato::FunctionHandle handle;
        handle.evaluator = [&field](Complex z) { return field.eval(z); };
        handle.name = "block";
        rec.seminorm_part =
            campanato::seminorm_estimate(handle, params, config.norm_sampling).value;
        rec.lp_part = campanato::lp_norm(handle, X0, params.p, config.lp_depth);
        rec.norm_estimate = rec.seminorm_part + rec.lp_part;
        report.blocks.push_back(rec);
    }

    report.derivative_floor = std::numeric_limits<double>::infinity();
    for (const BlockRecord& rec : report.blocks)
        report.derivative_floor = std::min(report.derivative_floor, rec.derivative_at_x);
    if (report.blocks.empty()) report.derivative_floor = 0.0;

    // Per-shell records and the oscillation-bound constants.
    for (int n = 1; n <= top_shell; ++n) {
        const std::size_t i = static_cast<std::size_t>(n) - 1;
        ShellConstants sc;
        sc.n = n;
        sc.epsilon = eps.values[i];
        sc.content = builds[i].content;
        sc.weighted_term = n <= static_cast<int>(weighted.size()) ? weighted[i] : 0.0;
        if (n < config.m_lo || builds[i].empty) {
            report.shells.push_back(sc);
            continue;
        }
        const WitnessFunction& fn = funcs[static_cast<std::size_t>(n)];
        sc.mass = fn.measure.total_mass();
        if (n >= config.lemma_n_lo && n <= config.lemma_n_hi && !fn.measure.atoms.empty()) {
            ShellField single({fn});
            const double rhs = sc.epsilon * std::pow(2.0, n * (1.0 + alpha)) * sc.content;
            const LemmaSamples ls = measure_far_balls(single, n, rhs, params, config);
            sc.osc_ratio = ls.osc_ratio;
            sc.mean_ratio = ls.mean_ratio;
            campanato::FunctionHandle handle;
            handle.evaluator = [&single](Complex z) { return single.eval(z); };
            const double lp = campanato::lp_norm(handle, X0, params.p, config.lp_depth);
            const double rhs4 = sc.epsilon * sc.content;
            sc.lp_ratio = rhs4 > 0.0 ? lp / rhs4 : 0.0;
        }
        report.shells.push_back(sc);
    }
    return report;
}

} // namespace caplab::witness
