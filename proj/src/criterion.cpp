#include "caplab/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "caplab/errors.hpp"
#include "caplab/numerics.hpp"

namespace caplab::criterion {

namespace {

constexpr double kRatioHorizon = 1e6;
constexpr double kRatioDelta = 0.05;

void require_closed_window(const CampanatoParams& params) {
    if (!params.in_closed_window())
        throw InvalidParams(
            "parameters outside admissible range: need 2-p < lambda < 2+p");
}

bool fits_shell(double r, int n) { return r <= max_disk_radius(n) * (1.0 + 1e-12); }

// Straight-line least squares of y on x; returns {intercept, slope}.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    LineFit out;
    if (det == 0.0) {
        out.intercept = sy / n;
        return out;
    }
    out.slope = (n * sxy - sx * sy) / det;
    out.intercept = (sy - out.slope * sx) / n;
    return out;
}

} // namespace

double roadrunner_radius(const RoadrunnerSpec& spec, int n) {
    if (n < 1) throw InvalidParams("shell index must be at least 1");
    switch (spec.law) {
        case RoadrunnerSpec::Law::Factorial: {
            double r = 1.0;
            for (int i = 2; i <= n; ++i) r /= i;
            return r;
        }
        case RoadrunnerSpec::Law::Geometric:
            if (!(spec.q > 1.0)) throw InvalidParams("geometric ratio must exceed 1");
            return std::pow(spec.q, -n);
        case RoadrunnerSpec::Law::PowerScaled:
            if (!(spec.a > 1.0)) throw InvalidParams("scale base must exceed 1");
            if (!(spec.s >= 0.0)) throw InvalidParams("scale exponent must be nonnegative");
            return std::pow(spec.a, -n) * std::pow(static_cast<double>(n), -spec.s);
        case RoadrunnerSpec::Law::Custom:
        default:
            if (n > static_cast<int>(spec.radii.size()))
                throw InvalidParams("radius table exhausted");
            const double r = spec.radii[static_cast<std::size_t>(n) - 1];
            if (!(r > 0.0)) throw InvalidParams("radii must be positive");
            return r;
    }
}

double max_disk_radius(int n) {
    if (n < 1) throw InvalidParams("shell index must be at least 1");
    return std::ldexp(1.0, -(n + 2));
}

Point roadrunner_center(const RoadrunnerSpec& spec, int n) {
    if (n < 1) throw InvalidParams("shell index must be at least 1");
    const double rho = 0.75 * std::ldexp(1.0, -n);
    return {rho * std::cos(spec.center_angle), rho * std::sin(spec.center_angle)};
}

RoadrunnerLayout roadrunner_layout(const RoadrunnerSpec& spec) {
    if (spec.n_max < 0) throw InvalidParams("shell count must be nonnegative");
    RoadrunnerLayout out;
    const int limit = spec.law == RoadrunnerSpec::Law::Custom
                          ? std::min(spec.n_max, static_cast<int>(spec.radii.size()))
                          : spec.n_max;
    for (int n = 1; n <= limit; ++n) {
        const double r = roadrunner_radius(spec, n);
        if (!fits_shell(r, n)) {
            if (spec.law == RoadrunnerSpec::Law::Custom)
                throw InvalidParams("disk touches annulus edge");
            ++out.dropped;
            continue;
        }
        out.indices.push_back(n);
        out.radii.push_back(r);
        out.centers.push_back(roadrunner_center(spec, n));
    }
    return out;
}

Region build_roadrunner(const RoadrunnerSpec& spec) {
    const RoadrunnerLayout layout = roadrunner_layout(spec);
    std::vector<Region> parts;
    parts.reserve(layout.indices.size());
    for (std::size_t i = 0; i < layout.indices.size(); ++i) {
        const Region shell =
            Region::annulus(geometry::annulus_shell({0.0, 0.0}, layout.indices[i]));
        const Region hole = Region::disk({layout.centers[i], layout.radii[i]});
        parts.push_back(Region::difference(shell, hole));
    }
    return Region::join(std::move(parts));
}

std::vector<double> roadrunner_terms(const RoadrunnerSpec& spec, int t, double alpha) {
    if (t < 0) throw InvalidParams("derivation order must be nonnegative");
    const double ap = 1.0 + alpha;
    if (!(ap > 0.0) || !(ap <= 2.0)) throw InvalidParams("content dimension out of range");
    if (spec.n_max < 0) throw InvalidParams("shell count must be nonnegative");
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(spec.n_max));
    for (int n = 1; n <= spec.n_max; ++n) {
        const double r = roadrunner_radius(spec, n);
        if (spec.law == RoadrunnerSpec::Law::Custom && !fits_shell(r, n))
            throw InvalidParams("disk touches annulus edge");
        terms.push_back(std::ldexp(1.0, n * (t + 1)) * std::pow(r, ap));
    }
    return terms;
}

RatioResult ratio_test(const std::vector<double>& terms) {
    if (terms.size() < 8) throw InvalidParams("need at least 8 terms");
    for (double v : terms)
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParams("terms must be positive");

    std::vector<double> ratios(terms.size() - 1);
    for (std::size_t i = 0; i + 1 < terms.size(); ++i) ratios[i] = terms[i + 1] / terms[i];

    const std::size_t window = std::max<std::size_t>(8, ratios.size() / 2);
    const std::size_t start = ratios.size() > window ? ratios.size() - window : 0;
    bool monotone = true;
    for (std::size_t i = start; i + 1 < ratios.size(); ++i)
        monotone = monotone && ratios[i + 1] <= ratios[i] * (1.0 + 1e-9);

    // Two tail models fitted on the window and selected by residual: a power
    // drift ratio ~ exp(c) * n^g extrapolated to the horizon, and a
    // 1/n-corrected plateau ratio ~ L + b/n whose limit is L.
    std::vector<double> xs_log, ys_log, xs_inv, ys;
    for (std::size_t i = start; i < ratios.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        xs_log.push_back(std::log(n));
        ys_log.push_back(std::log(ratios[i]));
        xs_inv.push_back(1.0 / n);
        ys.push_back(ratios[i]);
    }
    const LineFit power = fit_line(xs_log, ys_log);
    const LineFit plateau = fit_line(xs_inv, ys);
    double rss_power = 0.0, rss_plateau = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double predicted_power = std::exp(power.intercept + power.slope * xs_log[i]);
        const double predicted_plateau = plateau.intercept + plateau.slope * xs_inv[i];
        rss_power += (predicted_power - ys[i]) * (predicted_power - ys[i]);
        rss_plateau += (predicted_plateau - ys[i]) * (predicted_plateau - ys[i]);
    }

    double limit;
    if (rss_power <= rss_plateau) {
        limit = std::exp(power.intercept + power.slope * std::log(kRatioHorizon));
        limit = std::min(limit, 1e18);
    } else {
        limit = std::max(plateau.intercept, 0.0);
    }

    RatioResult out;
    out.limit_estimate = limit;
    if (limit < 1.0 - kRatioDelta && monotone)
        out.verdict = Verdict::Converges;
    else if (limit > 1.0 + kRatioDelta)
        out.verdict = Verdict::Diverges;
    else
        out.verdict = Verdict::Undecided;
    return out;
}

namespace {

// Exact tail classification for the parametric laws: term_{n+1}/term_n =
// 2^{t+1} * (radius ratio)^{1+alpha}, with the power-law index breaking the
// tie at ratio 1.
struct TailRule {
    bool applies = false;
    Verdict verdict = Verdict::Undecided;
    std::string note;
};

TailRule classify_exact(const RoadrunnerSpec& spec, int t, double ap) {
    TailRule rule;
    const double growth = std::ldexp(1.0, t + 1);
    switch (spec.law) {
        case RoadrunnerSpec::Law::Factorial:
            rule.applies = true;
            rule.verdict = Verdict::Converges;
            rule.note = "factorial radii: term ratio 2^{t+1}/(n+1)^{1+alpha} -> 0";
            return rule;
        case RoadrunnerSpec::Law::Geometric: {
            rule.applies = true;
            const double g = growth * std::pow(spec.q, -ap);
            if (std::abs(g - 1.0) <= 1e-12) {
                rule.verdict = Verdict::Diverges;
                rule.note = "geometric radii: constant positive terms";
            } else if (g < 1.0) {
                rule.verdict = Verdict::Converges;
                rule.note = "geometric radii: term ratio below 1";
            } else {
                rule.verdict = Verdict::Diverges;
                rule.note = "geometric radii: term ratio above 1";
            }
            return rule;
        }
        case RoadrunnerSpec::Law::PowerScaled: {
            rule.applies = true;
            const double g = growth * std::pow(spec.a, -ap);
            const double sigma = spec.s * ap;
            if (std::abs(g - 1.0) <= 1e-12) {
                if (sigma > 1.0 + 1e-12) {
                    rule.verdict = Verdict::Converges;
                    rule.note = "power-scaled radii: unit ratio, index above 1";
                } else {
                    rule.verdict = Verdict::Diverges;
                    rule.note = "power-scaled radii: unit ratio, index at most 1";
                }
            } else if (g < 1.0) {
                rule.verdict = Verdict::Converges;
                rule.note = "power-scaled radii: term ratio below 1";
            } else {
                rule.verdict = Verdict::Diverges;
                rule.note = "power-scaled radii: term ratio above 1";
            }
            return rule;
        }
        case RoadrunnerSpec::Law::Custom:
        default:
            return rule;
    }
}

void fill_partials(CriterionReport& report) {
    report.partial_lower.clear();
    report.partial_upper.clear();
    double lo = 0.0, hi = 0.0;
    for (const auto& term : report.terms) {
        lo += term.lower;
        hi += term.upper;
        report.partial_lower.push_back(lo);
        report.partial_upper.push_back(hi);
    }
    report.sum_lower = lo;
    report.sum_upper = hi;
}

void append_note(CriterionReport& report, const std::string& note) {
    if (!report.notes.empty()) report.notes += "; ";
    report.notes += note;
}

} // namespace

CriterionReport criterion_series(const Region& X, Point x, int t,
                                 const CampanatoParams& params, NRange n_range, int depth) {
    require_closed_window(params);
    if (t < 0) throw InvalidParams("derivation order must be nonnegative");
    if (n_range.lo < 1 || n_range.hi < n_range.lo)
        throw InvalidParams("shell range invalid");
    if (depth < 0) throw InvalidParams("depth must be nonnegative");

    CriterionReport report;
    report.params = params;
    report.t = t;
    report.method = SeriesMethod::QuadtreeInterval;
    if (!X.contains(x)) append_note(report, "warning: x not in X");

    const double ap = params.content_dim();
    const Region X0 = X.translate(-x.re, -x.im);
    const int count = n_range.hi - n_range.lo + 1;
    report.n_values.resize(static_cast<std::size_t>(count));
    report.terms.resize(static_cast<std::size_t>(count));
    std::vector<std::string> failures(static_cast<std::size_t>(count));

    numerics::parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
        const int n = n_range.lo + static_cast<int>(i);
        report.n_values[i] = n;
        try {
            const Region shell = Region::difference(
                Region::annulus(geometry::annulus_shell({0.0, 0.0}, n)), X0);
            const Region scaled = shell.scale(std::ldexp(1.0, n));
            hausdorff::IntervalEstimate iv =
                hausdorff::lower_content_interval(scaled, ap, depth);
            const double factor = std::pow(2.0, n * (t + 1.0) - n * ap);
            iv.lower *= factor;
            iv.upper *= factor;
            report.terms[i] = std::move(iv);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });
    for (const std::string& message : failures)
        if (!message.empty()) throw InvalidParams(message);

    fill_partials(report);

    bool all_zero = true;
    for (const auto& term : report.terms) all_zero = all_zero && term.upper == 0.0;
    if (all_zero) {
        report.verdict = Verdict::Converges;
        append_note(report, "every shell term vanishes");
    } else {
        // Scale-free divergence rule: a trailing run of positive,
        // nondecreasing lower bounds covering at least half the range.
        int run = 0;
        double prev = -1.0;
        for (const auto& term : report.terms) {
            if (term.lower > 0.0 && (run == 0 || term.lower >= prev * (1.0 - 1e-9)))
                ++run;
            else
                run = term.lower > 0.0 ? 1 : 0;
            prev = term.lower;
        }
        if (run >= std::max(3, count / 2)) {
            report.verdict = Verdict::Diverges;
            append_note(report, "positive nondecreasing lower-bound tail");
        } else {
            report.verdict = Verdict::Undecided;
            append_note(report, "interval terms do not resolve the tail");
        }
    }

    std::vector<double> mids;
    bool positive = true;
    for (const auto& term : report.terms) {
        const double mid = 0.5 * (term.lower + term.upper);
        positive = positive && mid > 0.0;
        mids.push_back(mid);
    }
    if (positive && mids.size() >= 8)
        report.ratio_limit = ratio_test(mids).limit_estimate;
    else
        append_note(report, "ratio test skipped: nonpositive or short series");
    return report;
}

CriterionReport criterion_series(const RoadrunnerSpec& spec, int t,
                                 const CampanatoParams& params) {
    require_closed_window(params);
    if (t < 0) throw InvalidParams("derivation order must be nonnegative");

    CriterionReport report;
    report.params = params;
    report.t = t;
    report.method = SeriesMethod::ExactDisk;

    const double ap = params.content_dim();
    const std::vector<double> terms = roadrunner_terms(spec, t, params.alpha());
    report.n_values.resize(terms.size());
    report.terms.resize(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        report.n_values[i] = static_cast<int>(i) + 1;
        report.terms[i] = {terms[i], terms[i], 0, "exact disk content"};
    }
    fill_partials(report);

    if (terms.empty()) {
        report.verdict = Verdict::Converges;
        append_note(report, "empty series");
        return report;
    }

    const TailRule rule = classify_exact(spec, t, ap);
    bool positive = true;
    for (double v : terms) positive = positive && v > 0.0;
    if (rule.applies) {
        report.verdict = rule.verdict;
        append_note(report, rule.note);
    } else if (positive && terms.size() >= 8) {
        const RatioResult rr = ratio_test(terms);
        report.verdict = rr.verdict;
        append_note(report, "custom radii: ratio-test verdict");
    } else {
        report.verdict = Verdict::Undecided;
        append_note(report, "custom radii: series too short to classify");
    }

    if (positive && terms.size() >= 8)
        report.ratio_limit = ratio_test(terms).limit_estimate;
    return report;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Converges: return "Converges";
        case Verdict::Diverges: return "Diverges";
        default: return "Undecided";
    }
}

const char* method_name(SeriesMethod m) {
    return m == SeriesMethod::ExactDisk ? "ExactDisk" : "QuadtreeInterval";
}

} // namespace caplab::criterion
