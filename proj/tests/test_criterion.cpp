#include <doctest.h>

#include <cmath>
#include <vector>

#include "caplab/criterion.hpp"
#include "caplab/errors.hpp"
#include "caplab/geometry.hpp"

using namespace caplab;
using criterion::CriterionReport;
using criterion::NRange;
using criterion::RoadrunnerSpec;
using criterion::Verdict;
using geometry::Region;

namespace {

RoadrunnerSpec capped_custom(int n_max, double fraction) {
    RoadrunnerSpec spec;
    spec.law = RoadrunnerSpec::Law::Custom;
    spec.n_max = n_max;
    for (int n = 1; n <= n_max; ++n)
        spec.radii.push_back(fraction * std::ldexp(1.0, -(n + 2)));
    return spec;
}

} // namespace

TEST_CASE("radius laws evaluate their formulas") {
    RoadrunnerSpec spec;
    spec.law = RoadrunnerSpec::Law::Factorial;
    CHECK(criterion::roadrunner_radius(spec, 1) == doctest::Approx(1.0));
    CHECK(criterion::roadrunner_radius(spec, 4) == doctest::Approx(1.0 / 24.0));

    spec.law = RoadrunnerSpec::Law::Geometric;
    spec.q = 8.0;
    CHECK(criterion::roadrunner_radius(spec, 3) == doctest::Approx(std::pow(8.0, -3)));

    spec.law = RoadrunnerSpec::Law::PowerScaled;
    spec.a = 2.0;
    spec.s = 0.5;
    CHECK(criterion::roadrunner_radius(spec, 4) ==
          doctest::Approx(std::pow(2.0, -4) / 2.0));

    spec.law = RoadrunnerSpec::Law::Custom;
    spec.radii = {0.01, 0.002};
    CHECK(criterion::roadrunner_radius(spec, 2) == doctest::Approx(0.002));
    CHECK_THROWS_WITH_AS(criterion::roadrunner_radius(spec, 3), "radius table exhausted",
                         InvalidParams);

    CHECK(criterion::max_disk_radius(1) == doctest::Approx(0.125));
    CHECK(criterion::max_disk_radius(5) == doctest::Approx(std::ldexp(1.0, -7)));

    const geometry::Point c = criterion::roadrunner_center(spec, 2);
    CHECK(c.re == doctest::Approx(0.75 * 0.25));
    CHECK(c.im == doctest::Approx(0.0));
}

TEST_CASE("layout drops infeasible leading shells for parametric laws") {
    RoadrunnerSpec spec;
    spec.law = RoadrunnerSpec::Law::Factorial;
    spec.n_max = 10;
    const criterion::RoadrunnerLayout layout = criterion::roadrunner_layout(spec);
    // 1/5! = 1/120 still exceeds the shell-5 cap 2^-7; 1/6! fits shell 6.
    CHECK(layout.dropped == 5);
    REQUIRE(layout.indices.size() == 5);
    CHECK(layout.indices.front() == 6);
    CHECK(layout.indices.back() == 10);
}

TEST_CASE("tangent disks are kept at the feasibility boundary") {
    RoadrunnerSpec spec;
    spec.law = RoadrunnerSpec::Law::Geometric;
    spec.q = 8.0;
    spec.n_max = 6;
    // r_1 = 1/8 equals the cap 2^-3 exactly.
    const criterion::RoadrunnerLayout layout = criterion::roadrunner_layout(spec);
    CHECK(layout.dropped == 0);
    CHECK(layout.indices.size() == 6);
}

TEST_CASE("custom tables must fit their shells") {
    RoadrunnerSpec spec;
    spec.law = RoadrunnerSpec::Law::Custom;
    spec.n_max = 2;
    spec.radii = {0.125, 0.04}; // 0.04 > 2^-4 = 0.0625? no: shell 2 cap is 0.0625
    spec.radii[1] = 0.07;       // now above the cap
    CHECK_THROWS_WITH_AS(criterion::roadrunner_layout(spec), "disk touches annulus edge",
                         InvalidParams);
    CHECK_THROWS_WITH_AS(criterion::roadrunner_terms(spec, 0, 0.0),
                         "disk touches annulus edge", InvalidParams);
}

TEST_CASE("series terms are the weighted radius powers") {
    RoadrunnerSpec spec;
    spec.law = RoadrunnerSpec::Law::PowerScaled;
    spec.a = 2.0;
    spec.s = 0.5;
    spec.n_max = 30;
    // 2^{2n} * (2^-n n^-1/2)^2 = 1/n.
    const std::vector<double> terms = criterion::roadrunner_terms(spec, 1, 1.0);
    REQUIRE(terms.size() == 30);
    for (int n = 1; n <= 30; ++n)
        CHECK(terms[static_cast<std::size_t>(n) - 1] ==
              doctest::Approx(1.0 / n).epsilon(1e-12));

    spec.s = 1.0;
    // 2^n * 2^-n n^-1 = 1/n at t = 0, alpha = 0.
    const std::vector<double> flat = criterion::roadrunner_terms(spec, 0, 0.0);
    CHECK(flat[9] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("series terms validate the content dimension") {
    RoadrunnerSpec spec;
    spec.law = RoadrunnerSpec::Law::Geometric;
    spec.q = 8.0;
    spec.n_max = 8;
    CHECK_NOTHROW(criterion::roadrunner_terms(spec, 0, 1.0)); // dimension 2 boundary
    CHECK_THROWS_WITH_AS(criterion::roadrunner_terms(spec, 0, 1.2),
                         "content dimension out of range", InvalidParams);
    CHECK_THROWS_WITH_AS(criterion::roadrunner_terms(spec, 0, -1.0),
                         "content dimension out of range", InvalidParams);
    CHECK_THROWS_WITH_AS(criterion::roadrunner_terms(spec, -1, 0.5),
                         "derivation order must be nonnegative", InvalidParams);
}

TEST_CASE("ratio test classifies standard tails") {
    SUBCASE("factorial decay converges") {
        std::vector<double> terms;
        double v = 1.0;
        for (int n = 1; n <= 24; ++n) {
            v *= 4.0 / std::pow(n + 1.0, 1.5);
            terms.push_back(v);
        }
        const criterion::RatioResult r = criterion::ratio_test(terms);
        CHECK(r.verdict == Verdict::Converges);
        CHECK(*r.limit_estimate <= 0.1);
    }
    SUBCASE("geometric growth diverges") {
        std::vector<double> terms;
        for (int n = 0; n < 16; ++n) terms.push_back(std::ldexp(1.0, n));
        const criterion::RatioResult r = criterion::ratio_test(terms);
        CHECK(r.verdict == Verdict::Diverges);
        CHECK(*r.limit_estimate == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("harmonic terms stay undecided") {
        std::vector<double> terms;
        for (int n = 1; n <= 40; ++n) terms.push_back(1.0 / n);
        const criterion::RatioResult r = criterion::ratio_test(terms);
        CHECK(r.verdict == Verdict::Undecided);
    }
    SUBCASE("input validation") {
        CHECK_THROWS_WITH_AS(criterion::ratio_test({1.0, 2.0}), "need at least 8 terms",
                             InvalidParams);
        CHECK_THROWS_WITH_AS(
            criterion::ratio_test({1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0}),
            "terms must be positive", InvalidParams);
    }
}

TEST_CASE("exact path verdicts for the parametric families") {
    SUBCASE("factorial always converges") {
        RoadrunnerSpec spec;
        spec.law = RoadrunnerSpec::Law::Factorial;
        spec.n_max = 12;
        const CriterionReport rep = criterion::criterion_series(spec, 1, {2.0, 3.0});
        CHECK(rep.verdict == Verdict::Converges);
        CHECK(rep.method == criterion::SeriesMethod::ExactDisk);
        REQUIRE(rep.ratio_limit.has_value());
        CHECK(*rep.ratio_limit <= 0.1);
        CHECK(rep.sum_lower == doctest::Approx(rep.sum_upper));
        CHECK(rep.partial_upper.back() == doctest::Approx(rep.sum_upper));
    }
    SUBCASE("geometric at the exact tie diverges") {
        RoadrunnerSpec spec;
        spec.law = RoadrunnerSpec::Law::Geometric;
        spec.q = 8.0;
        spec.n_max = 10;
        // 2^{t+1} q^{-(1+alpha)} = 4 / 8^{2/3} = 1: constant unit terms.
        const CriterionReport rep = criterion::criterion_series(spec, 1, {3.0, 1.0});
        CHECK(rep.verdict == Verdict::Diverges);
        for (const auto& term : rep.terms) CHECK(term.lower == doctest::Approx(1.0));
    }
    SUBCASE("geometric with small ratio converges") {
        RoadrunnerSpec spec;
        spec.law = RoadrunnerSpec::Law::Geometric;
        spec.q = 16.0;
        spec.n_max = 10;
        CHECK(criterion::criterion_series(spec, 0, {2.0, 2.0}).verdict ==
              Verdict::Converges);
    }
    SUBCASE("geometric with large ratio diverges") {
        RoadrunnerSpec spec;
        spec.law = RoadrunnerSpec::Law::Geometric;
        spec.q = 2.0;
        spec.n_max = 10;
        CHECK(criterion::criterion_series(spec, 1, {2.0, 2.0}).verdict ==
              Verdict::Diverges);
    }
    SUBCASE("power scaled ties break on the index") {
        RoadrunnerSpec spec;
        spec.law = RoadrunnerSpec::Law::PowerScaled;
        spec.a = 2.0;
        spec.s = 0.5;
        spec.n_max = 16;
        // Unit ratio with index s(1+alpha) = 1: the harmonic boundary.
        CHECK(criterion::criterion_series(spec, 1, {2.0, 4.0}).verdict ==
              Verdict::Diverges);
        spec.s = 2.0;
        CHECK(criterion::criterion_series(spec, 1, {2.0, 4.0}).verdict ==
              Verdict::Converges);
    }
    SUBCASE("custom tables fall back to the ratio test") {
        const RoadrunnerSpec spec = capped_custom(16, 0.5);
        // Terms 2^{2n} (0.5 * 2^-(n+2))^2 = 1/64: constant, plateau at 1.
        const CriterionReport rep = criterion::criterion_series(spec, 1, {2.0, 4.0});
        CHECK(rep.verdict == Verdict::Undecided);
    }
    SUBCASE("short custom series stay undecided") {
        const RoadrunnerSpec spec = capped_custom(4, 0.5);
        CHECK(criterion::criterion_series(spec, 1, {2.0, 4.0}).verdict ==
              Verdict::Undecided);
    }
}

TEST_CASE("geometry path resolves self-similar layouts") {
    // Every scaled shell of this family is the same picture: a disk of radius
    // 0.225 at distance 0.75, so the measured content interval repeats and the
    // weighted terms scale exactly geometrically.
    const RoadrunnerSpec spec = capped_custom(12, 0.9);
    const Region X = criterion::build_roadrunner(spec);

    SUBCASE("growing terms diverge") {
        const CriterionReport rep =
            criterion::criterion_series(X, {0.0, 0.0}, 1, {2.0, 3.0}, {1, 12}, 7);
        CHECK(rep.verdict == Verdict::Diverges);
        CHECK(rep.method == criterion::SeriesMethod::QuadtreeInterval);
        CHECK(rep.sum_lower > 0.0);
        CHECK(rep.sum_lower <= rep.sum_upper);
    }
    SUBCASE("shrinking terms stay undecided") {
        const CriterionReport rep =
            criterion::criterion_series(X, {0.0, 0.0}, 0, {2.0, 3.0}, {1, 12}, 7);
        CHECK(rep.verdict == Verdict::Undecided);
    }
    SUBCASE("content dimension two is exact-path only") {
        CHECK_THROWS_WITH_AS(
            criterion::criterion_series(X, {0.0, 0.0}, 0, {2.0, 4.0}, {1, 6}, 6),
            "content dimension out of range", InvalidParams);
    }
}

TEST_CASE("full disks leave empty shells and converge") {
    const CriterionReport rep = criterion::criterion_series(
        Region::disk({{0.0, 0.0}, 1.0}), {0.0, 0.0}, 0, {2.0, 3.0}, {1, 6}, 6);
    CHECK(rep.verdict == Verdict::Converges);
    CHECK(rep.sum_upper == 0.0);
}

TEST_CASE("parameter gates on both paths") {
    RoadrunnerSpec spec;
    spec.law = RoadrunnerSpec::Law::Factorial;
    spec.n_max = 10;
    CHECK_THROWS_WITH_AS(
        criterion::criterion_series(spec, 1, {2.0, 5.0}),
        "parameters outside admissible range: need 2-p < lambda < 2+p", InvalidParams);
    // The closed boundary itself passes.
    CHECK_NOTHROW(criterion::criterion_series(spec, 1, {2.0, 4.0}));

    const Region X = Region::disk({{0.0, 0.0}, 1.0});
    CHECK_THROWS_WITH_AS(
        criterion::criterion_series(X, {0.0, 0.0}, 0, {2.0, 4.5}, {1, 4}, 5),
        "parameters outside admissible range: need 2-p < lambda < 2+p", InvalidParams);
    CHECK_THROWS_WITH_AS(
        criterion::criterion_series(X, {0.0, 0.0}, 0, {2.0, 2.0}, {0, 4}, 5),
        "shell range invalid", InvalidParams);
    CHECK_THROWS_WITH_AS(
        criterion::criterion_series(X, {0.0, 0.0}, 0, {2.0, 2.0}, {4, 2}, 5),
        "shell range invalid", InvalidParams);
    CHECK_THROWS_WITH_AS(
        criterion::criterion_series(X, {0.0, 0.0}, -1, {2.0, 2.0}, {1, 4}, 5),
        "derivation order must be nonnegative", InvalidParams);
    CHECK_THROWS_WITH_AS(
        criterion::criterion_series(X, {0.0, 0.0}, 0, {2.0, 2.0}, {1, 4}, -2),
        "depth must be nonnegative", InvalidParams);
}

TEST_CASE("verdict and method names") {
    CHECK(std::string(criterion::verdict_name(Verdict::Converges)) == "Converges");
    CHECK(std::string(criterion::verdict_name(Verdict::Diverges)) == "Diverges");
    CHECK(std::string(criterion::verdict_name(Verdict::Undecided)) == "Undecided");
    CHECK(std::string(criterion::method_name(criterion::SeriesMethod::ExactDisk)) ==
          "ExactDisk");
}
