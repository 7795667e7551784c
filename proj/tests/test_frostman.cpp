#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>

#include "caplab/errors.hpp"
#include "caplab/frostman.hpp"
#include "caplab/hausdorff.hpp"
#include "caplab/numerics.hpp"

using namespace caplab;
using geometry::Point;
using geometry::Region;
using hausdorff::MeasureFunction;

namespace {

// Every dyadic ancestor cell of every atom, with the mass it holds.
void check_cell_caps(const frostman::DiscreteMeasure& nu, const MeasureFunction& h,
                     int depth) {
    for (int level = 0; level <= depth; ++level) {
        const double side = nu.root.side * std::ldexp(1.0, -level);
        std::map<std::pair<std::int64_t, std::int64_t>, double> cells;
        for (const frostman::Atom& a : nu.atoms) {
            const auto ix = static_cast<std::int64_t>(
                std::floor((a.position.re - nu.root.corner.re) / side));
            const auto iy = static_cast<std::int64_t>(
                std::floor((a.position.im - nu.root.corner.im) / side));
            cells[{ix, iy}] += a.weight;
        }
        const double cap = h(side) * (1.0 + 1e-9);
        for (const auto& [key, mass] : cells) CHECK(mass <= cap);
    }
}

} // namespace

TEST_CASE("empty support is rejected") {
    CHECK_THROWS_WITH_AS(
        frostman::build_frostman(Region::empty(), hausdorff::power_kernel(1.0), 5),
        "empty support", InvalidParams);
}

TEST_CASE("ball mass agrees with brute force") {
    const frostman::DiscreteMeasure nu =
        frostman::build_frostman(Region::disk({{0.1, -0.2}, 0.3}),
                                 hausdorff::power_kernel(1.0), 6);
    numerics::Rng rng(99);
    for (int i = 0; i < 50; ++i) {
        const Point c{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        const double r = rng.uniform(0.01, 0.8);
        double direct = 0.0;
        for (const frostman::Atom& a : nu.atoms) {
            const double dx = a.position.re - c.re;
            const double dy = a.position.im - c.im;
            if (dx * dx + dy * dy <= r * r) direct += a.weight;
        }
        CHECK(nu.ball_mass(c, r) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("unit square build respects every cell cap") {
    const MeasureFunction h = hausdorff::power_kernel(1.0);
    const Region sq = Region::square({{-0.5, -0.5}, 1.0});
    const frostman::DiscreteMeasure nu = frostman::build_frostman(sq, h, 6);
    CHECK(nu.total_mass() > 0.0);
    check_cell_caps(nu, h, 6);

    // Mass must certify a decent share of the square's t^1 content (side 1).
    const frostman::FrostmanReport rep = frostman::verify_frostman(nu, h, 2000, 0xfeedu);
    CHECK(rep.constant_C <= 8.0);
    CHECK(rep.total_mass == doctest::Approx(nu.total_mass()));
    CHECK(nu.total_mass() >= hausdorff::content_lower(sq, h, 6) * (1.0 - 1e-9));
}

TEST_CASE("three disk union build verifies") {
    numerics::Rng rng(2024);
    std::vector<Region> parts;
    for (int i = 0; i < 3; ++i)
        parts.push_back(Region::disk(
            {{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)}, rng.uniform(0.1, 0.3)}));
    const Region K = Region::join(parts);
    const MeasureFunction h = hausdorff::power_kernel(1.0);
    const frostman::DiscreteMeasure nu = frostman::build_frostman(K, h, 6);
    check_cell_caps(nu, h, 6);
    const frostman::FrostmanReport rep = frostman::verify_frostman(nu, h, 2000, 0xbeefu);
    CHECK(rep.constant_C <= 8.0);
    CHECK(rep.samples == 2000);
    CHECK(rep.worst_ball.radius > 0.0);
}

TEST_CASE("growth constant probe dominates the random probe") {
    const frostman::DiscreteMeasure nu =
        frostman::build_frostman(Region::disk({{0.0, 0.0}, 0.25}),
                                 hausdorff::power_kernel(0.75), 6);
    const MeasureFunction h = hausdorff::power_kernel(0.75);
    const frostman::FrostmanReport random = frostman::verify_frostman(nu, h, 500, 7u);
    const frostman::FrostmanReport probe = frostman::growth_constant(nu, h, 500, 7u);
    CHECK(probe.constant_C >= random.constant_C - 1e-12);
}
