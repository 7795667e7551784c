#include <doctest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "caplab/numerics.hpp"

using namespace caplab;
using numerics::Complex;

TEST_CASE("rng is deterministic and in range") {
    numerics::Rng a(42), b(42), c(43);
    bool all_equal = true;
    bool any_differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.uniform();
        const double y = b.uniform();
        all_equal = all_equal && x == y;
        any_differs = any_differs || x != c.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(all_equal);
    CHECK(any_differs);

    numerics::Rng d(9);
    for (int i = 0; i < 200; ++i) {
        const double v = d.uniform(-2.0, 3.0);
        CHECK(v >= -2.0);
        CHECK(v <= 3.0);
        const double w = d.log_uniform(0.01, 10.0);
        CHECK(w >= 0.01);
        CHECK(w <= 10.0);
        const int n = d.uniform_int(3, 7);
        CHECK(n >= 3);
        CHECK(n <= 7);
    }
}

TEST_CASE("disk quadrature integrates low moments") {
    const auto nodes = numerics::disk_quadrature(0.3, -0.2, 0.5, 512);
    double area = 0.0, mx = 0.0, myy = 0.0;
    for (const auto& n : nodes) {
        area += n.w;
        mx += n.w * n.x;
        myy += n.w * (n.y + 0.2) * (n.y + 0.2);
    }
    const double r = 0.5;
    CHECK(area == doctest::Approx(M_PI * r * r).epsilon(1e-6));
    CHECK(mx == doctest::Approx(0.3 * M_PI * r * r).epsilon(1e-6));
    // Central second moment of a disk: pi r^4 / 4.
    CHECK(myy == doctest::Approx(M_PI * r * r * r * r / 4.0).epsilon(1e-4));
}

TEST_CASE("box quadrature is exact for cubics") {
    const auto grid = numerics::box_quadrature(-1.0, 0.0, 2.0, 1.5, 9);
    double total = 0.0, cube = 0.0;
    for (const auto& n : grid) {
        total += n.w;
        cube += n.w * n.x * n.x * n.x * n.y;
    }
    CHECK(total == doctest::Approx(3.0 * 1.5).epsilon(1e-12));
    // int x^3 over [-1,2] = 15/4; int y over [0,1.5] = 9/8.
    CHECK(cube == doctest::Approx(15.0 / 4.0 * 9.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("contour derivative reproduces polynomial and rational derivatives") {
    const auto poly = [](Complex z) { return z * z * z + 2.0 * z; };
    const Complex d2 = numerics::contour_derivative(poly, Complex(0.5, -0.25), 2, 0.3, 64);
    CHECK(std::abs(d2 - 6.0 * Complex(0.5, -0.25)) < 1e-10);

    const Complex pole(2.0, 1.0);
    const auto rat = [pole](Complex z) { return 1.0 / (z - pole); };
    // First derivative of 1/(z-a) is -1/(z-a)^2.
    const Complex d1 = numerics::contour_derivative(rat, Complex(0.0, 0.0), 1, 0.5, 128);
    const Complex expect = -1.0 / (pole * pole);
    CHECK(std::abs(d1 - expect) < 1e-10);
}

TEST_CASE("minimizer finds a quadratic optimum") {
    const auto obj = [](Complex z) {
        const Complex d = z - Complex(0.7, -0.3);
        return std::norm(d) + 1.25;
    };
    const Complex best = numerics::minimize_2d(obj, Complex(0.0, 0.0), 0.5, 1e-12, 400);
    CHECK(std::abs(best - Complex(0.7, -0.3)) < 1e-5);
}

TEST_CASE("slope fit is exact on linear data") {
    std::vector<double> xs, ys;
    for (int i = 1; i <= 12; ++i) {
        xs.push_back(i);
        ys.push_back(3.5 - 0.75 * i);
    }
    CHECK(numerics::fit_slope(xs, ys) == doctest::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("parallel reduction order is fixed") {
    std::vector<double> values(10000);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = std::sin(0.001 * static_cast<double>(i));

    const auto run = [&]() {
        std::vector<double> out(values.size());
        numerics::parallel_for(values.size(), [&](std::size_t i) {
            out[i] = std::cos(values[i]) * values[i];
        });
        double acc = 0.0;
        for (double v : out) acc += v;
        return acc;
    };

    numerics::set_thread_count(1);
    const double serial = run();
    numerics::set_thread_count(4);
    const double wide = run();
    numerics::set_thread_count(0);
    CHECK(serial == wide);
}

TEST_CASE("double formatting is stable") {
    CHECK(numerics::format_double(0.5) == "0.5");
    CHECK(numerics::format_double(-3.0) == "-3");
    CHECK(numerics::format_double(1.0 / 3.0) == numerics::format_double(1.0 / 3.0));
}
