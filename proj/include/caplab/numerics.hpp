#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace caplab::numerics {

using Complex = std::complex<double>;

// Deterministic RNG producing identical streams on every platform; wraps a
// 64-bit SplitMix-style generator instead of distribution objects on purpose.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    // Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi);
    // Log-uniform on [lo, hi], lo > 0.
    double log_uniform(double lo, double hi);
    int uniform_int(int lo, int hi); // inclusive bounds

private:
    std::uint64_t state_;
};

// Fixed-size worker pool dispatch: invokes fn(i) for i in [0, n). Results must
// be written to preallocated slots; iteration order inside a worker is
// ascending, so reductions stay deterministic as long as slots are combined
// sequentially afterwards.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Process-wide worker cap used by parallel_for. 0 restores the default
// (hardware concurrency, or the CAPLAB_THREADS environment variable).
void set_thread_count(int threads);
int thread_count();

struct PolarNode {
    double x, y, w;
};

// Midpoint product rule in (r, theta) over a disk; sum of weights equals the
// disk area up to rounding. node_budget is a total-node target.
std::vector<PolarNode> disk_quadrature(double cx, double cy, double radius, int node_budget);

// Composite Simpson tensor grid over an axis-aligned box. nodes_per_axis is
// rounded up to the next odd count >= 3.
struct GridNode {
    double x, y, w;
};
std::vector<GridNode> box_quadrature(double xlo, double ylo, double xhi, double yhi,
                                     int nodes_per_axis);

// Trapezoidal contour integral of fn over the circle |z - center| = radius,
// positively oriented: integral of fn(z) dz. Spectrally accurate for fn
// analytic near the circle.
Complex contour_integral(const std::function<Complex(Complex)>& fn, Complex center,
                         double radius, int nodes = 512);

// t-th derivative of an analytic function at z0 via the Cauchy integral on a
// circle of the given radius.
Complex contour_derivative(const std::function<Complex(Complex)>& fn, Complex z0, int t,
                           double radius, int nodes = 512);

// Nelder-Mead on the plane. Returns the best point found; tolerance is on the
// simplex objective spread.
Complex minimize_2d(const std::function<double(Complex)>& objective, Complex start,
                    double initial_step, double tol, int max_iter = 400);

// Shortest-format float used by every report writer ("%.12g").
std::string format_double(double v);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace caplab::numerics
