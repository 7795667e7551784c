#include "caplab/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <thread>

#include "caplab/errors.hpp"

namespace caplab::numerics {

std::uint64_t Rng::next_u64() {
    // SplitMix64; fixed constants keep streams identical across platforms.
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::log_uniform(double lo, double hi) {
    if (!(lo > 0.0) || !(hi >= lo)) throw InvalidParams("log_uniform needs 0 < lo <= hi");
    return lo * std::exp(uniform() * std::log(hi / lo));
}

int Rng::uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
}

namespace {
std::atomic<int> g_threads{0};

int default_threads() {
    if (const char* env = std::getenv("CAPLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}
} // namespace

void set_thread_count(int threads) { g_threads.store(threads > 0 ? threads : 0); }

int thread_count() {
    const int v = g_threads.load();
    return v > 0 ? v : default_threads();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    auto drain = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    for (std::thread& t : pool) t.join();
}

std::vector<PolarNode> disk_quadrature(double cx, double cy, double radius, int node_budget) {
    if (!(radius > 0.0)) throw InvalidParams("disk quadrature needs positive radius");
    node_budget = std::max(node_budget, 8);
    int nr = std::max(2, static_cast<int>(std::lround(std::sqrt(node_budget / 2.0))));
    int nt = std::max(4, (node_budget + nr - 1) / nr);
    std::vector<PolarNode> nodes;
    nodes.reserve(static_cast<std::size_t>(nr) * nt);
    const double dr = radius / nr;
    const double dt = 2.0 * std::numbers::pi / nt;
    for (int i = 0; i < nr; ++i) {
        const double r = (i + 0.5) * dr;
        const double w = r * dr * dt;
        for (int j = 0; j < nt; ++j) {
            const double th = (j + 0.5) * dt;
            nodes.push_back({cx + r * std::cos(th), cy + r * std::sin(th), w});
        }
    }
    return nodes;
}

std::vector<GridNode> box_quadrature(double xlo, double ylo, double xhi, double yhi,
                                     int nodes_per_axis) {
    int n = std::max(nodes_per_axis, 3);
    if (n % 2 == 0) ++n; // composite Simpson wants an odd point count
    const double hx = (xhi - xlo) / (n - 1);
    const double hy = (yhi - ylo) / (n - 1);
    auto simpson_w = [n](int i) -> double {
        if (i == 0 || i == n - 1) return 1.0;
        return (i % 2 == 1) ? 4.0 : 2.0;
    };
    std::vector<GridNode> nodes;
    nodes.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const double wx = simpson_w(i) * hx / 3.0;
        for (int j = 0; j < n; ++j) {
            const double wy = simpson_w(j) * hy / 3.0;
            nodes.push_back({xlo + i * hx, ylo + j * hy, wx * wy});
        }
    }
    return nodes;
}

Complex contour_integral(const std::function<Complex(Complex)>& fn, Complex center,
                         double radius, int nodes) {
    nodes = std::max(nodes, 16);
    Complex acc{0.0, 0.0};
    const double dt = 2.0 * std::numbers::pi / nodes;
    for (int k = 0; k < nodes; ++k) {
        const double th = k * dt;
        const Complex e{std::cos(th), std::sin(th)};
        const Complex z = center + radius * e;
        const Complex dz = radius * Complex{0.0, 1.0} * e * dt;
        acc += fn(z) * dz;
    }
    return acc;
}

Complex contour_derivative(const std::function<Complex(Complex)>& fn, Complex z0, int t,
                           double radius, int nodes) {
    if (t < 0) throw InvalidParams("derivative order must be nonnegative");
    double fact = 1.0;
    for (int k = 2; k <= t; ++k) fact *= k;
    const Complex integral = contour_integral(
        [&](Complex z) { return fn(z) / std::pow(z - z0, t + 1); }, z0, radius, nodes);
    return fact / (2.0 * std::numbers::pi * Complex{0.0, 1.0}) * integral;
}

Complex minimize_2d(const std::function<double(Complex)>& objective, Complex start,
                    double initial_step, double tol, int max_iter) {
    struct Vertex {
        Complex p;
        double f;
    };
    auto eval = [&](Complex p) { return Vertex{p, objective(p)}; };
    std::vector<Vertex> s = {
        eval(start),
        eval(start + Complex{initial_step, 0.0}),
        eval(start + Complex{0.0, initial_step}),
    };
    auto by_f = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    for (int it = 0; it < max_iter; ++it) {
        std::sort(s.begin(), s.end(), by_f);
        if (std::abs(s[2].f - s[0].f) <= tol * (std::abs(s[0].f) + tol)) break;
        const Complex centroid = 0.5 * (s[0].p + s[1].p);
        const Vertex refl = eval(centroid + (centroid - s[2].p));
        if (refl.f < s[0].f) {
            const Vertex exp = eval(centroid + 2.0 * (centroid - s[2].p));
            s[2] = exp.f < refl.f ? exp : refl;
        } else if (refl.f < s[1].f) {
            s[2] = refl;
        } else {
            const Vertex contr = eval(centroid + 0.5 * (s[2].p - centroid));
            if (contr.f < s[2].f) {
                s[2] = contr;
            } else {
                s[1] = eval(s[0].p + 0.5 * (s[1].p - s[0].p));
                s[2] = eval(s[0].p + 0.5 * (s[2].p - s[0].p));
            }
        }
    }
    std::sort(s.begin(), s.end(), by_f);
    return s[0].p;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidParams("fit_slope needs two matched samples or more");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

} // namespace caplab::numerics
