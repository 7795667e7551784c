#include "caplab/sufficiency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>

#include "caplab/dyadic.hpp"
#include "caplab/errors.hpp"

namespace caplab::sufficiency {

namespace {

using SquareKey = std::tuple<int, std::int64_t, std::int64_t>;

SquareKey key_of(const DyadicSquare& s) { return {s.level, s.ix, s.iy}; }

// Walks the ancestor chain of (level, ix, iy) in the cover set, returning the
// covering square's level or -1. Covers are interior-disjoint, so at most one
// ancestor (or the cell itself) is present.
int find_cover_level(const std::map<SquareKey, int>& set, int level, std::int64_t ix,
                     std::int64_t iy) {
    for (int l = level; l >= 0; --l) {
        if (set.count({l, ix >> (level - l), iy >> (level - l)})) return l;
    }
    return -1;
}

struct NeighborStep {
    std::int64_t dx, dy;
};
constexpr NeighborStep kSides[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

double factorial(int t) {
    double f = 1.0;
    for (int i = 2; i <= t; ++i) f *= i;
    return f;
}

Complex inverse_power(Complex z, int power) {
    const Complex q = 1.0 / z;
    Complex out = q;
    for (int i = 1; i < power; ++i) out *= q;
    return out;
}

double box_distance(const geometry::BBox& b, Point x) {
    const double dx = std::max({b.xlo - x.re, 0.0, x.re - b.xhi});
    const double dy = std::max({b.ylo - x.im, 0.0, x.im - b.yhi});
    return std::hypot(dx, dy);
}

} // namespace

bool DyadicCover::balanced() const {
    std::map<SquareKey, int> set;
    for (std::size_t i = 0; i < squares.size(); ++i)
        set.emplace(key_of(squares[i]), static_cast<int>(i));
    for (const DyadicSquare& s : squares) {
        const std::int64_t cells = std::int64_t{1} << s.level;
        for (const NeighborStep& step : kSides) {
            const std::int64_t nx = s.ix + step.dx;
            const std::int64_t ny = s.iy + step.dy;
            if (nx < 0 || ny < 0 || nx >= cells || ny >= cells) continue;
            const int found = find_cover_level(set, s.level, nx, ny);
            if (found >= 0 && s.level - found >= 2) return false;
        }
    }
    return true;
}

DyadicCover dyadic_cover(const Region& K, int depth, const SquareBox& root,
                         double cost_alpha) {
    if (depth < 0) throw InvalidParams("depth must be nonnegative");
    DyadicCover out;
    out.target = K;
    out.root = root;
    const dyadic::CoverTree tree = dyadic::CoverTree::build(K, root, depth);
    if (tree.empty()) return out;

    std::vector<double> h_by_level(static_cast<std::size_t>(depth) + 1);
    for (int l = 0; l <= depth; ++l)
        h_by_level[static_cast<std::size_t>(l)] =
            std::pow(root.side * std::ldexp(1.0, -l), cost_alpha);

    std::map<SquareKey, int> set;
    for (const DyadicSquare& s : tree.coarsened_cover(h_by_level, depth))
        set.emplace(key_of(s), 0);

    // 2:1 balance: any square two or more levels coarser than an edge
    // neighbor is replaced by its four children until the condition holds.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<SquareKey> keys;
        keys.reserve(set.size());
        for (const auto& kv : set) keys.push_back(kv.first);
        for (const SquareKey& k : keys) {
            if (!set.count(k)) continue;
            const auto [level, ix, iy] = k;
            const std::int64_t cells = std::int64_t{1} << level;
            for (const NeighborStep& step : kSides) {
                const std::int64_t nx = ix + step.dx;
                const std::int64_t ny = iy + step.dy;
                if (nx < 0 || ny < 0 || nx >= cells || ny >= cells) continue;
                const int found = find_cover_level(set, level, nx, ny);
                if (found < 0 || level - found < 2) continue;
                const std::int64_t cx = nx >> (level - found);
                const std::int64_t cy = ny >> (level - found);
                set.erase({found, cx, cy});
                for (int cix = 0; cix < 2; ++cix)
                    for (int ciy = 0; ciy < 2; ++ciy)
                        set.emplace(SquareKey{found + 1, 2 * cx + cix, 2 * cy + ciy}, 0);
                changed = true;
            }
        }
    }

    out.squares.reserve(set.size());
    for (const auto& kv : set) {
        const auto [level, ix, iy] = kv.first;
        out.squares.push_back(DyadicSquare{level, ix, iy});
    }
    std::sort(out.squares.begin(), out.squares.end(),
              [](const DyadicSquare& a, const DyadicSquare& b) {
                  return std::tie(a.level, a.ix, a.iy) < std::tie(b.level, b.ix, b.iy);
              });
    return out;
}

double BumpPartition::side(std::size_t j) const {
    return root_.side * std::ldexp(1.0, -squares_[j].level);
}

geometry::BBox BumpPartition::support(std::size_t j) const {
    const SquareBox b = squares_[j].box(root_);
    const double c = 0.25 * b.side;
    return {b.corner.re - c, b.corner.im - c, b.corner.re + b.side + c,
            b.corner.im + b.side + c};
}

double BumpPartition::ramp(double tau) const {
    if (tau <= 0.0) return 0.0;
    if (tau >= 1.0) return 1.0;
    const double t2 = tau * tau;
    switch (smoothness_) {
        case 1: return t2 * (3.0 - 2.0 * tau);
        case 2: return t2 * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
        default: return t2 * t2 * (35.0 + tau * (-84.0 + tau * (70.0 - 20.0 * tau)));
    }
}

double BumpPartition::ramp_deriv(double tau) const {
    if (tau <= 0.0 || tau >= 1.0) return 0.0;
    const double om = 1.0 - tau;
    switch (smoothness_) {
        case 1: return 6.0 * tau * om;
        case 2: return 30.0 * tau * tau * om * om;
        default: return 140.0 * tau * tau * tau * om * om * om;
    }
}

double BumpPartition::profile(std::size_t j, double coord, double lo, double hi,
                              double* deriv) const {
    // Support reaches a quarter side past the square, the flat plateau a
    // sixteenth: the plateaus of a cover then overlap into an open
    // neighborhood of the covered set, which the partition identity needs.
    const double margin = 0.0625 * (hi - lo);
    const double reach = 0.25 * (hi - lo);
    const double width = reach - margin;
    *deriv = 0.0;
    if (coord <= lo - reach || coord >= hi + reach) return 0.0;
    if (coord >= lo - margin && coord <= hi + margin) return 1.0;
    if (coord < lo) {
        const double tau = (coord - (lo - reach)) / width;
        *deriv = ramp_deriv(tau) / width;
        return ramp(tau);
    }
    const double tau = ((hi + reach) - coord) / width;
    *deriv = -ramp_deriv(tau) / width;
    return ramp(tau);
}

double BumpPartition::psi_with_grad(std::size_t j, Point z, double* gx, double* gy) const {
    const SquareBox b = squares_[j].box(root_);
    double dux, duy;
    const double ux = profile(j, z.re, b.corner.re, b.corner.re + b.side, &dux);
    const double uy = profile(j, z.im, b.corner.im, b.corner.im + b.side, &duy);
    *gx = dux * uy;
    *gy = ux * duy;
    return ux * uy;
}

double BumpPartition::psi(std::size_t j, Point z) const {
    double gx, gy;
    return psi_with_grad(j, z, &gx, &gy);
}

// phi_j = psi_j * prod over earlier overlapping squares k of (1 - psi_k).
// The products telescope: the partial sums equal 1 - prod(1 - psi), which is
// exactly 1 wherever any plateau is active, so the partition sums to one on a
// neighborhood of the cover and falls smoothly to zero across the collars.
double BumpPartition::phi(std::size_t j, Point z) const {
    double gx, gy;
    const double own = psi_with_grad(j, z, &gx, &gy);
    if (own <= 0.0) return 0.0;
    double prod = 1.0;
    for (std::uint32_t k : neighbors_[j]) {
        if (k >= j) continue;
        double kx, ky;
        prod *= 1.0 - psi_with_grad(k, z, &kx, &ky);
        if (prod == 0.0) return 0.0;
    }
    return own * prod;
}

Complex BumpPartition::dbar_phi(std::size_t j, Point z) const {
    constexpr std::size_t kMaxFactors = 48;
    double v[kMaxFactors], vx[kMaxFactors], vy[kMaxFactors];
    double gx, gy;
    v[0] = psi_with_grad(j, z, &gx, &gy);
    vx[0] = gx;
    vy[0] = gy;
    std::size_t m = 1;
    for (std::uint32_t k : neighbors_[j]) {
        if (k >= j) continue;
        double kx, ky;
        const double pk = psi_with_grad(k, z, &kx, &ky);
        if (pk == 0.0) continue;
        if (m == kMaxFactors) throw NumericError("bump overlap too deep");
        v[m] = 1.0 - pk;
        vx[m] = -kx;
        vy[m] = -ky;
        ++m;
    }
    // Product rule over phi_j = v_0 * v_1 * ... * v_{m-1}.
    double px = 0.0, py = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
        double rest = 1.0;
        for (std::size_t k = 0; k < m; ++k)
            if (k != l) rest *= v[k];
        px += vx[l] * rest;
        py += vy[l] * rest;
    }
    return 0.5 * Complex(px, py);
}

double BumpPartition::partition_sum(Point z) const {
    double total = 0.0;
    for (std::size_t j = 0; j < squares_.size(); ++j) {
        const geometry::BBox sup = support(j);
        if (z.re <= sup.xlo || z.re >= sup.xhi || z.im <= sup.ylo || z.im >= sup.yhi)
            continue;
        total += psi(j, z);
    }
    return total;
}

BumpPartition bump_partition(const DyadicCover& cover, int smoothness) {
    if (smoothness < 1 || smoothness > 3)
        throw InvalidParams("smoothness must be 1, 2, or 3");
    if (!cover.balanced()) throw InvalidParams("balance required");
    BumpPartition p;
    p.squares_ = cover.squares;
    p.root_ = cover.root;
    p.smoothness_ = smoothness;

    const std::size_t n = p.squares_.size();
    p.neighbors_.assign(n, {});
    std::vector<geometry::BBox> sup(n);
    for (std::size_t j = 0; j < n; ++j) sup[j] = p.support(j);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (sup[j].xlo < sup[k].xhi && sup[k].xlo < sup[j].xhi &&
                sup[j].ylo < sup[k].yhi && sup[k].ylo < sup[j].yhi)
                p.neighbors_[j].push_back(static_cast<std::uint32_t>(k));
        }
    }

    // Sampled gradient bound: |grad phi| = 2 |dbar phi| for real phi.
    double worst = 0.0;
    constexpr int kGrid = 24;
    for (std::size_t j = 0; j < n; ++j) {
        const double sj = p.side(j);
        for (int a = 0; a <= kGrid; ++a) {
            for (int b = 0; b <= kGrid; ++b) {
                const Point z{sup[j].xlo + (sup[j].xhi - sup[j].xlo) * a / kGrid,
                              sup[j].ylo + (sup[j].yhi - sup[j].ylo) * b / kGrid};
                worst = std::max(worst, sj * 2.0 * std::abs(p.dbar_phi(j, z)));
            }
        }
    }
    p.gradient_constant_ = worst;
    return p;
}

double moment_vanish_check(const BumpPartition& partition, Point x, int t, int nodes) {
    double worst = 0.0;
    for (std::size_t j = 0; j < partition.size(); ++j) {
        const geometry::BBox sup = partition.support(j);
        if (box_distance(sup, x) < partition.side(j))
            throw InvalidParams("singularity inside support");
        const auto grid = numerics::box_quadrature(sup.xlo, sup.ylo, sup.xhi, sup.yhi, nodes);
        Complex acc = 0.0;
        for (const auto& node : grid) {
            const Complex d = Complex(node.x, node.y) - Complex(x.re, x.im);
            acc += node.w * inverse_power(d, t + 1) * partition.dbar_phi(j, {node.x, node.y});
        }
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

double green_derivative_bound(const FunctionHandle& f, Point x, int t,
                              const CampanatoParams& params, const DyadicCover& cover,
                              int nodes) {
    (void)params;
    for (const Point& pole : f.poles) {
        bool covered = false;
        for (const DyadicSquare& s : cover.squares) {
            const SquareBox b = s.box(cover.root);
            if (pole.re >= b.corner.re && pole.re <= b.corner.re + b.side &&
                pole.im >= b.corner.im && pole.im <= b.corner.im + b.side) {
                covered = true;
                break;
            }
        }
        if (!covered) throw InvalidParams("cover does not isolate poles");
    }

    const BumpPartition partition = bump_partition(cover, 2);
    double total = 0.0;
    for (std::size_t j = 0; j < partition.size(); ++j) {
        const geometry::BBox sup = partition.support(j);
        const double sj = partition.side(j);
        if (box_distance(sup, x) < sj)
            throw InvalidParams("singularity inside support");

        // Reference constant: the quadrature mean of f over the dilated
        // square, skipping nodes close to a listed pole. Any constant keeps
        // the majorant valid; the trim just keeps it small near poles.
        const auto coarse =
            numerics::box_quadrature(sup.xlo, sup.ylo, sup.xhi, sup.yhi,
                                     std::min(nodes, 33));
        Complex mean_acc = 0.0;
        double mean_w = 0.0;
        for (const auto& node : coarse) {
            bool near_pole = false;
            for (const Point& pole : f.poles)
                near_pole = near_pole ||
                            std::hypot(node.x - pole.re, node.y - pole.im) < 0.125 * sj;
            if (near_pole) continue;
            mean_acc += node.w * f.evaluator(Complex(node.x, node.y));
            mean_w += node.w;
        }
        const Complex cj = mean_w > 0.0 ? mean_acc / mean_w : Complex(0.0);

        const auto grid = numerics::box_quadrature(sup.xlo, sup.ylo, sup.xhi, sup.yhi, nodes);
        double acc = 0.0;
        for (const auto& node : grid) {
            const double weight = std::abs(partition.dbar_phi(j, {node.x, node.y}));
            if (weight == 0.0) continue;
            bool at_pole = false;
            for (const Point& pole : f.poles)
                at_pole = at_pole ||
                          std::hypot(node.x - pole.re, node.y - pole.im) < 1e-12 * sj;
            if (at_pole) continue; // integrand limit 0: dbar phi vanishes faster
            const Complex z(node.x, node.y);
            const double dist = std::abs(z - Complex(x.re, x.im));
            acc += node.w * std::abs(f.evaluator(z) - cj) *
                   std::pow(dist, -(t + 1.0)) * weight;
        }
        total += acc;
    }
    return factorial(t) / 3.14159265358979323846 * total;
}

} // namespace caplab::sufficiency
