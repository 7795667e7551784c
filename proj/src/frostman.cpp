#include "caplab/frostman.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "caplab/errors.hpp"
#include "caplab/numerics.hpp"

namespace caplab::frostman {

double DiscreteMeasure::total_mass() const {
    double sum = 0.0;
    for (const Atom& a : atoms) sum += a.weight;
    return sum;
}

geometry::BBox DiscreteMeasure::atom_bounds() const {
    if (atoms.empty()) return {0, 0, 0, 0};
    geometry::BBox b{atoms[0].position.re, atoms[0].position.im, atoms[0].position.re,
                     atoms[0].position.im};
    for (const Atom& a : atoms) {
        b.xlo = std::min(b.xlo, a.position.re);
        b.ylo = std::min(b.ylo, a.position.im);
        b.xhi = std::max(b.xhi, a.position.re);
        b.yhi = std::max(b.yhi, a.position.im);
    }
    return b;
}

double DiscreteMeasure::ball_mass(const Point& center, double radius) const {
    const double r2 = radius * radius;
    double sum = 0.0;
    for (const Atom& a : atoms) {
        const double dx = a.position.re - center.re;
        const double dy = a.position.im - center.im;
        if (dx * dx + dy * dy <= r2) sum += a.weight;
    }
    return sum;
}

namespace {

// Bucketed atom lookup so repeated ball queries stay near-linear in the atoms
// actually inside the ball.
class AtomIndex {
public:
    explicit AtomIndex(const DiscreteMeasure& nu) : nu_(nu) {
        bounds_ = nu.atom_bounds();
        const double w = std::max(bounds_.width(), 1e-300);
        const double h = std::max(bounds_.height(), 1e-300);
        const std::size_t n = nu.atoms.size();
        const int target = std::max(1, static_cast<int>(std::sqrt(double(n) / 4.0)));
        nx_ = std::min(512, target);
        ny_ = nx_;
        sx_ = w / nx_;
        sy_ = h / ny_;
        buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
        for (std::size_t i = 0; i < n; ++i) {
            const Atom& a = nu.atoms[i];
            buckets_[slot(cell_x(a.position.re), cell_y(a.position.im))].push_back(
                static_cast<std::uint32_t>(i));
        }
    }

    double ball_mass(const Point& c, double radius) const {
        const double r2 = radius * radius;
        const int x0 = cell_x(c.re - radius), x1 = cell_x(c.re + radius);
        const int y0 = cell_y(c.im - radius), y1 = cell_y(c.im + radius);
        double sum = 0.0;
        for (int gy = y0; gy <= y1; ++gy)
            for (int gx = x0; gx <= x1; ++gx)
                for (const std::uint32_t i : buckets_[slot(gx, gy)]) {
                    const Atom& a = nu_.atoms[i];
                    const double dx = a.position.re - c.re;
                    const double dy = a.position.im - c.im;
                    if (dx * dx + dy * dy <= r2) sum += a.weight;
                }
        return sum;
    }

private:
    int cell_x(double x) const {
        return std::clamp(static_cast<int>((x - bounds_.xlo) / sx_), 0, nx_ - 1);
    }
    int cell_y(double y) const {
        return std::clamp(static_cast<int>((y - bounds_.ylo) / sy_), 0, ny_ - 1);
    }
    std::size_t slot(int gx, int gy) const {
        return static_cast<std::size_t>(gy) * nx_ + gx;
    }

    const DiscreteMeasure& nu_;
    geometry::BBox bounds_;
    int nx_ = 1, ny_ = 1;
    double sx_ = 1, sy_ = 1;
    std::vector<std::vector<std::uint32_t>> buckets_;
};

constexpr std::size_t kAtomLimit = 1u << 23;

} // namespace

DiscreteMeasure build_frostman_on(const dyadic::CoverTree& tree, const Region& K,
                                  const MeasureFunction& h, int eval_depth) {
    if (tree.empty()) throw InvalidParams("empty support");
    const std::vector<double> hl = hausdorff::kernel_by_level(h, tree.root(), eval_depth);

    DiscreteMeasure nu;
    nu.support_hint = K;
    nu.root = tree.root();
    nu.resolution = tree.cell_side(eval_depth);

    // Mass of a fully-contained cell by level, and the matching uniform
    // per-leaf weight after the caps internal to that subtree.
    std::vector<double> full_mass(eval_depth + 1);
    full_mass[eval_depth] = hl[eval_depth];
    for (int l = eval_depth - 1; l >= 0; --l)
        full_mass[l] = std::min(hl[l], 4.0 * full_mass[l + 1]);

    const auto& nodes = tree.nodes();

    // First pass: emit atoms in DFS order, return subtree mass; second duty:
    // when a cap binds, rescale the subtree's atom range in place.
    std::function<double(std::int32_t)> emit = [&](std::int32_t i) -> double {
        const auto& n = nodes[i];
        if (n.full) {
            const int shift = eval_depth - n.level;
            const std::int64_t count = std::int64_t{1} << shift;
            const double w = full_mass[n.level] / std::ldexp(1.0, 2 * shift);
            const double side = tree.cell_side(eval_depth);
            if (nu.atoms.size() + static_cast<std::size_t>(count) * count > kAtomLimit)
                throw InvalidParams("construction depth too large for region size");
            for (std::int64_t dy = 0; dy < count; ++dy)
                for (std::int64_t dx = 0; dx < count; ++dx) {
                    const geometry::DyadicSquare cell{eval_depth, (n.ix << shift) + dx,
                                                      (n.iy << shift) + dy};
                    const SquareBox box = cell.box(tree.root());
                    nu.atoms.push_back(
                        {{box.corner.re + 0.5 * side, box.corner.im + 0.5 * side}, w});
                }
            return full_mass[n.level];
        }
        if (n.level == eval_depth) {
            const geometry::DyadicSquare cell{n.level, n.ix, n.iy};
            const SquareBox box = cell.box(tree.root());
            const double side = box.side;
            if (nu.atoms.size() >= kAtomLimit)
                throw InvalidParams("construction depth too large for region size");
            nu.atoms.push_back(
                {{box.corner.re + 0.5 * side, box.corner.im + 0.5 * side}, hl[n.level]});
            return hl[n.level];
        }
        const std::size_t begin = nu.atoms.size();
        double sum = 0.0;
        bool any = false;
        for (std::int32_t c : n.child)
            if (c >= 0) {
                sum += emit(c);
                any = true;
            }
        if (!any) {
            // Degenerate partial leaf above eval depth: treat as a single cell.
            const geometry::DyadicSquare cell{n.level, n.ix, n.iy};
            const SquareBox box = cell.box(tree.root());
            nu.atoms.push_back(
                {{box.corner.re + 0.5 * box.side, box.corner.im + 0.5 * box.side},
                 hl[n.level]});
            return hl[n.level];
        }
        if (sum > hl[n.level] && sum > 0.0) {
            const double factor = hl[n.level] / sum;
            for (std::size_t k = begin; k < nu.atoms.size(); ++k)
                nu.atoms[k].weight *= factor;
            return hl[n.level];
        }
        return sum;
    };
    emit(0);
    return nu;
}

DiscreteMeasure build_frostman(const Region& K, const MeasureFunction& h, int depth,
                               const SquareBox& root) {
    const dyadic::CoverTree tree = hausdorff::build_cover_tree(K, root, depth);
    if (tree.empty()) throw InvalidParams("empty support");
    return build_frostman_on(tree, K, h, depth);
}

namespace {

FrostmanReport run_probes(const DiscreteMeasure& nu, const MeasureFunction& h,
                          const std::vector<Disk>& balls) {
    FrostmanReport report;
    report.total_mass = nu.total_mass();
    report.samples = static_cast<int>(balls.size());
    if (nu.atoms.empty()) return report;
    const AtomIndex index(nu);
    std::vector<double> ratio(balls.size());
    numerics::parallel_for(balls.size(), [&](std::size_t i) {
        const double hr = h(balls[i].radius);
        ratio[i] = hr > 0.0 ? index.ball_mass(balls[i].center, balls[i].radius) / hr : 0.0;
    });
    for (std::size_t i = 0; i < balls.size(); ++i)
        if (ratio[i] > report.constant_C) {
            report.constant_C = ratio[i];
            report.worst_ball = balls[i];
        }
    return report;
}

std::vector<Disk> random_balls(const DiscreteMeasure& nu, int n_samples,
                               std::uint64_t seed) {
    const geometry::BBox b = nu.atom_bounds();
    const double r_lo = std::max(nu.resolution, 1e-300);
    const double r_hi = std::max(nu.root.side, r_lo);
    numerics::Rng rng(seed);
    std::vector<Disk> balls;
    balls.reserve(static_cast<std::size_t>(std::max(n_samples, 0)));
    for (int i = 0; i < n_samples; ++i) {
        const double x = rng.uniform(b.xlo, std::max(b.xhi, b.xlo + 1e-300));
        const double y = rng.uniform(b.ylo, std::max(b.yhi, b.ylo + 1e-300));
        balls.push_back({{x, y}, rng.log_uniform(r_lo, r_hi)});
    }
    return balls;
}

} // namespace

FrostmanReport verify_frostman(const DiscreteMeasure& nu, const MeasureFunction& h,
                               int n_samples, std::uint64_t seed) {
    return run_probes(nu, h, random_balls(nu, n_samples, seed));
}

FrostmanReport growth_constant(const DiscreteMeasure& nu, const MeasureFunction& h,
                               int n_random, std::uint64_t seed) {
    std::vector<Disk> balls = random_balls(nu, n_random, seed);
    if (!nu.atoms.empty()) {
        const geometry::BBox b = nu.atom_bounds();
        const double span = std::max({b.width(), b.height(), nu.resolution});
        const double r_lo = std::max(nu.resolution, 1e-300);
        const double r_hi = std::max(2.0 * span, r_lo * 2.0);
        // Geometric radius ladder, quarter-octave steps.
        std::vector<double> ladder;
        for (double r = r_lo; r <= r_hi * 1.0001; r *= std::pow(2.0, 0.25))
            ladder.push_back(r);
        // Deterministic center subsample: stride through atoms, plus the
        // bounding-box center so a support-enclosing ball is always probed.
        std::vector<Point> centers;
        const std::size_t stride = std::max<std::size_t>(1, nu.atoms.size() / 96);
        for (std::size_t i = 0; i < nu.atoms.size(); i += stride)
            centers.push_back(nu.atoms[i].position);
        centers.push_back({0.5 * (b.xlo + b.xhi), 0.5 * (b.ylo + b.yhi)});
        for (const Point& c : centers)
            for (const double r : ladder) balls.push_back({c, r});
    }
    return run_probes(nu, h, balls);
}

} // namespace caplab::frostman
