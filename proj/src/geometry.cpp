#include "caplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "caplab/errors.hpp"

namespace caplab::geometry {

struct Region::Node {
    Kind kind;
    Disk disk{};
    SquareBox square{};
    Annulus annulus{};
    std::vector<Region> children;
};

namespace {

std::shared_ptr<const Region::Node> make_node(Region::Kind kind) {
    auto n = std::make_shared<Region::Node>();
    n->kind = kind;
    return n;
}

// Squared distance extremes from a point to a closed box.
struct BoxDistance {
    double dmin;
    double dmax;
};

BoxDistance box_distance(const Point& c, const SquareBox& cell) {
    const double xlo = cell.corner.re, xhi = cell.corner.re + cell.side;
    const double ylo = cell.corner.im, yhi = cell.corner.im + cell.side;
    const double dx = std::max({xlo - c.re, 0.0, c.re - xhi});
    const double dy = std::max({ylo - c.im, 0.0, c.im - yhi});
    const double fx = std::max(c.re - xlo, xhi - c.re);
    const double fy = std::max(c.im - ylo, yhi - c.im);
    return {std::hypot(dx, dy), std::hypot(fx, fy)};
}

} // namespace

Region Region::disk(const Disk& d) {
    if (!(d.radius > 0.0) || !std::isfinite(d.radius))
        throw InvalidParams("disk radius must be positive");
    auto n = make_node(Kind::Disk);
    const_cast<Node&>(*n).disk = d;
    return Region(std::move(n));
}

Region Region::square(const SquareBox& s) {
    if (!(s.side > 0.0) || !std::isfinite(s.side))
        throw InvalidParams("square side must be positive");
    auto n = make_node(Kind::Square);
    const_cast<Node&>(*n).square = s;
    return Region(std::move(n));
}

Region Region::annulus(const Annulus& a) {
    if (!(a.inner >= 0.0) || !(a.outer > a.inner) || !std::isfinite(a.outer))
        throw InvalidParams("annulus radii must satisfy 0 <= inner < outer");
    auto n = make_node(Kind::Annulus);
    const_cast<Node&>(*n).annulus = a;
    return Region(std::move(n));
}

Region Region::empty() { return join({}); }

Region Region::join(std::vector<Region> parts) {
    auto n = make_node(Kind::Union);
    const_cast<Node&>(*n).children = std::move(parts);
    return Region(std::move(n));
}

Region Region::intersect(std::vector<Region> parts) {
    if (parts.empty()) throw InvalidParams("intersection needs at least one operand");
    auto n = make_node(Kind::Intersection);
    const_cast<Node&>(*n).children = std::move(parts);
    return Region(std::move(n));
}

Region Region::difference(Region a, Region b) {
    auto n = make_node(Kind::Difference);
    const_cast<Node&>(*n).children = {std::move(a), std::move(b)};
    return Region(std::move(n));
}

Region::Kind Region::kind() const { return node_->kind; }
const std::vector<Region>& Region::children() const { return node_->children; }
const Disk& Region::as_disk() const { return node_->disk; }
const SquareBox& Region::as_square() const { return node_->square; }
const Annulus& Region::as_annulus() const { return node_->annulus; }

bool Region::contains(const Point& p) const {
    switch (node_->kind) {
    case Kind::Disk:
        return dist(p, node_->disk.center) <= node_->disk.radius;
    case Kind::Square: {
        const SquareBox& s = node_->square;
        return p.re >= s.corner.re && p.re <= s.corner.re + s.side &&
               p.im >= s.corner.im && p.im <= s.corner.im + s.side;
    }
    case Kind::Annulus: {
        const double d = dist(p, node_->annulus.center);
        return d >= node_->annulus.inner && d <= node_->annulus.outer;
    }
    case Kind::Union:
        for (const Region& c : node_->children)
            if (c.contains(p)) return true;
        return false;
    case Kind::Intersection:
        for (const Region& c : node_->children)
            if (!c.contains(p)) return false;
        return true;
    case Kind::Difference:
        return node_->children[0].contains(p) && !node_->children[1].interior_contains(p);
    }
    return false;
}

bool Region::interior_contains(const Point& p) const {
    switch (node_->kind) {
    case Kind::Disk:
        return dist(p, node_->disk.center) < node_->disk.radius;
    case Kind::Square: {
        const SquareBox& s = node_->square;
        return p.re > s.corner.re && p.re < s.corner.re + s.side &&
               p.im > s.corner.im && p.im < s.corner.im + s.side;
    }
    case Kind::Annulus: {
        const double d = dist(p, node_->annulus.center);
        return d > node_->annulus.inner && d < node_->annulus.outer;
    }
    case Kind::Union:
        for (const Region& c : node_->children)
            if (c.interior_contains(p)) return true;
        return false;
    case Kind::Intersection:
        for (const Region& c : node_->children)
            if (!c.interior_contains(p)) return false;
        return true;
    case Kind::Difference:
        return node_->children[0].interior_contains(p) && !node_->children[1].contains(p);
    }
    return false;
}

BBox Region::bounding_box() const {
    switch (node_->kind) {
    case Kind::Disk: {
        const Disk& d = node_->disk;
        return {d.center.re - d.radius, d.center.im - d.radius,
                d.center.re + d.radius, d.center.im + d.radius};
    }
    case Kind::Square: {
        const SquareBox& s = node_->square;
        return {s.corner.re, s.corner.im, s.corner.re + s.side, s.corner.im + s.side};
    }
    case Kind::Annulus: {
        const Annulus& a = node_->annulus;
        return {a.center.re - a.outer, a.center.im - a.outer,
                a.center.re + a.outer, a.center.im + a.outer};
    }
    case Kind::Union: {
        if (node_->children.empty()) return {0.0, 0.0, 0.0, 0.0};
        BBox acc = node_->children.front().bounding_box();
        for (std::size_t i = 1; i < node_->children.size(); ++i) {
            const BBox b = node_->children[i].bounding_box();
            acc.xlo = std::min(acc.xlo, b.xlo);
            acc.ylo = std::min(acc.ylo, b.ylo);
            acc.xhi = std::max(acc.xhi, b.xhi);
            acc.yhi = std::max(acc.yhi, b.yhi);
        }
        return acc;
    }
    case Kind::Intersection: {
        BBox acc = node_->children.front().bounding_box();
        for (std::size_t i = 1; i < node_->children.size(); ++i) {
            const BBox b = node_->children[i].bounding_box();
            acc.xlo = std::max(acc.xlo, b.xlo);
            acc.ylo = std::max(acc.ylo, b.ylo);
            acc.xhi = std::min(acc.xhi, b.xhi);
            acc.yhi = std::min(acc.yhi, b.yhi);
        }
        if (acc.xhi < acc.xlo || acc.yhi < acc.ylo) return {0.0, 0.0, 0.0, 0.0};
        return acc;
    }
    case Kind::Difference:
        return node_->children[0].bounding_box();
    }
    return {};
}

Region Region::translate(double dx, double dy) const {
    switch (node_->kind) {
    case Kind::Disk: {
        Disk d = node_->disk;
        d.center.re += dx;
        d.center.im += dy;
        return disk(d);
    }
    case Kind::Square: {
        SquareBox s = node_->square;
        s.corner.re += dx;
        s.corner.im += dy;
        return square(s);
    }
    case Kind::Annulus: {
        Annulus a = node_->annulus;
        a.center.re += dx;
        a.center.im += dy;
        return annulus(a);
    }
    default: {
        std::vector<Region> moved;
        moved.reserve(node_->children.size());
        for (const Region& c : node_->children) moved.push_back(c.translate(dx, dy));
        if (node_->kind == Kind::Union) return join(std::move(moved));
        if (node_->kind == Kind::Intersection) return intersect(std::move(moved));
        return difference(moved[0], moved[1]);
    }
    }
}

Region Region::scale(double factor) const {
    if (!(factor > 0.0)) throw InvalidParams("scale factor must be positive");
    switch (node_->kind) {
    case Kind::Disk:
        return disk({{node_->disk.center.re * factor, node_->disk.center.im * factor},
                     node_->disk.radius * factor});
    case Kind::Square:
        return square({{node_->square.corner.re * factor, node_->square.corner.im * factor},
                       node_->square.side * factor});
    case Kind::Annulus:
        return annulus({{node_->annulus.center.re * factor, node_->annulus.center.im * factor},
                        node_->annulus.inner * factor, node_->annulus.outer * factor});
    default: {
        std::vector<Region> scaled;
        scaled.reserve(node_->children.size());
        for (const Region& c : node_->children) scaled.push_back(c.scale(factor));
        if (node_->kind == Kind::Union) return join(std::move(scaled));
        if (node_->kind == Kind::Intersection) return intersect(std::move(scaled));
        return difference(scaled[0], scaled[1]);
    }
    }
}

std::size_t Region::node_count() const {
    std::size_t n = 1;
    for (const Region& c : node_->children) n += c.node_count();
    return n;
}

namespace {

// Mode::Membership tests the closed cell against the closed region;
// Mode::Interior tests it against the structural interior. The distinction is
// exactly strict versus non-strict inequalities on the primitives, composed
// with the same three-valued rules as the point predicates.
enum class Mode { Membership, Interior };

CellClass classify_impl(const Region& region, const SquareBox& cell, Mode mode);

CellClass classify_disk(const Disk& d, const SquareBox& cell, Mode mode) {
    const BoxDistance bd = box_distance(d.center, cell);
    if (mode == Mode::Membership) {
        if (bd.dmin > d.radius) return CellClass::Empty;
        if (bd.dmax <= d.radius) return CellClass::Full;
    } else {
        if (bd.dmin >= d.radius) return CellClass::Empty;
        if (bd.dmax < d.radius) return CellClass::Full;
    }
    return CellClass::Partial;
}

CellClass classify_square(const SquareBox& s, const SquareBox& cell, Mode mode) {
    const double axlo = s.corner.re, axhi = s.corner.re + s.side;
    const double aylo = s.corner.im, ayhi = s.corner.im + s.side;
    const double bxlo = cell.corner.re, bxhi = cell.corner.re + cell.side;
    const double bylo = cell.corner.im, byhi = cell.corner.im + cell.side;
    if (mode == Mode::Membership) {
        if (bxlo > axhi || bxhi < axlo || bylo > ayhi || byhi < aylo) return CellClass::Empty;
        if (bxlo >= axlo && bxhi <= axhi && bylo >= aylo && byhi <= ayhi) return CellClass::Full;
    } else {
        if (bxlo >= axhi || bxhi <= axlo || bylo >= ayhi || byhi <= aylo) return CellClass::Empty;
        if (bxlo > axlo && bxhi < axhi && bylo > aylo && byhi < ayhi) return CellClass::Full;
    }
    return CellClass::Partial;
}

CellClass classify_annulus(const Annulus& a, const SquareBox& cell, Mode mode) {
    const BoxDistance bd = box_distance(a.center, cell);
    if (mode == Mode::Membership) {
        if (bd.dmax < a.inner || bd.dmin > a.outer) return CellClass::Empty;
        if (bd.dmin >= a.inner && bd.dmax <= a.outer) return CellClass::Full;
    } else {
        if (bd.dmax <= a.inner || bd.dmin >= a.outer) return CellClass::Empty;
        if (bd.dmin > a.inner && bd.dmax < a.outer) return CellClass::Full;
    }
    return CellClass::Partial;
}

CellClass classify_union(const std::vector<Region>& parts, const SquareBox& cell, Mode mode) {
    bool all_empty = true;
    for (const Region& c : parts) {
        const CellClass k = classify_impl(c, cell, mode);
        if (k == CellClass::Full) return CellClass::Full;
        if (k != CellClass::Empty) all_empty = false;
    }
    return all_empty ? CellClass::Empty : CellClass::Partial;
}

CellClass classify_intersection(const std::vector<Region>& parts, const SquareBox& cell,
                                Mode mode) {
    bool all_full = true;
    for (const Region& c : parts) {
        const CellClass k = classify_impl(c, cell, mode);
        if (k == CellClass::Empty) return CellClass::Empty;
        if (k != CellClass::Full) all_full = false;
    }
    return all_full ? CellClass::Full : CellClass::Partial;
}

// Difference semantics: membership removes interior(B), interior removes
// closure(B). Each branch pairs the complementary mode on the subtrahend.
CellClass classify_difference(const Region& a, const Region& b, const SquareBox& cell,
                              Mode mode) {
    const CellClass ka = classify_impl(a, cell, mode);
    if (ka == CellClass::Empty) return CellClass::Empty;
    const Mode sub = (mode == Mode::Membership) ? Mode::Interior : Mode::Membership;
    const CellClass kb = classify_impl(b, cell, sub);
    if (kb == CellClass::Full) return CellClass::Empty;
    if (ka == CellClass::Full && kb == CellClass::Empty) return CellClass::Full;
    return CellClass::Partial;
}

CellClass classify_impl(const Region& region, const SquareBox& cell, Mode mode) {
    switch (region.kind()) {
    case Region::Kind::Disk:
        return classify_disk(region.as_disk(), cell, mode);
    case Region::Kind::Square:
        return classify_square(region.as_square(), cell, mode);
    case Region::Kind::Annulus:
        return classify_annulus(region.as_annulus(), cell, mode);
    case Region::Kind::Union:
        return classify_union(region.children(), cell, mode);
    case Region::Kind::Intersection:
        return classify_intersection(region.children(), cell, mode);
    case Region::Kind::Difference:
        return classify_difference(region.children()[0], region.children()[1], cell, mode);
    }
    return CellClass::Partial;
}

} // namespace

CellClass classify_cell(const Region& region, const SquareBox& cell) {
    return classify_impl(region, cell, Mode::Membership);
}

CellClass classify_cell_interior(const Region& region, const SquareBox& cell) {
    return classify_impl(region, cell, Mode::Interior);
}

Annulus annulus_shell(const Point& x, int n) {
    if (n < 0) throw InvalidParams("annulus shell index must be nonnegative");
    return {x, std::ldexp(1.0, -(n + 1)), std::ldexp(1.0, -n)};
}

} // namespace caplab::geometry
