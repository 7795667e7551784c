#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace caplab::geometry {

struct Point {
    double re = 0.0;
    double im = 0.0;
};

inline std::complex<double> to_complex(const Point& p) { return {p.re, p.im}; }
inline Point to_point(std::complex<double> z) { return {z.real(), z.imag()}; }
inline double dist(const Point& a, const Point& b) {
    return std::hypot(a.re - b.re, a.im - b.im);
}

struct Disk {
    Point center;
    double radius = 0.0; // > 0
};

// Axis-aligned square, corner = lower-left.
struct SquareBox {
    Point corner;
    double side = 0.0; // > 0
};

struct Annulus {
    Point center;
    double inner = 0.0; // 0 <= inner < outer
    double outer = 0.0;
};

// Axis-aligned rectangle used for bounds bookkeeping.
struct BBox {
    double xlo = 0.0, ylo = 0.0, xhi = 0.0, yhi = 0.0;

    bool contains(const BBox& other, double eps = 0.0) const {
        return other.xlo >= xlo - eps && other.ylo >= ylo - eps &&
               other.xhi <= xhi + eps && other.yhi <= yhi + eps;
    }
    double width() const { return xhi - xlo; }
    double height() const { return yhi - ylo; }
};

enum class CellClass { Full, Empty, Partial };

// CSG region over closed primitives. Difference removes the subtrahend's
// interior, so `difference(A, B)` keeps points of A on the boundary of B.
class Region {
public:
    enum class Kind : std::uint8_t { Disk, Square, Annulus, Union, Intersection, Difference };

    static Region disk(const Disk& d);
    static Region square(const SquareBox& s);
    static Region annulus(const Annulus& a);
    static Region empty();
    static Region join(std::vector<Region> parts);        // union of zero or more parts
    static Region intersect(std::vector<Region> parts);   // requires >= 1 part
    static Region difference(Region a, Region b);

    Kind kind() const;
    const std::vector<Region>& children() const;
    const Disk& as_disk() const;
    const SquareBox& as_square() const;
    const Annulus& as_annulus() const;

    // Closed membership.
    bool contains(const Point& p) const;
    // Structural interior: per-primitive open sets combined node by node.
    // Under-approximates the topological interior of composite sets, which is
    // the sound direction for difference semantics.
    bool interior_contains(const Point& p) const;

    BBox bounding_box() const;
    Region translate(double dx, double dy) const;
    // Scale about the origin by a positive factor; maps primitives exactly.
    Region scale(double factor) const;

    std::size_t node_count() const;

    struct Node; // opaque; defined in the implementation file

private:
    explicit Region(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Sound three-valued test of a closed cell against a region: Full means the
// whole cell is contained, Empty means the cell misses the region, Partial is
// the inconclusive remainder. Never claims Full or Empty wrongly.
CellClass classify_cell(const Region& region, const SquareBox& cell);

// Same test against the region's structural interior. A cell touching the
// region only along a shared boundary edge classifies Empty here; cover
// construction uses this so boundary-tangent neighbours are not retained.
CellClass classify_cell_interior(const Region& region, const SquareBox& cell);

// A_n(x) = { z : 2^-(n+1) <= |z - x| <= 2^-n }.
Annulus annulus_shell(const Point& x, int n);

// Cell of the dyadic grid anchored at `root`: level 0 is the root itself,
// level L splits each axis into 2^L slots indexed from the root corner.
struct DyadicSquare {
    int level = 0;
    std::int64_t ix = 0;
    std::int64_t iy = 0;

    SquareBox box(const SquareBox& root) const {
        const double side = root.side * std::ldexp(1.0, -level);
        return {{root.corner.re + static_cast<double>(ix) * side,
                 root.corner.im + static_cast<double>(iy) * side},
                side};
    }
};

inline SquareBox default_root() { return {{-1.0, -1.0}, 2.0}; }

} // namespace caplab::geometry
