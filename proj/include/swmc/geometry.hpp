#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

namespace swmc {

using Point = std::vector<double>;

inline Point point1(double x) { return Point{x}; }
inline Point point2(double x, double y) { return Point{x, y}; }

inline double euclidean_norm(const Point& p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return std::sqrt(s);
}

inline double euclidean_distance(const Point& a, const Point& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("euclidean_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

/// State-space topology. Flat Euclidean space, or (in one dimension) a
/// circle of given perimeter with coordinates wrapped to [-P/2, P/2).
struct Topology {
    enum class Kind { Flat, Circle };

    Kind kind = Kind::Flat;
    double perimeter = 0.0;

    static Topology flat() { return {}; }

    static Topology circle(double perimeter) {
        if (!(perimeter > 0.0))
            throw std::invalid_argument("Topology::circle: perimeter must be positive");
        Topology t;
        t.kind = Kind::Circle;
        t.perimeter = perimeter;
        return t;
    }

    bool is_circle() const { return kind == Kind::Circle; }

    // Canonical coordinate in [-P/2, P/2).
    double wrap(double x) const {
        if (!is_circle()) return x;
        const double p = perimeter;
        double w = x - p * std::floor((x + 0.5 * p) / p);
        if (w >= 0.5 * p) w -= p;  // guard against FP edge at +P/2
        return w;
    }

    // Signed displacement in [-P/2, P/2).
    double wrap_diff(double d) const { return wrap(d); }

    double dist1(double x, double y) const {
        if (!is_circle()) return std::abs(x - y);
        return std::abs(wrap_diff(x - y));
    }

    double distance(const Point& a, const Point& b) const {
        if (is_circle()) {
            if (a.size() != 1 || b.size() != 1)
                throw std::invalid_argument("Topology: circle metric is one-dimensional");
            return dist1(a[0], b[0]);
        }
        return euclidean_distance(a, b);
    }

    Point canonical(Point p) const {
        if (is_circle() && !p.empty()) p[0] = wrap(p[0]);
        return p;
    }

    bool operator==(const Topology& o) const {
        return kind == o.kind && perimeter == o.perimeter;
    }
};

// ---------------------------------------------------------------------------
// Convex regions: intervals (flat 1-D), arcs (circle 1-D), axis-aligned
// boxes and Euclidean balls (flat n-D).
// ---------------------------------------------------------------------------

struct Interval {
    double lo = 0.0, hi = 0.0;
};

/// Arc on a circle, covering wrapped coordinates [start, start + length).
struct Arc {
    double start = 0.0, length = 0.0;
};

struct Box {
    Point lo, hi;
};

struct BallRegion {
    Point center;
    double radius = 0.0;
};

using ConvexRegion = std::variant<Interval, Arc, Box, BallRegion>;

inline int region_dimension(const ConvexRegion& r) {
    if (std::holds_alternative<Interval>(r) || std::holds_alternative<Arc>(r)) return 1;
    if (const auto* b = std::get_if<Box>(&r)) return static_cast<int>(b->lo.size());
    return static_cast<int>(std::get<BallRegion>(r).center.size());
}

inline double ball_volume(int dim, double radius) {
    const double n = static_cast<double>(dim);
    return std::pow(std::numbers::pi, 0.5 * n) * std::pow(radius, n) /
           std::tgamma(0.5 * n + 1.0);
}

inline double region_measure(const ConvexRegion& r) {
    if (const auto* iv = std::get_if<Interval>(&r)) return iv->hi - iv->lo;
    if (const auto* arc = std::get_if<Arc>(&r)) return arc->length;
    if (const auto* box = std::get_if<Box>(&r)) {
        double m = 1.0;
        for (std::size_t k = 0; k < box->lo.size(); ++k) m *= box->hi[k] - box->lo[k];
        return m;
    }
    const auto& b = std::get<BallRegion>(r);
    return ball_volume(static_cast<int>(b.center.size()), b.radius);
}

inline bool region_contains(const ConvexRegion& r, const Point& x, const Topology& topo) {
    if (const auto* iv = std::get_if<Interval>(&r))
        return x.size() == 1 && x[0] >= iv->lo && x[0] <= iv->hi;
    if (const auto* arc = std::get_if<Arc>(&r)) {
        if (x.size() != 1 || !topo.is_circle()) return false;
        const double p = topo.perimeter;
        double off = std::fmod(topo.wrap(x[0]) - arc->start, p);
        if (off < 0.0) off += p;
        return off < arc->length;
    }
    if (const auto* box = std::get_if<Box>(&r)) {
        if (x.size() != box->lo.size()) return false;
        for (std::size_t k = 0; k < x.size(); ++k)
            if (x[k] < box->lo[k] || x[k] > box->hi[k]) return false;
        return true;
    }
    const auto& b = std::get<BallRegion>(r);
    return x.size() == b.center.size() && euclidean_distance(x, b.center) <= b.radius;
}

/// Largest distance from `from` to any point of the region (used for
/// Lipschitz constants of quadratic potentials on truncated supports).
inline double region_max_distance(const ConvexRegion& r, const Point& from,
                                  const Topology& topo) {
    if (const auto* iv = std::get_if<Interval>(&r))
        return std::max(std::abs(iv->lo - from[0]), std::abs(iv->hi - from[0]));
    if (const auto* arc = std::get_if<Arc>(&r)) {
        const double p = topo.perimeter;
        const double d1 = topo.dist1(arc->start, from[0]);
        const double d2 = topo.dist1(arc->start + arc->length, from[0]);
        // Antipode of `from` inside the arc caps the distance at P/2.
        Point antipode{topo.wrap(from[0] + 0.5 * p)};
        if (region_contains(r, antipode, topo)) return 0.5 * p;
        return std::max(d1, d2);
    }
    if (const auto* box = std::get_if<Box>(&r)) {
        double s = 0.0;
        for (std::size_t k = 0; k < box->lo.size(); ++k) {
            const double d = std::max(std::abs(box->lo[k] - from[k]),
                                      std::abs(box->hi[k] - from[k]));
            s += d * d;
        }
        return std::sqrt(s);
    }
    const auto& b = std::get<BallRegion>(r);
    return euclidean_distance(b.center, from) + b.radius;
}

/// Representative 1-D bounds: [lo, hi] for intervals, [start, start+length]
/// (unwrapped) for arcs. Throws for n-D regions.
inline std::pair<double, double> region_interval_bounds(const ConvexRegion& r) {
    if (const auto* iv = std::get_if<Interval>(&r)) return {iv->lo, iv->hi};
    if (const auto* arc = std::get_if<Arc>(&r)) return {arc->start, arc->start + arc->length};
    throw std::invalid_argument("region_interval_bounds: region is not one-dimensional");
}

inline double interval_overlap(double a_lo, double a_hi, double b_lo, double b_hi) {
    return std::max(0.0, std::min(a_hi, b_hi) - std::max(a_lo, b_lo));
}

}  // namespace swmc
