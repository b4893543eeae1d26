#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "swmc/geometry.hpp"
#include "swmc/grid.hpp"

namespace swmc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// One log-concave mode: unnormalized density exp(-V) on a convex region,
/// with V convex and alpha-Lipschitz. The decay exponent nu is a declared
/// attribute (for exponential potentials it equals the rate; pieces whose
/// density does not decay, e.g. uniform, carry nu = 0 and are skipped by
/// tail-sensitive bound checks).
struct LogConcavePiece {
    enum class Family { Exponential, Gaussian, Uniform, PolylineV, Custom };

    ConvexRegion region;
    Family family = Family::Uniform;
    Point barycenter;
    double smoothness_alpha = 0.0;
    double decay_exponent_nu = 0.0;
    double rate = 0.0;   // Exponential: V = rate * dist(x, barycenter)
    double scale = 1.0;  // Gaussian: V = dist^2 / (2 scale^2)
    std::vector<double> knots_x;  // PolylineV (flat 1-D)
    std::vector<double> knots_v;
    std::function<double(const Point&)> custom_v;
    double log_weight = 0.0;

    static LogConcavePiece exponential(ConvexRegion region, Point barycenter, double rate,
                                       double nu = -1.0) {
        if (!(rate > 0.0)) throw std::invalid_argument("exponential piece: rate must be positive");
        LogConcavePiece p;
        p.region = std::move(region);
        p.family = Family::Exponential;
        p.barycenter = std::move(barycenter);
        p.rate = rate;
        p.smoothness_alpha = rate;
        p.decay_exponent_nu = nu > 0.0 ? nu : rate;
        return p;
    }

    static LogConcavePiece gaussian(ConvexRegion region, Point barycenter, double sigma,
                                    double nu, const Topology& topo = Topology::flat()) {
        if (!(sigma > 0.0)) throw std::invalid_argument("gaussian piece: sigma must be positive");
        LogConcavePiece p;
        p.region = std::move(region);
        p.family = Family::Gaussian;
        p.barycenter = std::move(barycenter);
        p.scale = sigma;
        p.smoothness_alpha =
            region_max_distance(p.region, p.barycenter, topo) / (sigma * sigma);
        p.decay_exponent_nu = nu;
        return p;
    }

    static LogConcavePiece uniform(ConvexRegion region, Point barycenter, double nu = 0.0) {
        LogConcavePiece p;
        p.region = std::move(region);
        p.family = Family::Uniform;
        p.barycenter = std::move(barycenter);
        p.smoothness_alpha = 0.0;
        p.decay_exponent_nu = nu;
        return p;
    }

    /// Convex piecewise-linear potential on a flat interval; knots must span
    /// the region and slopes must be nondecreasing.
    static LogConcavePiece polyline(Interval region, Point barycenter,
                                    std::vector<double> xs, std::vector<double> vs,
                                    double nu) {
        if (xs.size() < 2 || xs.size() != vs.size())
            throw std::invalid_argument("polyline piece: need matching knot lists, >= 2 knots");
        double prev_slope = kNegInf, max_abs_slope = 0.0;
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            if (!(xs[k + 1] > xs[k]))
                throw std::invalid_argument("polyline piece: knot abscissae must increase");
            const double slope = (vs[k + 1] - vs[k]) / (xs[k + 1] - xs[k]);
            if (slope < prev_slope - 1e-12)
                throw std::invalid_argument("polyline piece: potential is not convex");
            prev_slope = slope;
            max_abs_slope = std::max(max_abs_slope, std::abs(slope));
        }
        if (region.lo < xs.front() - 1e-12 || region.hi > xs.back() + 1e-12)
            throw std::invalid_argument("polyline piece: knots must span the region");
        LogConcavePiece p;
        p.region = region;
        p.family = Family::PolylineV;
        p.barycenter = std::move(barycenter);
        p.knots_x = std::move(xs);
        p.knots_v = std::move(vs);
        p.smoothness_alpha = max_abs_slope;
        p.decay_exponent_nu = nu;
        return p;
    }

    static LogConcavePiece custom(ConvexRegion region, Point barycenter,
                                  std::function<double(const Point&)> potential,
                                  double alpha, double nu) {
        LogConcavePiece p;
        p.region = std::move(region);
        p.family = Family::Custom;
        p.barycenter = std::move(barycenter);
        p.custom_v = std::move(potential);
        p.smoothness_alpha = alpha;
        p.decay_exponent_nu = nu;
        return p;
    }

    /// Potential V(x); callers ensure x lies in the region.
    double v(const Point& x, const Topology& topo) const {
        switch (family) {
            case Family::Exponential:
                return rate * topo.distance(x, barycenter);
            case Family::Gaussian: {
                const double d = topo.distance(x, barycenter);
                return 0.5 * d * d / (scale * scale);
            }
            case Family::Uniform:
                return 0.0;
            case Family::PolylineV: {
                const double t = x[0];
                auto it = std::upper_bound(knots_x.begin(), knots_x.end(), t);
                std::size_t k = it == knots_x.begin()
                                    ? 0
                                    : static_cast<std::size_t>(it - knots_x.begin()) - 1;
                k = std::min(k, knots_x.size() - 2);
                const double f = (t - knots_x[k]) / (knots_x[k + 1] - knots_x[k]);
                return knots_v[k] + f * (knots_v[k + 1] - knots_v[k]);
            }
            case Family::Custom:
                return custom_v(x);
        }
        return 0.0;
    }
};

/// A multi-modal unnormalized target: ordered log-concave pieces on
/// pairwise-disjoint regions. Densities are kept unnormalized throughout;
/// every downstream operation works with ratios or renormalizes on a grid.
class TargetDensity {
public:
    TargetDensity(int dimension, Topology topo, std::vector<LogConcavePiece> pieces)
        : dim_(dimension), topo_(topo), pieces_(std::move(pieces)) {
        if (pieces_.empty()) throw std::invalid_argument("TargetDensity: no pieces");
        for (const auto& p : pieces_) {
            if (region_dimension(p.region) != dim_ ||
                static_cast<int>(p.barycenter.size()) != dim_)
                throw std::invalid_argument("TargetDensity: piece dimension mismatch");
            if (!region_contains(p.region, topo_.canonical(p.barycenter), topo_))
                throw std::invalid_argument("TargetDensity: barycenter outside its region");
        }
        check_disjoint();
    }

    int dimension() const { return dim_; }
    const Topology& topology() const { return topo_; }
    const std::vector<LogConcavePiece>& pieces() const { return pieces_; }

    /// Index of the first piece containing x, or -1 off support.
    std::ptrdiff_t piece_index(const Point& x) const {
        const Point c = topo_.canonical(x);
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            if (region_contains(pieces_[i].region, c, topo_))
                return static_cast<std::ptrdiff_t>(i);
        return -1;
    }

    /// Log of the unnormalized density; -inf off support.
    double log_density(const Point& x) const {
        if (static_cast<int>(x.size()) != dim_)
            throw std::invalid_argument("TargetDensity: point dimension mismatch");
        const Point c = topo_.canonical(x);
        for (const auto& p : pieces_)
            if (region_contains(p.region, c, topo_)) return -p.v(c, topo_) + p.log_weight;
        return kNegInf;
    }

    double support_measure() const {
        double m = 0.0;
        for (const auto& p : pieces_) m += region_measure(p.region);
        return m;
    }

    double max_pairwise_barycenter_distance() const {
        double d = 0.0;
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            for (std::size_t j = i + 1; j < pieces_.size(); ++j)
                d = std::max(d, topo_.distance(pieces_[i].barycenter, pieces_[j].barycenter));
        return d;
    }

private:
    void check_disjoint() const {
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            for (std::size_t j = i + 1; j < pieces_.size(); ++j)
                if (regions_overlap(pieces_[i].region, pieces_[j].region))
                    throw std::invalid_argument("TargetDensity: piece regions overlap");
    }

    bool regions_overlap(const ConvexRegion& a, const ConvexRegion& b) const {
        if (dim_ == 1) {
            auto [alo, ahi] = region_interval_bounds(a);
            auto [blo, bhi] = region_interval_bounds(b);
            if (!topo_.is_circle()) return interval_overlap(alo, ahi, blo, bhi) > 1e-12;
            const double p = topo_.perimeter;
            for (int k = -1; k <= 1; ++k)
                if (interval_overlap(alo + k * p, ahi + k * p, blo, bhi) > 1e-12) return true;
            return false;
        }
        const auto* abox = std::get_if<Box>(&a);
        const auto* bbox = std::get_if<Box>(&b);
        if (abox && bbox) {
            double m = 1.0;
            for (std::size_t k = 0; k < abox->lo.size(); ++k)
                m *= interval_overlap(abox->lo[k], abox->hi[k], bbox->lo[k], bbox->hi[k]);
            return m > 1e-12;
        }
        // Ball pieces are only used as single-piece targets; a conservative
        // bounding check is enough for mixed kinds.
        return true;
    }

    int dim_;
    Topology topo_;
    std::vector<LogConcavePiece> pieces_;
};

inline double eval_unnorm_log_density(const TargetDensity& target, const Point& x) {
    return target.log_density(x);
}

/// Two-mode circle target: perimeter 4L, exponential modes of rate nu with
/// barycenters at 0 and the identified point +-2L, valley floors at +-L.
inline TargetDensity two_mode_circle_target(double L, double nu) {
    if (!(L > 0.0) || !(nu > 0.0))
        throw std::invalid_argument("two_mode_circle_target: L and nu must be positive");
    const Topology topo = Topology::circle(4.0 * L);
    std::vector<LogConcavePiece> pieces;
    pieces.push_back(LogConcavePiece::exponential(Arc{-L, 2.0 * L}, point1(0.0), nu));
    pieces.push_back(LogConcavePiece::exponential(Arc{L, 2.0 * L}, point1(-2.0 * L), nu));
    return TargetDensity(1, topo, std::move(pieces));
}

/// M_pi = sum |x_i - beta| pi_i over the grid cells inside the piece region,
/// with weights renormalized over those cells.
inline double first_abs_centered_moment(const LogConcavePiece& piece, const GridSpec& grid) {
    const Topology& topo = grid.topology();
    double mass = 0.0, moment = 0.0, covered = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point& c = grid.center(i);
        if (!region_contains(piece.region, c, topo)) continue;
        covered += grid.measure(i);
        const double w = std::exp(-piece.v(c, topo)) * grid.measure(i);
        mass += w;
        moment += w * topo.distance(c, piece.barycenter);
    }
    const double target_measure = region_measure(piece.region);
    if (mass <= 0.0 || covered < 0.98 * target_measure)
        throw std::invalid_argument("first_abs_centered_moment: grid does not cover the region");
    return moment / mass;
}

/// Grid-weighted barycenter estimate of a piece (for validation).
inline Point estimated_barycenter(const LogConcavePiece& piece, const GridSpec& grid) {
    const Topology& topo = grid.topology();
    const int dim = grid.dimension();
    Point acc(dim, 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point& c = grid.center(i);
        if (!region_contains(piece.region, c, topo)) continue;
        const double w = std::exp(-piece.v(c, topo)) * grid.measure(i);
        mass += w;
        if (topo.is_circle()) {
            // Average signed offsets from the declared barycenter so that the
            // estimate is wrap-consistent.
            acc[0] += w * topo.wrap_diff(c[0] - piece.barycenter[0]);
        } else {
            for (int k = 0; k < dim; ++k) acc[k] += w * c[k];
        }
    }
    if (mass <= 0.0) throw std::invalid_argument("estimated_barycenter: empty piece");
    for (int k = 0; k < dim; ++k) acc[k] /= mass;
    if (topo.is_circle()) acc[0] = topo.wrap(acc[0] + piece.barycenter[0]);
    return acc;
}

/// Grid covering the whole support: one segment per region in 1-D (bins
/// split proportionally to length), a tensor grid over the box in 2-D.
inline GridSpec grid_covering(const TargetDensity& target, std::size_t bins) {
    if (bins == 0) throw std::invalid_argument("grid_covering: bins must be positive");
    const Topology& topo = target.topology();
    if (target.dimension() == 1) {
        if (topo.is_circle()) return GridSpec::circle_1d(topo.perimeter, bins);
        std::vector<std::pair<double, double>> intervals;
        for (const auto& p : target.pieces()) intervals.push_back(region_interval_bounds(p.region));
        std::sort(intervals.begin(), intervals.end());
        double total = 0.0;
        for (auto& iv : intervals) total += iv.second - iv.first;
        std::vector<std::size_t> counts(intervals.size(), 0);
        std::size_t assigned = 0;
        for (std::size_t s = 0; s + 1 < intervals.size(); ++s) {
            counts[s] = std::max<std::size_t>(
                1, static_cast<std::size_t>(
                       std::lround(static_cast<double>(bins) *
                                   (intervals[s].second - intervals[s].first) / total)));
            assigned += counts[s];
        }
        if (assigned + 1 > bins)
            throw std::invalid_argument("grid_covering: too few bins for the piece layout");
        counts.back() = bins - assigned;
        return GridSpec::from_segments_1d(intervals, counts, topo);
    }
    if (target.dimension() == 2 && target.pieces().size() == 1) {
        const auto* box = std::get_if<Box>(&target.pieces()[0].region);
        if (box) {
            const double xlen = box->hi[0] - box->lo[0], ylen = box->hi[1] - box->lo[1];
            const auto nx = std::max<std::size_t>(
                1, static_cast<std::size_t>(
                       std::lround(std::sqrt(static_cast<double>(bins) * xlen / ylen))));
            const auto ny = std::max<std::size_t>(1, bins / nx);
            return GridSpec::tensor_2d(box->lo[0], box->hi[0], nx, box->lo[1], box->hi[1], ny);
        }
    }
    throw std::invalid_argument("grid_covering: unsupported target layout");
}

}  // namespace swmc
