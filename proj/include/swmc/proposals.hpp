#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "swmc/geometry.hpp"
#include "swmc/rng.hpp"
#include "swmc/targets.hpp"

namespace swmc {

namespace detail {

/// Area of the disk |p - c| <= r intersected with [x1,x2] x [y1,y2].
/// Exact: the x-range is split at every ordinate where the chord
/// sqrt(r^2 - x^2) crosses a box edge, and each smooth piece is integrated
/// in closed form.
inline double disk_box_overlap(double cx, double cy, double r,
                               double x1, double x2, double y1, double y2) {
    x1 -= cx; x2 -= cx; y1 -= cy; y2 -= cy;
    const double a = std::max(x1, -r), b = std::min(x2, r);
    if (!(b > a)) return 0.0;
    std::vector<double> pts{a, b};
    for (double yy : {y1, y2}) {
        if (std::abs(yy) < r) {
            const double x = std::sqrt(r * r - yy * yy);
            if (x > a && x < b) pts.push_back(x);
            if (-x > a && -x < b) pts.push_back(-x);
        }
    }
    std::sort(pts.begin(), pts.end());
    const auto antideriv = [r](double x) {
        x = std::clamp(x, -r, r);
        return 0.5 * (x * std::sqrt(std::max(0.0, r * r - x * x)) +
                      r * r * std::asin(std::clamp(x / r, -1.0, 1.0)));
    };
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double p = pts[k], q = pts[k + 1];
        if (!(q > p)) continue;
        const double m = 0.5 * (p + q);
        const double g = std::sqrt(std::max(0.0, r * r - m * m));
        const double top = std::min(y2, g), bot = std::max(y1, -g);
        if (!(top > bot)) continue;
        const bool top_curved = g < y2;
        const bool bot_curved = -g > y1;
        const double gi = antideriv(q) - antideriv(p);
        if (top_curved && bot_curved)
            area += 2.0 * gi;
        else if (top_curved)
            area += gi - y1 * (q - p);
        else if (bot_curved)
            area += y2 * (q - p) + gi;
        else
            area += (y2 - y1) * (q - p);
    }
    return area;
}

/// Mass of the bivariate Cauchy (half width b, centered at the origin) over
/// the quadrant (-inf, x] x (-inf, y] relative to the half-plane split --
/// the signed corner function whose 4-corner combination gives box masses.
inline double cauchy2_corner(double x, double y, double b) {
    return std::atan(x * y / (b * std::sqrt(x * x + y * y + b * b))) /
           (2.0 * std::numbers::pi);
}

}  // namespace detail

/// Symmetric proposal kernel: uniform ball of radius delta, Cauchy with a
/// given half width (wrapped exactly on circle topologies), uniform over a
/// target's support, or a small-world mixture (1-s) local + s heavy.
/// Kernels carry a density evaluator, a sampler, and exact cell-mass
/// integrals used by the grid discretization.
class ProposalKernel {
public:
    enum class Kind { Ball, Cauchy, UniformSupport, Mixture };

    static ProposalKernel ball(double delta, int dimension,
                               Topology topo = Topology::flat()) {
        if (!(delta > 0.0)) throw std::invalid_argument("ball kernel: delta must be positive");
        if (topo.is_circle() && delta > 0.5 * topo.perimeter)
            throw std::invalid_argument("ball kernel: delta exceeds half the perimeter");
        ProposalKernel k;
        k.kind_ = Kind::Ball;
        k.dim_ = dimension;
        k.topo_ = topo;
        k.delta_ = delta;
        return k;
    }

    static ProposalKernel cauchy(double half_width, int dimension,
                                 Topology topo = Topology::flat()) {
        if (!(half_width > 0.0))
            throw std::invalid_argument("cauchy kernel: half width must be positive");
        ProposalKernel k;
        k.kind_ = Kind::Cauchy;
        k.dim_ = dimension;
        k.topo_ = topo;
        k.b_ = half_width;
        return k;
    }

    static ProposalKernel uniform_on_support(const TargetDensity& target) {
        ProposalKernel k;
        k.kind_ = Kind::UniformSupport;
        k.dim_ = target.dimension();
        k.topo_ = target.topology();
        for (const auto& p : target.pieces()) k.support_.push_back(p.region);
        k.support_measure_ = target.support_measure();
        return k;
    }

    static ProposalKernel mixture(ProposalKernel local, ProposalKernel heavy, double s) {
        if (!(s > 0.0 && s < 1.0))
            throw std::invalid_argument(
                "mixture kernel: s must lie strictly in (0,1); use the plain kernels for s=0,1");
        if (local.dim_ != heavy.dim_ || !(local.topo_ == heavy.topo_))
            throw std::invalid_argument("mixture kernel: component spaces differ");
        ProposalKernel k;
        k.kind_ = Kind::Mixture;
        k.dim_ = local.dim_;
        k.topo_ = local.topo_;
        k.s_ = s;
        k.local_ = std::make_shared<ProposalKernel>(std::move(local));
        k.heavy_ = std::make_shared<ProposalKernel>(std::move(heavy));
        return k;
    }

    Kind kind() const { return kind_; }
    int dimension() const { return dim_; }
    const Topology& topology() const { return topo_; }
    double delta() const { return delta_; }
    double half_width() const { return b_; }
    double mixture_weight() const { return s_; }
    const ProposalKernel& local() const { return *local_; }
    const ProposalKernel& heavy() const { return *heavy_; }

    /// Smallest ball radius appearing in the kernel tree (0 if none); the
    /// discretization requires it to cover at least one grid cell.
    double min_ball_delta() const {
        switch (kind_) {
            case Kind::Ball: return delta_;
            case Kind::Mixture: {
                const double a = local_->min_ball_delta(), b = heavy_->min_ball_delta();
                if (a == 0.0) return b;
                if (b == 0.0) return a;
                return std::min(a, b);
            }
            default: return 0.0;
        }
    }

    double density(const Point& x, const Point& y) const {
        switch (kind_) {
            case Kind::Ball: {
                const double d = topo_.distance(x, y);
                return d <= delta_ ? 1.0 / ball_volume(dim_, delta_) : 0.0;
            }
            case Kind::Cauchy: {
                if (topo_.is_circle()) {
                    const double p = topo_.perimeter;
                    const double rho = std::exp(-2.0 * std::numbers::pi * b_ / p);
                    const double th = 2.0 * std::numbers::pi * topo_.wrap_diff(y[0] - x[0]) / p;
                    return (1.0 - rho * rho) /
                           (p * (1.0 + rho * rho - 2.0 * rho * std::cos(th)));
                }
                const double d = euclidean_distance(x, y);
                const double n = static_cast<double>(dim_);
                const double cn = std::tgamma(0.5 * (n + 1.0)) /
                                  std::pow(std::numbers::pi, 0.5 * (n + 1.0));
                return cn * b_ / std::pow(d * d + b_ * b_, 0.5 * (n + 1.0));
            }
            case Kind::UniformSupport: {
                for (const auto& r : support_)
                    if (region_contains(r, topo_.canonical(y), topo_))
                        return 1.0 / support_measure_;
                return 0.0;
            }
            case Kind::Mixture:
                return (1.0 - s_) * local_->density(x, y) + s_ * heavy_->density(x, y);
        }
        return 0.0;
    }

    Point propose(const Point& x, RandomStream& rng) const {
        switch (kind_) {
            case Kind::Ball: {
                Point y = x;
                if (dim_ == 1) {
                    y[0] += rng.uniform(-delta_, delta_);
                } else {
                    Point dir(dim_);
                    double norm = 0.0;
                    do {
                        norm = 0.0;
                        for (int k = 0; k < dim_; ++k) {
                            dir[k] = rng.normal();
                            norm += dir[k] * dir[k];
                        }
                    } while (norm == 0.0);
                    norm = std::sqrt(norm);
                    const double r =
                        delta_ * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim_));
                    for (int k = 0; k < dim_; ++k) y[k] += r * dir[k] / norm;
                }
                return topo_.canonical(std::move(y));
            }
            case Kind::Cauchy: {
                Point y = x;
                if (dim_ == 1) {
                    y[0] += b_ * rng.cauchy();
                } else {
                    // Multivariate Cauchy: Gaussian direction over an
                    // independent half-normal scale.
                    double z0 = 0.0;
                    do {
                        z0 = rng.normal();
                    } while (z0 == 0.0);
                    for (int k = 0; k < dim_; ++k) y[k] += b_ * rng.normal() / std::abs(z0);
                }
                return topo_.canonical(std::move(y));
            }
            case Kind::UniformSupport: {
                double pick = rng.uniform01() * support_measure_;
                std::size_t idx = 0;
                for (; idx + 1 < support_.size(); ++idx) {
                    const double m = region_measure(support_[idx]);
                    if (pick < m) break;
                    pick -= m;
                }
                return topo_.canonical(sample_in_region(support_[idx], rng));
            }
            case Kind::Mixture: {
                const bool heavy = rng.uniform01() < s_;
                return heavy ? heavy_->propose(x, rng) : local_->propose(x, rng);
            }
        }
        return x;
    }

    /// Exact kernel mass of the interval [lo, hi] as seen from x (1-D).
    /// On circles, [lo, hi] is a canonical-coordinate cell and the mass sums
    /// over its wrapped images.
    double interval_mass(double x, double lo, double hi) const {
        if (dim_ != 1) throw std::logic_error("interval_mass: kernel is not 1-D");
        switch (kind_) {
            case Kind::Ball: {
                const auto cdf = [this](double u) {
                    return (std::clamp(u, -delta_, delta_) + delta_) / (2.0 * delta_);
                };
                return offset_mass(x, lo, hi, cdf);
            }
            case Kind::Cauchy: {
                if (topo_.is_circle()) {
                    const double p = topo_.perimeter;
                    const double rho = std::exp(-2.0 * std::numbers::pi * b_ / p);
                    const double q = (1.0 + rho) / (1.0 - rho);
                    const auto cdf = [p, q](double u) {
                        u = std::clamp(u, -0.5 * p, 0.5 * p);
                        return 0.5 + std::atan(q * std::tan(std::numbers::pi * u / p)) /
                                         std::numbers::pi;
                    };
                    return offset_mass(x, lo, hi, cdf);
                }
                return (std::atan((hi - x) / b_) - std::atan((lo - x) / b_)) /
                       std::numbers::pi;
            }
            case Kind::UniformSupport: {
                double m = 0.0;
                for (const auto& r : support_) {
                    auto [rlo, rhi] = region_interval_bounds(r);
                    if (topo_.is_circle()) {
                        const double p = topo_.perimeter;
                        for (int k = -1; k <= 1; ++k)
                            m += interval_overlap(lo + k * p, hi + k * p, rlo, rhi);
                    } else {
                        m += interval_overlap(lo, hi, rlo, rhi);
                    }
                }
                return m / support_measure_;
            }
            case Kind::Mixture:
                return (1.0 - s_) * local_->interval_mass(x, lo, hi) +
                       s_ * heavy_->interval_mass(x, lo, hi);
        }
        return 0.0;
    }

    /// Exact kernel mass of the box [lo, hi] as seen from x (2-D, flat).
    double box_mass(const Point& x, const Point& lo, const Point& hi) const {
        if (dim_ != 2 || topo_.is_circle())
            throw std::logic_error("box_mass: needs a flat 2-D kernel");
        switch (kind_) {
            case Kind::Ball:
                return detail::disk_box_overlap(x[0], x[1], delta_, lo[0], hi[0], lo[1], hi[1]) /
                       ball_volume(2, delta_);
            case Kind::Cauchy: {
                const double x1 = lo[0] - x[0], x2 = hi[0] - x[0];
                const double y1 = lo[1] - x[1], y2 = hi[1] - x[1];
                return detail::cauchy2_corner(x2, y2, b_) - detail::cauchy2_corner(x1, y2, b_) -
                       detail::cauchy2_corner(x2, y1, b_) + detail::cauchy2_corner(x1, y1, b_);
            }
            case Kind::UniformSupport: {
                double m = 0.0;
                for (const auto& r : support_) {
                    if (const auto* box = std::get_if<Box>(&r)) {
                        m += interval_overlap(lo[0], hi[0], box->lo[0], box->hi[0]) *
                             interval_overlap(lo[1], hi[1], box->lo[1], box->hi[1]);
                    } else if (const auto* b = std::get_if<BallRegion>(&r)) {
                        m += detail::disk_box_overlap(b->center[0], b->center[1], b->radius,
                                                      lo[0], hi[0], lo[1], hi[1]);
                    } else {
                        throw std::logic_error("box_mass: unsupported support region");
                    }
                }
                return m / support_measure_;
            }
            case Kind::Mixture:
                return (1.0 - s_) * local_->box_mass(x, lo, hi) + s_ * heavy_->box_mass(x, lo, hi);
        }
        return 0.0;
    }

private:
    ProposalKernel() = default;

    /// Integrates a displacement CDF over the cell [lo, hi] seen from x,
    /// summing wrapped images on circles.
    template <class Cdf>
    double offset_mass(double x, double lo, double hi, const Cdf& cdf) const {
        if (!topo_.is_circle()) return cdf(hi - x) - cdf(lo - x);
        const double p = topo_.perimeter;
        double m = 0.0;
        for (int k = -1; k <= 1; ++k) {
            const double a = std::max(lo - x + k * p, -0.5 * p);
            const double b = std::min(hi - x + k * p, 0.5 * p);
            if (b > a) m += cdf(b) - cdf(a);
        }
        return m;
    }

    Point sample_in_region(const ConvexRegion& r, RandomStream& rng) const {
        if (const auto* iv = std::get_if<Interval>(&r)) return point1(rng.uniform(iv->lo, iv->hi));
        if (const auto* arc = std::get_if<Arc>(&r))
            return point1(arc->start + rng.uniform01() * arc->length);
        if (const auto* box = std::get_if<Box>(&r)) {
            Point y(box->lo.size());
            for (std::size_t k = 0; k < y.size(); ++k) y[k] = rng.uniform(box->lo[k], box->hi[k]);
            return y;
        }
        const auto& b = std::get<BallRegion>(r);
        const int n = static_cast<int>(b.center.size());
        Point dir(n);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (int k = 0; k < n; ++k) {
                dir[k] = rng.normal();
                norm += dir[k] * dir[k];
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        const double rad = b.radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(n));
        Point y = b.center;
        for (int k = 0; k < n; ++k) y[k] += rad * dir[k] / norm;
        return y;
    }

    Kind kind_ = Kind::Ball;
    int dim_ = 1;
    Topology topo_ = Topology::flat();
    double delta_ = 0.0;
    double b_ = 0.0;
    double s_ = 0.0;
    std::shared_ptr<const ProposalKernel> local_, heavy_;
    std::vector<ConvexRegion> support_;
    double support_measure_ = 0.0;
};

inline Point propose(const ProposalKernel& kernel, const Point& x, RandomStream& rng) {
    return kernel.propose(x, rng);
}

inline double eval_density(const ProposalKernel& kernel, const Point& x, const Point& y) {
    return kernel.density(x, y);
}

}  // namespace swmc
