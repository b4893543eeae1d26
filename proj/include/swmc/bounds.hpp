#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "swmc/discretize.hpp"
#include "swmc/spectral.hpp"
#include "swmc/targets.hpp"

namespace swmc {

/// Outcome of one analytic-bound check. `holds` means the bound's
/// inequality direction is satisfied with 1e-9 slack; `context` carries the
/// parameters the check ran at.
struct BoundCheckResult {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    std::map<std::string, double> context;
};

inline constexpr double kBoundSlack = 1e-9;

/// Total-variation distance between two transition rows.
inline double tv_kernel_distance(const DiscretizedChain& chain, std::size_t i,
                                 std::size_t j) {
    const auto n = static_cast<std::size_t>(chain.pi.size());
    if (i >= n || j >= n) throw std::out_of_range("tv_kernel_distance: cell index");
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        s += std::abs(chain.T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) -
                      chain.T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)));
    return 0.5 * s;
}

namespace detail {

/// Distance between two grid cells, edge to edge (0 means touching).
inline double cell_gap(const GridSpec& grid, std::size_t i, std::size_t j) {
    const Topology& topo = grid.topology();
    if (grid.dimension() == 1) {
        const double d = topo.dist1(grid.center(i)[0], grid.center(j)[0]);
        return std::max(0.0, d - 0.5 * (grid.width(i) + grid.width(j)));
    }
    double s = 0.0;
    for (int k = 0; k < grid.dimension(); ++k) {
        const double d = std::abs(grid.center(i)[k] - grid.center(j)[k]) -
                         0.5 * (grid.width(i, k) + grid.width(j, k));
        if (d > 0.0) s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace detail

/// Isoperimetric inequality for a log-concave piece: with the piece's cells
/// split into K1, K2 and the separating remainder B,
///   pi(B) >= (ln 2 / M_pi) d(K1,K2) pi(K1) pi(K2).
/// K1 and K2 are grid-cell index sets; masses are renormalized over the
/// piece's cells; d is the edge-to-edge set distance.
inline BoundCheckResult isoperimetry_check(const LogConcavePiece& piece,
                                           const GridSpec& grid,
                                           const std::vector<std::size_t>& K1,
                                           const std::vector<std::size_t>& K2) {
    if (K1.empty() || K2.empty())
        throw std::invalid_argument("isoperimetry_check: K1 and K2 must be nonempty");
    const Topology& topo = grid.topology();
    std::vector<char> label(grid.size(), 0);  // 0 outside piece, 1 = B, 2 = K1, 3 = K2
    double total = 0.0;
    std::vector<double> cellmass(grid.size(), 0.0);
    for (std::size_t c = 0; c < grid.size(); ++c) {
        if (!region_contains(piece.region, grid.center(c), topo)) continue;
        label[c] = 1;
        cellmass[c] = std::exp(-piece.v(grid.center(c), topo)) * grid.measure(c);
        total += cellmass[c];
    }
    for (std::size_t c : K1) {
        if (c >= grid.size() || label[c] == 0)
            throw std::invalid_argument("isoperimetry_check: K1 cell outside the piece");
        label[c] = 2;
    }
    for (std::size_t c : K2) {
        if (c >= grid.size() || label[c] == 0)
            throw std::invalid_argument("isoperimetry_check: K2 cell outside the piece");
        if (label[c] == 2)
            throw std::invalid_argument("isoperimetry_check: K1 and K2 overlap");
        label[c] = 3;
    }
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t a : K1)
        for (std::size_t b : K2) d = std::min(d, detail::cell_gap(grid, a, b));
    if (!(d > 0.0))
        throw std::invalid_argument("isoperimetry_check: K1 and K2 must be separated");

    double m1 = 0.0, m2 = 0.0, mb = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        if (label[c] == 1) mb += cellmass[c];
        if (label[c] == 2) m1 += cellmass[c];
        if (label[c] == 3) m2 += cellmass[c];
    }
    m1 /= total;
    m2 /= total;
    mb /= total;
    const double moment = first_abs_centered_moment(piece, grid);

    BoundCheckResult r;
    r.name = "isoperimetry";
    r.lhs = mb;
    r.rhs = std::numbers::ln2 / moment * d * m1 * m2;
    r.holds = r.lhs >= r.rhs - kBoundSlack;
    r.context = {{"d", d}, {"M", moment}, {"pi_K1", m1}, {"pi_K2", m2},
                 {"N", static_cast<double>(grid.size())}};
    return r;
}

/// Right-hand side of the ball-walk conductance bound,
/// delta e^{-alpha delta} / (1024 sqrt(n) M).
inline double ballwalk_bound_rhs(double alpha, double delta, int n, double moment) {
    return delta * std::exp(-alpha * delta) /
           (1024.0 * std::sqrt(static_cast<double>(n)) * moment);
}

/// Exact conductance of a single-mode ball walk against the isoperimetric
/// lower bound. Runs only at delta <= 1/alpha (the regime the bound is
/// stated for; the optimal delta sits at that edge) and needs N <= 20 for
/// exact enumeration.
inline BoundCheckResult ballwalk_conductance_bound(const LogConcavePiece& piece,
                                                   double delta, const GridSpec& grid) {
    const int n = region_dimension(piece.region);
    const double alpha = piece.smoothness_alpha;
    if (!(alpha > 0.0))
        throw std::invalid_argument("ballwalk_conductance_bound: piece has no smoothness bound");
    if (delta > 1.0 / alpha * (1.0 + 1e-12))
        throw std::invalid_argument("ballwalk_conductance_bound: requires delta <= 1/alpha");
    if (grid.size() > 20)
        throw std::invalid_argument(
            "ballwalk_conductance_bound: exact conductance requires N <= 20");
    const TargetDensity target(n, Topology::flat(), {piece});
    const auto kernel = ProposalKernel::ball(delta, n);
    const DiscretizedChain chain = discretize(target, kernel, grid);
    const double moment = first_abs_centered_moment(piece, grid);

    BoundCheckResult r;
    r.name = "ballwalk-conductance";
    r.lhs = conductance(chain, ConductanceMode::Exact).first;
    r.rhs = ballwalk_bound_rhs(alpha, delta, n, moment);
    r.holds = r.lhs >= r.rhs - kBoundSlack;
    r.context = {{"alpha", alpha}, {"delta", delta}, {"n", static_cast<double>(n)},
                 {"M", moment}, {"N", static_cast<double>(grid.size())}};
    return r;
}

namespace detail {

inline std::vector<std::size_t> mode_cells(const GridSpec& grid, double L) {
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid.center(i)[0]) < L) cells.push_back(i);
    return cells;
}

inline double grid_normalizer(const TargetDensity& target, const GridSpec& grid) {
    double z = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        z += std::exp(target.log_density(grid.center(i))) * grid.measure(i);
    return 1.0 / z;
}

}  // namespace detail

/// Slow-mixing ceiling for the local delta-ball chain on the two-mode
/// circle target: eigensolved gap <= 4 c e^{-nu(L-delta)}, with c from the
/// grid normalization. Also records the direct flow bound 2 h(mode cut).
inline BoundCheckResult local_gap_upper_1d(double L, double nu, double delta,
                                           std::size_t bins) {
    if (!(delta < L))
        throw std::invalid_argument("local_gap_upper_1d: requires delta < L");
    const double cell = 4.0 * L / static_cast<double>(bins);
    if (delta < 4.0 * cell)
        throw std::invalid_argument(
            "local_gap_upper_1d: grid too coarse; delta must span >= 4 cells");
    const TargetDensity target = two_mode_circle_target(L, nu);
    const auto kernel = ProposalKernel::ball(delta, 1, target.topology());
    const DiscretizedChain chain = discretize(target, kernel, grid_covering(target, bins));
    const double c = detail::grid_normalizer(target, chain.grid) / nu;

    BoundCheckResult r;
    r.name = "local-gap-upper";
    r.lhs = spectral_gap(chain).gap;
    r.rhs = 4.0 * c * std::exp(-nu * (L - delta));
    r.holds = r.lhs <= r.rhs + kBoundSlack;
    r.context = {{"L", L}, {"nu", nu}, {"delta", delta},
                 {"N", static_cast<double>(bins)}, {"c", c},
                 {"two_h_mode_cut",
                  2.0 * conductance_of_set(chain, detail::mode_cells(chain.grid, L))}};
    return r;
}

struct SmallWorldGapBounds {
    BoundCheckResult full;        // gap >= s(1-s)^2 delta^2 nu e^{-2 nu delta} / (2^23 L)
    BoundCheckResult restricted;  // restricted gap >= (1-s)^2 delta^2 nu^2 e^{-2 nu delta} / 2^21
};

/// Rapid-mixing floor for the small-world chain (uniform heavy tail
/// h = 1/(4L)) and for its restriction to one mode. Requires nu L >= 2.
inline SmallWorldGapBounds smallworld_gap_lower_1d(double L, double nu, double delta,
                                                   double s, std::size_t bins) {
    if (!(nu * L >= 2.0))
        throw std::invalid_argument("smallworld_gap_lower_1d: requires nu L >= 2");
    const TargetDensity target = two_mode_circle_target(L, nu);
    const auto kernel =
        ProposalKernel::mixture(ProposalKernel::ball(delta, 1, target.topology()),
                                ProposalKernel::uniform_on_support(target), s);
    const DiscretizedChain chain = discretize(target, kernel, grid_covering(target, bins));

    SmallWorldGapBounds out;
    out.full.name = "smallworld-gap-lower";
    out.full.lhs = spectral_gap(chain).gap;
    out.full.rhs = s * (1.0 - s) * (1.0 - s) * delta * delta * nu *
                   std::exp(-2.0 * nu * delta) / (std::exp2(23.0) * L);
    out.full.holds = out.full.lhs >= out.full.rhs - kBoundSlack;
    out.full.context = {{"L", L}, {"nu", nu}, {"delta", delta}, {"s", s},
                        {"N", static_cast<double>(bins)}};

    const DiscretizedChain restricted =
        restrict_chain(chain, detail::mode_cells(chain.grid, L));
    out.restricted.name = "restricted-gap-lower";
    out.restricted.lhs = spectral_gap(restricted).gap;
    out.restricted.rhs = (1.0 - s) * (1.0 - s) * delta * delta * nu * nu *
                         std::exp(-2.0 * nu * delta) / std::exp2(21.0);
    out.restricted.holds = out.restricted.lhs >= out.restricted.rhs - kBoundSlack;
    out.restricted.context = out.full.context;
    return out;
}

}  // namespace swmc
