#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "swmc/bounds.hpp"
#include "swmc/chain.hpp"
#include "swmc/discretize.hpp"
#include "swmc/spectral.hpp"

namespace swmc {

/// Renormalized grid target weights.
inline Eigen::VectorXd grid_target_weights(const TargetDensity& target, const GridSpec& grid) {
    Eigen::VectorXd pi(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i)
        pi(static_cast<Eigen::Index>(i)) =
            std::exp(target.log_density(grid.center(i))) * grid.measure(i);
    pi /= pi.sum();
    return pi;
}

/// Stationary mass of each target piece on the grid.
inline std::vector<double> grid_mode_masses(const TargetDensity& target, const GridSpec& grid) {
    const Eigen::VectorXd pi = grid_target_weights(target, grid);
    std::vector<double> masses(target.pieces().size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto p = target.piece_index(grid.center(i));
        if (p >= 0) masses[static_cast<std::size_t>(p)] += pi(static_cast<Eigen::Index>(i));
    }
    return masses;
}

/// Fraction of states in each target piece.
inline std::vector<double> mode_occupancy(const std::vector<Point>& states,
                                          const TargetDensity& target) {
    std::vector<double> occ(target.pieces().size(), 0.0);
    if (states.empty()) return occ;
    for (const auto& s : states) {
        const auto p = target.piece_index(s);
        if (p >= 0) occ[static_cast<std::size_t>(p)] += 1.0;
    }
    for (double& v : occ) v /= static_cast<double>(states.size());
    return occ;
}

/// Total-variation distance between the trace's cell histogram and the
/// renormalized grid target. States outside the grid count against the fit.
inline double tv_distance_to_target(const Trace& trace, const TargetDensity& target,
                                    const GridSpec& grid) {
    if (trace.states.empty())
        throw std::invalid_argument("tv_distance_to_target: empty trace");
    const Eigen::VectorXd pi = grid_target_weights(target, grid);
    Eigen::VectorXd hist = Eigen::VectorXd::Zero(pi.size());
    double off_grid = 0.0;
    const double w = 1.0 / static_cast<double>(trace.states.size());
    for (const auto& s : trace.states) {
        const auto c = grid.locate(s);
        if (c < 0)
            off_grid += w;
        else
            hist(static_cast<Eigen::Index>(c)) += w;
    }
    return 0.5 * ((hist - pi).cwiseAbs().sum() + off_grid);
}

/// Matrix-power contraction check: with gamma = ||P0||, the pi-weighted L2
/// distance of mu0 P^n from pi must satisfy
/// ||mu0 P^n - pi|| <= gamma^n ||mu0 - pi|| at every n <= n_max.
/// lhs reports the worst signed violation margin (<= 0 when the contraction
/// holds everywhere with room).
inline BoundCheckResult geometric_ergodicity_check(const DiscretizedChain& chain,
                                                   const Eigen::VectorXd& mu0, int n_max) {
    if (mu0.size() != chain.pi.size())
        throw std::invalid_argument("geometric_ergodicity_check: mu0 size mismatch");
    if (mu0.minCoeff() < -1e-12 || std::abs(mu0.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("geometric_ergodicity_check: mu0 is not a distribution");
    const double gamma = spectral_gap(chain).p0_norm;
    const auto norm = [&](const Eigen::VectorXd& mu) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < mu.size(); ++i) {
            const double d = mu(i) - chain.pi(i);
            s += d * d / chain.pi(i);
        }
        return std::sqrt(s);
    };
    const double norm0 = norm(mu0);
    Eigen::VectorXd mu = mu0;
    double worst = -std::numeric_limits<double>::infinity();
    double bound = norm0;
    for (int n = 1; n <= n_max; ++n) {
        mu = (chain.T.transpose() * mu).eval();
        bound *= gamma;
        worst = std::max(worst, norm(mu) - bound);
    }
    BoundCheckResult r;
    r.name = "geometric-ergodicity";
    r.lhs = worst;
    r.rhs = 0.0;
    r.holds = worst <= kBoundSlack;
    r.context = {{"gamma", gamma}, {"n_max", static_cast<double>(n_max)},
                 {"norm0", norm0}};
    return r;
}

}  // namespace swmc
