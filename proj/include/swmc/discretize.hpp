#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "swmc/grid.hpp"
#include "swmc/proposals.hpp"
#include "swmc/targets.hpp"

namespace swmc {

/// Grid realization of a (target, proposal) pair: stationary weights pi over
/// the cells and a row-stochastic transition matrix T that is in detailed
/// balance with pi by construction. Diagonal entries carry the rejection
/// mass, including proposal mass that falls off the grid.
struct DiscretizedChain {
    Eigen::VectorXd pi;
    Eigen::MatrixXd T;
    GridSpec grid;
};

inline void validate_chain(const DiscretizedChain& chain, double tol = 1e-12) {
    const auto n = chain.pi.size();
    if (chain.T.rows() != n || chain.T.cols() != n)
        throw std::invalid_argument("DiscretizedChain: shape mismatch");
    if (std::abs(chain.pi.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("DiscretizedChain: pi does not sum to 1");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(chain.pi(i) > 0.0))
            throw std::invalid_argument("DiscretizedChain: pi has a nonpositive entry");
        double row = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double t = chain.T(i, j);
            if (t < -tol) throw std::invalid_argument("DiscretizedChain: negative entry");
            row += t;
        }
        if (std::abs(row - 1.0) > tol)
            throw std::invalid_argument("DiscretizedChain: row sum differs from 1");
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(chain.pi(i) * chain.T(i, j) - chain.pi(j) * chain.T(j, i)) > tol)
                throw std::invalid_argument("DiscretizedChain: detailed balance violated");
}

inline DiscretizedChain make_discretized_chain(Eigen::VectorXd pi, Eigen::MatrixXd T,
                                               GridSpec grid, bool validate = true) {
    DiscretizedChain chain{std::move(pi), std::move(T), std::move(grid)};
    if (validate) validate_chain(chain);
    return chain;
}

inline DiscretizedChain make_discretized_chain(Eigen::VectorXd pi, Eigen::MatrixXd T,
                                               bool validate = true) {
    const auto m = static_cast<std::size_t>(pi.size());
    return make_discretized_chain(std::move(pi), std::move(T), GridSpec::synthetic(m),
                                  validate);
}

/// Matrix of exact proposal cell masses: row i holds the kernel mass each
/// cell receives from the center of cell i. Rows sum to at most 1; any
/// deficit is proposal mass landing off the grid.
inline Eigen::MatrixXd proposal_mass_matrix(const ProposalKernel& proposal,
                                            const GridSpec& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd U(n, n);
    if (grid.dimension() == 1) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = grid.center(static_cast<std::size_t>(i))[0];
            for (Eigen::Index j = 0; j < n; ++j) {
                auto [lo, hi] = grid.cell_interval(static_cast<std::size_t>(j));
                U(i, j) = proposal.interval_mass(x, lo, hi);
            }
        }
    } else if (grid.dimension() == 2) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Point& x = grid.center(static_cast<std::size_t>(i));
            for (Eigen::Index j = 0; j < n; ++j) {
                auto [lo, hi] = grid.cell_box(static_cast<std::size_t>(j));
                U(i, j) = proposal.box_mass(x, lo, hi);
            }
        }
    } else {
        throw std::invalid_argument("proposal_mass_matrix: only 1-D and 2-D grids");
    }
    return U;
}

/// Builds the discrete Metropolis chain on the grid. The acceptance rule is
/// applied to the discrete proposal weights, so detailed balance holds
/// exactly: pi_i T_ij = min(pi_i q_ij, pi_j q_ji) for i != j.
inline DiscretizedChain discretize(const TargetDensity& target,
                                   const ProposalKernel& proposal, const GridSpec& grid) {
    const std::size_t n = grid.size();
    if (n == 0) throw std::invalid_argument("discretize: empty grid");
    if (grid.dimension() == 1 && n > 4096)
        throw std::invalid_argument("discretize: 1-D grids are capped at 4096 cells");
    if (grid.dimension() == 2 && n > 4096)
        throw std::invalid_argument("discretize: 2-D grids are capped at 64x64 cells");

    const double min_delta = proposal.min_ball_delta();
    if (min_delta > 0.0 && min_delta < grid.max_width() * (1.0 - 1e-12))
        throw std::invalid_argument(
            "discretize: ball radius is smaller than a grid cell; refine the grid");

    Eigen::VectorXd pi(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double ld = target.log_density(grid.center(i));
        if (!std::isfinite(ld))
            throw std::invalid_argument("discretize: grid cell center off support");
        pi(static_cast<Eigen::Index>(i)) = std::exp(ld) * grid.measure(i);
    }
    pi /= pi.sum();

    Eigen::MatrixXd T = proposal_mass_matrix(proposal, grid);
    const auto ni = static_cast<Eigen::Index>(n);
    for (Eigen::Index i = 0; i < ni; ++i) {
        for (Eigen::Index j = i + 1; j < ni; ++j) {
            const double flow = std::min(pi(i) * T(i, j), pi(j) * T(j, i));
            T(i, j) = flow / pi(i);
            T(j, i) = flow / pi(j);
        }
    }
    for (Eigen::Index i = 0; i < ni; ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < ni; ++j)
            if (j != i) off += T(i, j);
        T(i, i) = 1.0 - off;
        if (T(i, i) < 0.0) {
            if (T(i, i) < -1e-12)
                throw std::logic_error("discretize: negative rejection mass");
            T(i, i) = 0.0;
        }
    }
    return DiscretizedChain{std::move(pi), std::move(T), grid};
}

}  // namespace swmc
