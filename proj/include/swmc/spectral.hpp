#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "swmc/discretize.hpp"
#include "swmc/rng.hpp"
#include "swmc/targets.hpp"

namespace swmc {

struct GapReport {
    double gap = 0.0;
    double p0_norm = 0.0;
    double conductance = 0.0;
    std::string conductance_method;  // "exact" | "searched-upper-bound"
    double cheeger_lo = 0.0;         // conductance^2 / 2
    double cheeger_hi = 0.0;         // 2 * conductance
    std::vector<double> eigenvalues;  // descending
};

enum class ConductanceMode { Exact, Arcs, RandomSearch };

inline void require_reversible(const DiscretizedChain& chain, double tol = 1e-9) {
    const auto n = chain.pi.size();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(chain.pi(i) * chain.T(i, j) - chain.pi(j) * chain.T(j, i)) > tol)
                throw std::invalid_argument("chain is not reversible (detailed balance fails)");
}

/// All eigenvalues of the chain, descending. Computed on the symmetrized
/// matrix D^{1/2} T D^{-1/2}, which shares the spectrum of T.
inline std::vector<double> reversible_spectrum(const DiscretizedChain& chain) {
    require_reversible(chain);
    const auto n = chain.pi.size();
    Eigen::VectorXd sqrt_pi = chain.pi.cwiseSqrt();
    Eigen::MatrixXd S(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            S(i, j) = sqrt_pi(i) * chain.T(i, j) / sqrt_pi(j);
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    std::vector<double> eigs(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + n);
    std::reverse(eigs.begin(), eigs.end());
    return eigs;
}

/// Flow out of the cell set A per unit stationary mass of A.
inline double conductance_of_set(const DiscretizedChain& chain,
                                 const std::vector<std::size_t>& cells) {
    if (cells.empty()) throw std::invalid_argument("conductance_of_set: empty set");
    const auto n = static_cast<std::size_t>(chain.pi.size());
    std::vector<char> in(n, 0);
    double pi_a = 0.0;
    for (std::size_t c : cells) {
        if (c >= n) throw std::out_of_range("conductance_of_set: cell index");
        in[c] = 1;
        pi_a += chain.pi(static_cast<Eigen::Index>(c));
    }
    double flow = 0.0;
    for (std::size_t c : cells) {
        const auto i = static_cast<Eigen::Index>(c);
        for (std::size_t j = 0; j < n; ++j)
            if (!in[j]) flow += chain.pi(i) * chain.T(i, static_cast<Eigen::Index>(j));
    }
    return flow / pi_a;
}

namespace detail {

/// Exact conductance by Gray-code enumeration of all 2^N subsets; flows are
/// updated incrementally when one cell flips.
inline double conductance_exact(const DiscretizedChain& chain) {
    const auto n = static_cast<std::size_t>(chain.pi.size());
    if (n > 20) throw std::invalid_argument("conductance: exact mode requires N <= 20");
    if (n < 2) throw std::invalid_argument("conductance: need at least 2 cells");
    // Symmetric off-diagonal flows.
    std::vector<std::vector<double>> F(n, std::vector<double>(n, 0.0));
    std::vector<double> rowflow(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) {
                F[i][j] = chain.pi(static_cast<Eigen::Index>(i)) *
                          chain.T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                rowflow[i] += F[i][j];
            }
    std::vector<char> in(n, 0);
    std::vector<double> in_flow(n, 0.0);  // sum of F[j][k] over j currently in A
    double pi_a = 0.0, flow = 0.0;
    double best = std::numeric_limits<double>::infinity();
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < total; ++step) {
        const auto k = static_cast<std::size_t>(std::countr_zero(step));
        if (!in[k]) {
            flow += rowflow[k] - 2.0 * in_flow[k];
            pi_a += chain.pi(static_cast<Eigen::Index>(k));
            in[k] = 1;
            for (std::size_t j = 0; j < n; ++j) in_flow[j] += F[k][j];
        } else {
            in[k] = 0;
            for (std::size_t j = 0; j < n; ++j) in_flow[j] -= F[k][j];
            flow -= rowflow[k] - 2.0 * in_flow[k];
            pi_a -= chain.pi(static_cast<Eigen::Index>(k));
        }
        if (pi_a > 0.0 && pi_a <= 0.5 + 1e-12 && step + 1 < total)
            best = std::min(best, flow / pi_a);
    }
    return best;
}

/// Minimum over all modular arcs of the cell ordering (and their
/// complements); an upper bound on the true conductance.
inline double conductance_arcs(const DiscretizedChain& chain) {
    const auto n = static_cast<std::size_t>(chain.pi.size());
    if (n < 2) throw std::invalid_argument("conductance: need at least 2 cells");
    Eigen::MatrixXd F = chain.pi.asDiagonal() * chain.T;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t start = 0; start < n; ++start) {
        double pi_a = 0.0, flow = 0.0;
        std::vector<std::size_t> arc;
        arc.reserve(n);
        for (std::size_t len = 1; len < n; ++len) {
            const std::size_t k = (start + len - 1) % n;
            const auto ki = static_cast<Eigen::Index>(k);
            double inner = 0.0;
            for (std::size_t j : arc) inner += F(static_cast<Eigen::Index>(j), ki);
            double rowf = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) rowf += F(ki, static_cast<Eigen::Index>(j));
            flow += rowf - 2.0 * inner;
            pi_a += chain.pi(ki);
            arc.push_back(k);
            if (pi_a > 0.0 && pi_a <= 0.5 + 1e-12) best = std::min(best, flow / pi_a);
            const double pi_c = 1.0 - pi_a;
            if (pi_c > 0.0 && pi_c <= 0.5 + 1e-12) best = std::min(best, flow / pi_c);
        }
    }
    return best;
}

inline double conductance_random(const DiscretizedChain& chain, std::size_t trials,
                                 std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(chain.pi.size());
    double best = conductance_arcs(chain);
    RandomStream rng(seed);
    std::vector<char> in(n);
    for (std::size_t t = 0; t < trials; ++t) {
        double pi_a = 0.0;
        bool any = false, all = true;
        for (std::size_t i = 0; i < n; ++i) {
            in[i] = rng.uniform01() < 0.5 ? 1 : 0;
            if (in[i]) {
                any = true;
                pi_a += chain.pi(static_cast<Eigen::Index>(i));
            } else {
                all = false;
            }
        }
        if (!any || all) continue;
        double flow = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (in[i])
                for (std::size_t j = 0; j < n; ++j)
                    if (!in[j])
                        flow += chain.pi(static_cast<Eigen::Index>(i)) *
                                chain.T(static_cast<Eigen::Index>(i),
                                        static_cast<Eigen::Index>(j));
        if (pi_a > 0.0 && pi_a <= 0.5 + 1e-12) best = std::min(best, flow / pi_a);
        const double pi_c = 1.0 - pi_a;
        if (pi_c > 0.0 && pi_c <= 0.5 + 1e-12) best = std::min(best, flow / pi_c);
    }
    return best;
}

}  // namespace detail

/// Conductance of the chain. Exact mode enumerates every subset with
/// stationary mass <= 1/2 (N <= 20); the other modes search arcs (plus
/// random subsets) and return an upper bound on the infimum.
inline std::pair<double, std::string> conductance(const DiscretizedChain& chain,
                                                  ConductanceMode mode,
                                                  std::size_t random_trials = 200,
                                                  std::uint64_t seed = 0x5eedULL) {
    switch (mode) {
        case ConductanceMode::Exact:
            return {detail::conductance_exact(chain), "exact"};
        case ConductanceMode::Arcs:
            return {detail::conductance_arcs(chain), "arcs"};
        case ConductanceMode::RandomSearch:
            return {detail::conductance_random(chain, random_trials, seed), "random_search"};
    }
    return {0.0, ""};
}

/// Spectral gap report: gap = 1 - max |eigenvalue| over the mean-zero
/// subspace. The conductance field uses exact enumeration when N <= 20 and
/// the arc search otherwise; Cheeger bounds are derived from it (both are
/// true bounds only when the method tag is "exact"; the upper half also
/// holds for searched values).
inline GapReport spectral_gap(const DiscretizedChain& chain) {
    GapReport report;
    const auto n = chain.pi.size();
    if (n == 1) {
        // Empty mean-zero subspace: a single-cell chain mixes instantly.
        report.gap = 1.0;
        report.p0_norm = 0.0;
        report.conductance = 0.0;
        report.conductance_method = "exact";
        report.eigenvalues = {1.0};
        return report;
    }
    report.eigenvalues = reversible_spectrum(chain);
    report.p0_norm = std::max(std::abs(report.eigenvalues[1]),
                              std::abs(report.eigenvalues.back()));
    report.gap = 1.0 - report.p0_norm;
    if (n <= 20) {
        report.conductance = detail::conductance_exact(chain);
        report.conductance_method = "exact";
    } else {
        report.conductance = detail::conductance_arcs(chain);
        report.conductance_method = "searched-upper-bound";
    }
    report.cheeger_lo = 0.5 * report.conductance * report.conductance;
    report.cheeger_hi = 2.0 * report.conductance;
    return report;
}

/// Chain restricted to a cell subset: transitions out of the subset are
/// rejected in place. Stationary vector is pi restricted and renormalized.
inline DiscretizedChain restrict_chain(const DiscretizedChain& chain,
                                       const std::vector<std::size_t>& cells) {
    if (cells.empty()) throw std::invalid_argument("restrict_chain: empty subset");
    const auto m = static_cast<Eigen::Index>(cells.size());
    Eigen::VectorXd pi(m);
    Eigen::MatrixXd T(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        pi(a) = chain.pi(static_cast<Eigen::Index>(cells[static_cast<std::size_t>(a)]));
    pi /= pi.sum();
    for (Eigen::Index a = 0; a < m; ++a) {
        const auto i = static_cast<Eigen::Index>(cells[static_cast<std::size_t>(a)]);
        double off = 0.0;
        for (Eigen::Index b = 0; b < m; ++b) {
            if (b == a) continue;
            const auto j = static_cast<Eigen::Index>(cells[static_cast<std::size_t>(b)]);
            T(a, b) = chain.T(i, j);
            off += T(a, b);
        }
        T(a, a) = 1.0 - off;
    }
    return DiscretizedChain{std::move(pi), std::move(T), chain.grid.subset(cells)};
}

/// Labels every grid cell with a piece index in {0..m-1}.
struct PartitionSpec {
    std::vector<int> assignment;
    int m = 0;

    void validate() const {
        if (m < 1) throw std::invalid_argument("PartitionSpec: empty partition");
        std::vector<char> seen(static_cast<std::size_t>(m), 0);
        for (int a : assignment) {
            if (a < 0 || a >= m) throw std::invalid_argument("PartitionSpec: label out of range");
            seen[static_cast<std::size_t>(a)] = 1;
        }
        for (char s : seen)
            if (!s) throw std::invalid_argument("PartitionSpec: empty piece");
    }

    std::vector<std::size_t> cells_of(int label) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < assignment.size(); ++i)
            if (assignment[i] == label) out.push_back(i);
        return out;
    }
};

/// Partition of grid cells by the target piece containing each center.
inline PartitionSpec partition_by_pieces(const TargetDensity& target, const GridSpec& grid) {
    PartitionSpec part;
    part.m = static_cast<int>(target.pieces().size());
    part.assignment.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto p = target.piece_index(grid.center(i));
        if (p < 0) throw std::invalid_argument("partition_by_pieces: cell off support");
        part.assignment[i] = static_cast<int>(p);
    }
    part.validate();
    return part;
}

/// Aggregated m-state chain over the partition pieces. Off-diagonal entries
/// are half the stationary-normalized flow between pieces, so the chain is
/// lazy and reversible with respect to the piece masses.
inline DiscretizedChain component_chain(const DiscretizedChain& chain,
                                        const PartitionSpec& partition) {
    partition.validate();
    if (partition.m < 2)
        throw std::invalid_argument("component_chain: need at least 2 pieces");
    if (partition.assignment.size() != static_cast<std::size_t>(chain.pi.size()))
        throw std::invalid_argument("component_chain: partition size mismatch");
    const int m = partition.m;
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(m);
    Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(m, m);
    const auto n = chain.pi.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const int a = partition.assignment[static_cast<std::size_t>(i)];
        mass(a) += chain.pi(i);
        for (Eigen::Index j = 0; j < n; ++j) {
            const int b = partition.assignment[static_cast<std::size_t>(j)];
            if (a != b) flow(a, b) += chain.pi(i) * chain.T(i, j);
        }
    }
    Eigen::MatrixXd T(m, m);
    for (int a = 0; a < m; ++a) {
        double off = 0.0;
        for (int b = 0; b < m; ++b) {
            if (b == a) continue;
            T(a, b) = flow(a, b) / (2.0 * mass(a));
            off += T(a, b);
        }
        T(a, a) = 1.0 - off;
    }
    return DiscretizedChain{std::move(mass), std::move(T),
                            GridSpec::synthetic(static_cast<std::size_t>(m))};
}

struct DecompositionBound {
    double lhs = 0.0;  // gap of the full chain
    double rhs = 0.0;  // (1/2) gap(component) * min_i gap(restricted_i)
    double component_gap = 0.0;
    double min_restricted_gap = 0.0;
    bool holds = false;
};

/// Checks gap(P) >= (1/2) gap(P_H) min_i gap(P_{A_i}) for the given
/// partition, with 1e-9 slack.
inline DecompositionBound decomposition_bound(const DiscretizedChain& chain,
                                              const PartitionSpec& partition) {
    DecompositionBound result;
    result.lhs = spectral_gap(chain).gap;
    const DiscretizedChain comp = component_chain(chain, partition);
    result.component_gap = spectral_gap(comp).gap;
    result.min_restricted_gap = std::numeric_limits<double>::infinity();
    for (int a = 0; a < partition.m; ++a) {
        const DiscretizedChain restricted = restrict_chain(chain, partition.cells_of(a));
        result.min_restricted_gap =
            std::min(result.min_restricted_gap, spectral_gap(restricted).gap);
    }
    result.rhs = 0.5 * result.component_gap * result.min_restricted_gap;
    result.holds = result.lhs >= result.rhs - 1e-9;
    return result;
}

/// Spectral-gap lower bound for an m-state stochastic matrix from its
/// smallest off-diagonal entry: gap >= m * min_{i != j} a_ij. Valid whenever
/// every diagonal entry dominates that minimum (component chains are lazy,
/// so they qualify).
inline double offdiag_gap_lower_bound(const DiscretizedChain& chain) {
    const auto m = chain.pi.size();
    if (m < 2) throw std::invalid_argument("offdiag_gap_lower_bound: need m >= 2");
    double min_off = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (i != j) min_off = std::min(min_off, chain.T(i, j));
    return static_cast<double>(m) * min_off;
}

}  // namespace swmc
