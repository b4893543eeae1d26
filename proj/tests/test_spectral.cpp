#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numeric>

#include "swmc/discretize.hpp"
#include "swmc/rng.hpp"
#include "swmc/spectral.hpp"

using namespace swmc;

namespace {

DiscretizedChain two_state(double a) {
    Eigen::VectorXd pi(2);
    pi << 0.5, 0.5;
    Eigen::MatrixXd T(2, 2);
    T << 1.0 - a, a, a, 1.0 - a;
    return make_discretized_chain(pi, T);
}

DiscretizedChain small_world_chain(double L, double nu, double delta, double s,
                                   std::size_t bins) {
    const TargetDensity target = two_mode_circle_target(L, nu);
    const auto kernel = ProposalKernel::mixture(
        ProposalKernel::ball(delta, 1, target.topology()),
        ProposalKernel::uniform_on_support(target), s);
    return discretize(target, kernel, grid_covering(target, bins));
}

// Lazy reversible stochastic matrix with strictly positive off-diagonals;
// built from a random symmetric flow matrix plus diagonal slack.
DiscretizedChain random_lazy_reversible(int m, RandomStream& rng) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double f = rng.uniform(0.01, 1.0);
            M(i, j) = f;
            M(j, i) = f;
        }
    for (int i = 0; i < m; ++i) {
        double off = 0.0;
        for (int j = 0; j < m; ++j) off += M(i, j);
        M(i, i) = off + rng.uniform(0.0, 1.0);  // diagonal dominates: lazy chain
    }
    Eigen::VectorXd rowsum = M.rowwise().sum();
    Eigen::VectorXd pi = rowsum / rowsum.sum();
    Eigen::MatrixXd T(m, m);
    for (int i = 0; i < m; ++i) T.row(i) = M.row(i) / rowsum(i);
    return make_discretized_chain(pi, T);
}

// Independent subset enumerator: plain binary order, flow recomputed from
// scratch for every subset.
double brute_force_conductance(const DiscretizedChain& chain) {
    const int n = static_cast<int>(chain.pi.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
        double pi_a = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask & (std::uint64_t{1} << i)) pi_a += chain.pi(i);
        if (!(pi_a > 0.0 && pi_a <= 0.5 + 1e-12)) continue;
        double flow = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!(mask & (std::uint64_t{1} << i))) continue;
            for (int j = 0; j < n; ++j)
                if (!(mask & (std::uint64_t{1} << j))) flow += chain.pi(i) * chain.T(i, j);
        }
        best = std::min(best, flow / pi_a);
    }
    return best;
}

std::vector<std::size_t> cells_in_mode(const DiscretizedChain& chain, double L) {
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < chain.grid.size(); ++i)
        if (std::abs(chain.grid.center(i)[0]) < L) cells.push_back(i);
    return cells;
}

}  // namespace

TEST_CASE("two-state gap and identity chain", "[spectral]") {
    CHECK(spectral_gap(two_state(0.1)).gap == Catch::Approx(0.2).margin(1e-12));

    Eigen::VectorXd pi(3);
    pi << 0.2, 0.3, 0.5;
    const DiscretizedChain id = make_discretized_chain(pi, Eigen::MatrixXd::Identity(3, 3));
    CHECK(spectral_gap(id).gap == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("singleton chains mix instantly by convention", "[spectral]") {
    Eigen::VectorXd pi(1);
    pi << 1.0;
    Eigen::MatrixXd T(1, 1);
    T << 1.0;
    CHECK(spectral_gap(make_discretized_chain(pi, T)).gap == 1.0);
}

TEST_CASE("non-reversible input is refused", "[spectral]") {
    Eigen::VectorXd pi(3);
    pi << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    Eigen::MatrixXd T(3, 3);
    T << 0.0, 0.7, 0.3, 0.3, 0.0, 0.7, 0.7, 0.3, 0.0;  // rotating, not reversible
    const DiscretizedChain chain{pi, T, GridSpec::synthetic(3)};
    CHECK_THROWS_AS(spectral_gap(chain), std::invalid_argument);
}

TEST_CASE("conductance of explicit sets", "[spectral]") {
    const DiscretizedChain ts = two_state(0.1);
    CHECK(conductance_of_set(ts, {0}) == Catch::Approx(0.1).margin(1e-15));
    CHECK(conductance_of_set(ts, {0, 1}) == Catch::Approx(0.0).margin(1e-15));
    CHECK_THROWS_AS(conductance_of_set(ts, {}), std::invalid_argument);

    const DiscretizedChain sw = small_world_chain(5.0, 1.0, 1.0, 1.0 / 3.0, 64);
    const auto mode = cells_in_mode(sw, 5.0);
    double flow = 0.0, pi_a = 0.0;
    std::vector<char> in(sw.grid.size(), 0);
    for (auto c : mode) in[c] = 1;
    for (auto c : mode) {
        pi_a += sw.pi(static_cast<Eigen::Index>(c));
        for (std::size_t j = 0; j < sw.grid.size(); ++j)
            if (!in[j])
                flow += sw.pi(static_cast<Eigen::Index>(c)) *
                        sw.T(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j));
    }
    CHECK(conductance_of_set(sw, mode) == Catch::Approx(flow / pi_a).margin(1e-12));
}

TEST_CASE("exact conductance agrees with an independent enumerator", "[spectral]") {
    const DiscretizedChain chain = small_world_chain(5.0, 1.0, 2.5, 1.0 / 3.0, 10);
    const auto [exact, tag] = conductance(chain, ConductanceMode::Exact);
    CHECK(tag == "exact");
    CHECK(exact == Catch::Approx(brute_force_conductance(chain)).margin(1e-12));

    const auto [arcs, arcs_tag] = conductance(chain, ConductanceMode::Arcs);
    CHECK(arcs_tag == "arcs");
    CHECK(exact <= arcs + 1e-12);

    const auto [rs, rs_tag] = conductance(chain, ConductanceMode::RandomSearch, 500);
    CHECK(rs_tag == "random_search");
    CHECK(exact <= rs + 1e-12);
    CHECK(rs <= arcs + 1e-12);

    CHECK(conductance(two_state(0.1), ConductanceMode::Exact).first ==
          Catch::Approx(0.1).margin(1e-15));

    const DiscretizedChain big = small_world_chain(5.0, 1.0, 1.0, 1.0 / 3.0, 64);
    CHECK_THROWS_AS(conductance(big, ConductanceMode::Exact), std::invalid_argument);
}

TEST_CASE("cheeger sandwich on exactly enumerable chains", "[spectral]") {
    const std::vector<DiscretizedChain> chains = {
        small_world_chain(5.0, 1.0, 2.0, 1.0 / 3.0, 16),
        small_world_chain(5.0, 1.0, 2.0, 0.1, 20),
        two_state(0.25),
    };
    for (const auto& chain : chains) {
        const GapReport r = spectral_gap(chain);
        REQUIRE(r.conductance_method == "exact");
        REQUIRE(r.cheeger_lo <= r.gap + 1e-9);
        REQUIRE(r.gap <= r.cheeger_hi + 1e-9);
    }
}

TEST_CASE("mixture conductance is bounded by the component mix", "[spectral]") {
    const TargetDensity target = two_mode_circle_target(5.0, 1.0);
    const GridSpec grid = grid_covering(target, 20);
    const auto local = ProposalKernel::ball(1.5, 1, target.topology());
    const auto heavy = ProposalKernel::uniform_on_support(target);
    const double h1 = conductance(discretize(target, local, grid),
                                  ConductanceMode::Exact).first;
    const double h2 = conductance(discretize(target, heavy, grid),
                                  ConductanceMode::Exact).first;
    for (double s : {0.1, 1.0 / 3.0, 0.5}) {
        const auto mix = ProposalKernel::mixture(local, heavy, s);
        const double h = conductance(discretize(target, mix, grid),
                                     ConductanceMode::Exact).first;
        REQUIRE(h >= (1.0 - s) * h1 + s * h2 - 1e-9);
    }
}

TEST_CASE("restricted chains reject outward moves in place", "[spectral]") {
    const DiscretizedChain chain = small_world_chain(5.0, 1.0, 1.0, 1.0 / 3.0, 64);

    std::vector<std::size_t> all(chain.grid.size());
    std::iota(all.begin(), all.end(), 0);
    const DiscretizedChain same = restrict_chain(chain, all);
    CHECK((same.T - chain.T).cwiseAbs().maxCoeff() < 1e-15);

    const DiscretizedChain single = restrict_chain(chain, {3});
    CHECK(single.T(0, 0) == Catch::Approx(1.0).margin(1e-15));
    CHECK(spectral_gap(single).gap == 1.0);

    const DiscretizedChain mode = restrict_chain(chain, cells_in_mode(chain, 5.0));
    REQUIRE_NOTHROW(validate_chain(mode, 1e-12));
}

TEST_CASE("component chain symmetry and magnitude", "[spectral]") {
    const DiscretizedChain chain = small_world_chain(5.0, 1.0, 1.0, 1.0 / 3.0, 256);
    const TargetDensity target = two_mode_circle_target(5.0, 1.0);
    const PartitionSpec part = partition_by_pieces(target, chain.grid);
    const DiscretizedChain comp = component_chain(chain, part);

    CHECK(comp.pi(0) == Catch::Approx(0.5).margin(1e-12));
    CHECK(comp.T(0, 1) == Catch::Approx(comp.T(1, 0)).margin(1e-12));

    // Uniform heavy tail at s = 1/3 pushes the cross-mode rate above
    // s / (4 nu L) = 1/60.
    CHECK(comp.T(0, 1) > 1.0 / 60.0);

    // The factor 2 in the denominator: off-diagonals are exactly half the
    // stationary-normalized flow.
    double flow = 0.0;
    const auto mode = part.cells_of(0);
    std::vector<char> in(chain.grid.size(), 0);
    for (auto c : mode) in[c] = 1;
    double pi_a = 0.0;
    for (auto c : mode) {
        pi_a += chain.pi(static_cast<Eigen::Index>(c));
        for (std::size_t j = 0; j < chain.grid.size(); ++j)
            if (!in[j])
                flow += chain.pi(static_cast<Eigen::Index>(c)) *
                        chain.T(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j));
    }
    CHECK(comp.T(0, 1) == Catch::Approx(0.5 * flow / pi_a).margin(1e-14));
    CHECK(comp.T(0, 1) == Catch::Approx(0.5 * conductance_of_set(chain, mode)).margin(1e-14));
}

TEST_CASE("state decomposition bound holds", "[spectral]") {
    const TargetDensity target = two_mode_circle_target(5.0, 1.0);
    for (std::size_t bins : {64u, 128u}) {
        const auto kernel = ProposalKernel::mixture(
            ProposalKernel::ball(1.0, 1, target.topology()),
            ProposalKernel::uniform_on_support(target), 1.0 / 3.0);
        const DiscretizedChain chain = discretize(target, kernel, grid_covering(target, bins));
        const PartitionSpec part = partition_by_pieces(target, chain.grid);
        const DecompositionBound d = decomposition_bound(chain, part);
        REQUIRE(d.holds);
        REQUIRE(d.lhs >= d.rhs - 1e-9);
    }

    // Local-only chain: the component gap collapses and the bound is
    // vacuous but still true.
    const auto local = ProposalKernel::ball(1.0, 1, target.topology());
    const DiscretizedChain chain = discretize(target, local, grid_covering(target, 128));
    const PartitionSpec part = partition_by_pieces(target, chain.grid);
    const DecompositionBound d = decomposition_bound(chain, part);
    CHECK(d.holds);
    CHECK(d.rhs < 0.05);

    PartitionSpec trivial;
    trivial.m = 1;
    trivial.assignment.assign(chain.grid.size(), 0);
    CHECK_THROWS_AS(component_chain(chain, trivial), std::invalid_argument);
}

TEST_CASE("off-diagonal gap lower bound", "[spectral]") {
    Eigen::VectorXd pi(2);
    pi << 0.5, 0.5;
    Eigen::MatrixXd T(2, 2);
    T << 0.5, 0.5, 0.5, 0.5;
    const DiscretizedChain rank_one = make_discretized_chain(pi, T);
    CHECK(offdiag_gap_lower_bound(rank_one) == Catch::Approx(1.0));
    CHECK(spectral_gap(rank_one).gap == Catch::Approx(1.0).margin(1e-12));

    const DiscretizedChain ts = two_state(0.1);
    CHECK(offdiag_gap_lower_bound(ts) == Catch::Approx(0.2));
    CHECK(spectral_gap(ts).gap == Catch::Approx(offdiag_gap_lower_bound(ts)).margin(1e-12));

    RandomStream rng(777);
    for (int trial = 0; trial < 100; ++trial) {
        const DiscretizedChain chain = random_lazy_reversible(4, rng);
        REQUIRE(spectral_gap(chain).gap >= offdiag_gap_lower_bound(chain) - 1e-9);
    }
}

TEST_CASE("gap is invariant under cell relabeling", "[spectral]") {
    const DiscretizedChain chain = small_world_chain(5.0, 1.0, 2.0, 1.0 / 3.0, 32);
    const auto n = chain.pi.size();
    RandomStream rng(55);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.below(i))]);
    Eigen::VectorXd pi(n);
    Eigen::MatrixXd T(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        pi(i) = chain.pi(perm[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < n; ++j)
            T(i, j) = chain.T(perm[static_cast<std::size_t>(i)],
                              perm[static_cast<std::size_t>(j)]);
    }
    const DiscretizedChain permuted = make_discretized_chain(pi, T);
    CHECK(spectral_gap(permuted).gap ==
          Catch::Approx(spectral_gap(chain).gap).margin(1e-11));
}
