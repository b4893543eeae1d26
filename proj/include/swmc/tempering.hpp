#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "swmc/chain.hpp"
#include "swmc/proposals.hpp"
#include "swmc/rng.hpp"
#include "swmc/targets.hpp"

namespace swmc {

/// Powering-up temperature ladder over a cold target: h_t(x) = h_1(x)^{1/t}
/// with t_1 = 1 < t_2 < ... (t_m = inf allowed; supports here are always
/// truncated, so h_inf == 1 on the support is normalizable). h_1 = exp(-V)
/// with per-piece weight 1, so mode apexes sit at height 1.
///
/// pseudo_prior a(i) is the desired temperature marginal; the Hastings
/// ratio uses it directly (tune_pseudo_prior reweights it by estimated
/// normalizers so the realized marginal approaches a).
struct TemperLadder {
    TargetDensity cold;
    std::vector<double> temps;
    std::vector<double> pseudo_prior;

    static TemperLadder powering_up(TargetDensity cold_target, std::vector<double> temps,
                                    std::vector<double> a = {}) {
        if (temps.empty() || temps.front() != 1.0)
            throw std::invalid_argument("TemperLadder: temps must start at t=1");
        for (std::size_t i = 1; i < temps.size(); ++i)
            if (!(temps[i] > temps[i - 1]))
                throw std::invalid_argument("TemperLadder: temps must increase");
        for (std::size_t i = 0; i + 1 < temps.size(); ++i)
            if (std::isinf(temps[i]))
                throw std::invalid_argument("TemperLadder: only the hottest level may be inf");
        if (a.empty()) a.assign(temps.size(), 1.0 / static_cast<double>(temps.size()));
        if (a.size() != temps.size())
            throw std::invalid_argument("TemperLadder: pseudo prior size mismatch");
        double sum = 0.0;
        for (double v : a) {
            if (!(v > 0.0)) throw std::invalid_argument("TemperLadder: a(i) must be positive");
            sum += v;
        }
        for (double& v : a) v /= sum;
        return TemperLadder{std::move(cold_target), std::move(temps), std::move(a)};
    }

    std::size_t levels() const { return temps.size(); }

    /// log h_i(x) = log h_1(x) / t_i; -inf off the support at every level.
    double log_h(std::size_t level, const Point& x) const {
        const double l1 = cold.log_density(x);
        if (!std::isfinite(l1)) return l1;
        if (std::isinf(temps[level])) return 0.0;
        return l1 / temps[level];
    }

    double h(std::size_t level, const Point& x) const {
        const double l = log_h(level, x);
        return std::isfinite(l) ? std::exp(l) : 0.0;
    }
};

struct TemperState {
    Point x;
    std::size_t temp_index = 0;  // 0-based level
};

struct TemperStepInfo {
    bool within_accepted = false;
    bool temp_proposed = false;
    std::size_t temp_from = 0, temp_to = 0;
    double hastings_ratio = 0.0;
    bool temp_accepted = false;
};

/// One simulated-tempering iteration: a Metropolis move under h_i, then a
/// reflecting +-1 temperature proposal accepted with
/// min(h_j(x) a_j q_ji / (h_i(x) a_i q_ij), 1). The ratio is computed in
/// linear space exactly as factored here so that, with m = 2 and equal a,
/// it equals h_j(x)/h_i(x) bit for bit.
inline std::pair<TemperState, TemperStepInfo> tempering_step(
    const TemperState& state, const TemperLadder& ladder,
    const ProposalKernel& within_temp_proposal, RandomStream& rng) {
    const std::size_t m = ladder.levels();
    const std::size_t i = state.temp_index;
    if (i >= m) throw std::invalid_argument("tempering_step: bad temperature index");
    TemperState next = state;
    TemperStepInfo info;

    // Step 1: within-temperature Metropolis move under h_i.
    const double lx = ladder.log_h(i, next.x);
    if (!std::isfinite(lx)) throw std::invalid_argument("tempering_step: state off support");
    Point y = within_temp_proposal.propose(next.x, rng);
    const double ly = ladder.log_h(i, y);
    const double u = rng.uniform01();
    if (std::log(u) < ly - lx) {
        next.x = std::move(y);
        info.within_accepted = true;
    }

    if (m == 1) return {std::move(next), info};

    // Step 2: reflecting random walk on temperatures.
    std::size_t j;
    double q_ij, q_ji;
    if (i == 0) {
        j = 1;
        q_ij = 1.0;
        q_ji = m == 2 ? 1.0 : 0.5;
    } else if (i == m - 1) {
        j = m - 2;
        q_ij = 1.0;
        q_ji = m == 2 ? 1.0 : 0.5;
    } else {
        j = rng.uniform01() < 0.5 ? i - 1 : i + 1;
        q_ij = 0.5;
        q_ji = (j == 0 || j == m - 1) ? 1.0 : 0.5;
    }

    // Step 3: Hastings ratio over temperatures.
    const double hi = ladder.h(i, next.x);
    const double hj = ladder.h(j, next.x);
    const double r = (hj * ladder.pseudo_prior[j] * q_ji) /
                     (hi * ladder.pseudo_prior[i] * q_ij);
    info.temp_proposed = true;
    info.temp_from = i;
    info.temp_to = j;
    info.hastings_ratio = r;
    const double us = rng.uniform01();
    if (us < r) {
        next.temp_index = j;
        info.temp_accepted = true;
    }
    return {std::move(next), info};
}

struct TemperTrace {
    std::vector<Point> states;
    std::vector<int> temp_indices;
    std::vector<long> steps;
    std::vector<std::uint8_t> within_accept;  // all steps
    long n_steps = 0;
    std::uint64_t seed = 0;
    long record_every = 1;
    double within_acceptance_rate = 0.0;
    // Hastings-ratio log (filled when log_ratios is set): one entry per
    // temperature proposal, with the state it was evaluated at.
    std::vector<double> ratios;
    std::vector<std::size_t> ratio_from, ratio_to;
    std::vector<Point> ratio_x;
};

/// Seeded simulated-tempering run; deterministic given the seed. With a
/// single level this reduces exactly (same draw sequence) to run_chain.
inline TemperTrace run_tempering(const TemperLadder& ladder,
                                 const ProposalKernel& proposal, long steps,
                                 std::uint64_t seed, long record_every = 1,
                                 bool log_ratios = false) {
    if (steps < 1) throw std::invalid_argument("run_tempering: steps must be >= 1");
    if (record_every < 1)
        throw std::invalid_argument("run_tempering: record_every must be >= 1");
    RandomStream rng(seed);
    TemperTrace trace;
    trace.n_steps = steps;
    trace.seed = seed;
    trace.record_every = record_every;

    TemperState state{ladder.cold.topology().canonical(
                          ladder.cold.pieces().front().barycenter),
                      0};
    trace.states.push_back(state.x);
    trace.temp_indices.push_back(0);
    trace.steps.push_back(0);

    long accepted = 0;
    for (long t = 1; t <= steps; ++t) {
        auto [next, info] = tempering_step(state, ladder, proposal, rng);
        state = std::move(next);
        trace.within_accept.push_back(info.within_accepted ? 1 : 0);
        if (info.within_accepted) ++accepted;
        if (log_ratios && info.temp_proposed) {
            trace.ratios.push_back(info.hastings_ratio);
            trace.ratio_from.push_back(info.temp_from);
            trace.ratio_to.push_back(info.temp_to);
            trace.ratio_x.push_back(state.x);
        }
        if (t % record_every == 0) {
            trace.states.push_back(state.x);
            trace.temp_indices.push_back(static_cast<int>(state.temp_index));
            trace.steps.push_back(t);
        }
    }
    trace.within_acceptance_rate = static_cast<double>(accepted) / static_cast<double>(steps);
    return trace;
}

struct SwapInfo {
    std::size_t lower = 0;  // swap proposed between lower and lower+1
    double ratio = 0.0;
    bool accepted = false;
};

/// One replica-exchange swap: a uniformly chosen adjacent pair, accepted
/// with min(1, h_i(x_j) h_j(x_i) / (h_i(x_i) h_j(x_j))). Computed in log
/// space; scaling h_1 by a constant cancels.
inline SwapInfo mcmcmc_swap_step(std::vector<Point>& states, const TemperLadder& ladder,
                                 RandomStream& rng) {
    const std::size_t m = ladder.levels();
    if (states.size() != m)
        throw std::invalid_argument("mcmcmc_swap_step: one state per temperature required");
    if (m < 2) throw std::invalid_argument("mcmcmc_swap_step: need at least 2 levels");
    SwapInfo info;
    info.lower = static_cast<std::size_t>(rng.below(m - 1));
    const std::size_t i = info.lower, j = info.lower + 1;
    const double log_r = ladder.log_h(i, states[j]) + ladder.log_h(j, states[i]) -
                         ladder.log_h(i, states[i]) - ladder.log_h(j, states[j]);
    info.ratio = std::exp(log_r);
    const double u = rng.uniform01();
    if (std::log(u) < log_r) {
        std::swap(states[i], states[j]);
        info.accepted = true;
    }
    return info;
}

struct McmcmcTrace {
    std::vector<std::vector<Point>> replica_states;  // [level][recorded step]
    long n_steps = 0;
    std::uint64_t seed = 0;
    long record_every = 1;
    double swap_acceptance_rate = 0.0;
};

/// Replica-exchange driver: every iteration advances each replica by one
/// Metropolis step under its own h_i (per-replica split streams), then runs
/// one swap attempt (its own stream). Deterministic given the seed.
inline McmcmcTrace run_mcmcmc(const TemperLadder& ladder, const ProposalKernel& proposal,
                              long steps, std::uint64_t seed, long record_every = 1) {
    if (steps < 1) throw std::invalid_argument("run_mcmcmc: steps must be >= 1");
    const std::size_t m = ladder.levels();
    std::vector<RandomStream> streams;
    streams.reserve(m);
    for (std::size_t k = 0; k < m; ++k) streams.push_back(RandomStream::split(seed, k));
    RandomStream swap_stream = RandomStream::split(seed, m);

    std::vector<Point> states(
        m, ladder.cold.topology().canonical(ladder.cold.pieces().front().barycenter));
    McmcmcTrace trace;
    trace.n_steps = steps;
    trace.seed = seed;
    trace.record_every = record_every;
    trace.replica_states.resize(m);
    for (std::size_t k = 0; k < m; ++k) trace.replica_states[k].push_back(states[k]);

    long swaps_accepted = 0;
    for (long t = 1; t <= steps; ++t) {
        for (std::size_t k = 0; k < m; ++k) {
            const double lx = ladder.log_h(k, states[k]);
            Point y = proposal.propose(states[k], streams[k]);
            const double ly = ladder.log_h(k, y);
            const double u = streams[k].uniform01();
            if (std::log(u) < ly - lx) states[k] = std::move(y);
        }
        if (m >= 2 && mcmcmc_swap_step(states, ladder, swap_stream).accepted)
            ++swaps_accepted;
        if (t % record_every == 0)
            for (std::size_t k = 0; k < m; ++k) trace.replica_states[k].push_back(states[k]);
    }
    trace.swap_acceptance_rate =
        m >= 2 ? static_cast<double>(swaps_accepted) / static_cast<double>(steps) : 0.0;
    return trace;
}

/// Pilot-run pseudo-prior tuning: repeatedly reweights the working prior by
/// target_marginal / observed_marginal, which converges on a ~ a_target/Z_i.
/// Levels unvisited in a round keep their weight.
inline TemperLadder tune_pseudo_prior(TemperLadder ladder, const ProposalKernel& proposal,
                                      long pilot_steps, int rounds, std::uint64_t seed) {
    const std::size_t m = ladder.levels();
    const std::vector<double> target_marginal = ladder.pseudo_prior;
    for (int round = 0; round < rounds; ++round) {
        const TemperTrace pilot =
            run_tempering(ladder, proposal, pilot_steps, seed + static_cast<std::uint64_t>(round));
        std::vector<double> occupancy(m, 0.0);
        for (int idx : pilot.temp_indices) occupancy[static_cast<std::size_t>(idx)] += 1.0;
        double sum = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (occupancy[k] > 0.0)
                ladder.pseudo_prior[k] *=
                    target_marginal[k] /
                    (occupancy[k] / static_cast<double>(pilot.temp_indices.size()));
            sum += ladder.pseudo_prior[k];
        }
        for (double& v : ladder.pseudo_prior) v /= sum;
    }
    return ladder;
}

}  // namespace swmc
