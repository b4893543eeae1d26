#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "swmc/proposals.hpp"
#include "swmc/rng.hpp"
#include "swmc/targets.hpp"

namespace swmc {

struct ChainConfig {
    TargetDensity target;
    ProposalKernel proposal;
    Point initial_state;
    long steps = 0;
    std::uint64_t seed = 0;
    long record_every = 1;
};

/// Chain configuration with the default start at the first piece's
/// barycenter (override initial_state for other starts).
inline ChainConfig make_chain_config(TargetDensity target, ProposalKernel proposal,
                                     long steps, std::uint64_t seed,
                                     long record_every = 1) {
    if (steps < 1) throw std::invalid_argument("ChainConfig: steps must be >= 1");
    if (record_every < 1) throw std::invalid_argument("ChainConfig: record_every must be >= 1");
    Point init = target.pieces().front().barycenter;
    if (!std::isfinite(target.log_density(init)))
        throw std::invalid_argument("ChainConfig: initial state off support");
    return ChainConfig{std::move(target), std::move(proposal), std::move(init),
                       steps, seed, record_every};
}

struct Trace {
    std::vector<Point> states;        // recorded states, starting with the initial one
    std::vector<long> steps;          // step index of each recorded state
    std::vector<std::uint8_t> accept_flags;  // one per step, all steps
    long n_steps = 0;
    std::uint64_t seed = 0;
    long record_every = 1;
    double acceptance_rate = 0.0;
};

/// min(pi(y)/pi(x), 1) for the symmetric-proposal Metropolis rule, evaluated
/// in log space. Requires pi(x) > 0; returns 0 when y is off support.
inline double acceptance_probability(const TargetDensity& target, const Point& x,
                                     const Point& y) {
    const double lx = target.log_density(x);
    if (!std::isfinite(lx))
        throw std::invalid_argument("acceptance_probability: current state has zero density");
    const double ly = target.log_density(y);
    if (!std::isfinite(ly)) return 0.0;
    return std::exp(std::min(0.0, ly - lx));
}

/// One Metropolis step: propose, then accept by comparing a log-uniform
/// draw against the log density ratio. Rejection returns the same state.
inline std::pair<Point, bool> step(const Point& state, const TargetDensity& target,
                                   const ProposalKernel& proposal, RandomStream& rng) {
    const double lx = target.log_density(state);
    if (!std::isfinite(lx)) throw std::invalid_argument("step: state off support");
    Point y = proposal.propose(state, rng);
    const double ly = target.log_density(y);
    const double u = rng.uniform01();
    if (std::log(u) < ly - lx) return {std::move(y), true};
    return {state, false};
}

inline std::pair<Point, bool> step(const Point& state, const ChainConfig& config,
                                   RandomStream& rng) {
    return step(state, config.target, config.proposal, rng);
}

/// Seeded multi-step run. Deterministic given the seed; records the initial
/// state and every record_every-th step. Acceptance statistics cover all
/// steps regardless of thinning.
inline Trace run_chain(const ChainConfig& config) {
    if (config.steps < 1) throw std::invalid_argument("run_chain: steps must be >= 1");
    if (config.record_every < 1)
        throw std::invalid_argument("run_chain: record_every must be >= 1");
    RandomStream rng(config.seed);
    Trace trace;
    trace.n_steps = config.steps;
    trace.seed = config.seed;
    trace.record_every = config.record_every;
    trace.accept_flags.reserve(static_cast<std::size_t>(config.steps));
    trace.states.reserve(static_cast<std::size_t>(config.steps / config.record_every) + 1);

    Point state = config.target.topology().canonical(config.initial_state);
    double lx = config.target.log_density(state);
    if (!std::isfinite(lx)) throw std::invalid_argument("run_chain: initial state off support");
    trace.states.push_back(state);
    trace.steps.push_back(0);

    long accepted = 0;
    for (long t = 1; t <= config.steps; ++t) {
        Point y = config.proposal.propose(state, rng);
        const double ly = config.target.log_density(y);
        const double u = rng.uniform01();
        const bool accept = std::log(u) < ly - lx;
        if (accept) {
            state = std::move(y);
            lx = ly;
            ++accepted;
        }
        trace.accept_flags.push_back(accept ? 1 : 0);
        if (t % config.record_every == 0) {
            trace.states.push_back(state);
            trace.steps.push_back(t);
        }
    }
    trace.acceptance_rate =
        static_cast<double>(accepted) / static_cast<double>(config.steps);
    return trace;
}

}  // namespace swmc
