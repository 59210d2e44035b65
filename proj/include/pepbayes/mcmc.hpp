#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pepbayes/random.hpp"

namespace pepbayes {

struct MetropolisStats {
    std::size_t accepted = 0;
    std::vector<double> log_posterior_trace; // value held after each step
};

/// Random-walk Metropolis with a symmetric proposal. `state` is updated in
/// place; `record(state)` runs after every step with the current (accepted
/// or retained) state. The caller must start from a finite log target.
template <class LogTarget, class Proposal, class Record>
MetropolisStats run_metropolis(std::vector<double>& state, LogTarget&& log_target,
                               Proposal&& propose, std::size_t steps, rng::Stream& stream,
                               Record&& record) {
    MetropolisStats stats;
    stats.log_posterior_trace.reserve(steps);
    double current = log_target(state);
    std::vector<double> candidate;
    for (std::size_t step = 0; step < steps; ++step) {
        candidate = state;
        propose(candidate, stream);
        const double proposed = log_target(candidate);
        // log(u) is finite, so a -inf proposal can never be accepted.
        if (std::log(stream.u01_open()) < proposed - current) {
            state = candidate;
            current = proposed;
            ++stats.accepted;
        }
        stats.log_posterior_trace.push_back(current);
        record(state);
    }
    return stats;
}

} // namespace pepbayes
