#pragma once

// Independent oracles: the closed-form transition law of the linear
// birth-death-immigration process and exact forward (Gillespie) simulation.

#include <cstdint>
#include <map>
#include <vector>

#include "bdbridge/likelihood.hpp"
#include "bdbridge/models.hpp"
#include "bdbridge/observations.hpp"
#include "bdbridge/random.hpp"

namespace bdbridge {

/// p_ij(t) for the linear birth-death-immigration process, lambda != mu.
///
/// Y_t | Y_0 = i  =  X + Y with X ~ Binomial(i, p) surviving founder lineages
/// and Y | X ~ NegBin(X + nu/lambda, alpha), where
///
///   rho   = exp(-(mu - lambda) t)
///   p     = rho (mu - lambda) / (mu - lambda rho)
///   alpha = lambda (1 - rho) / (mu - lambda rho)
///
/// and NegBin(r, a) has pmf C(y + r - 1, y) a^y (1 - a)^r (mean r a / (1 - a)).
/// Summed over X in log space.
///
/// Throws UnsupportedError for lambda == mu, and for lambda == 0 with nu > 0.
double lbdi_transition(const LbdiParams& params, int i, int j, double t);

struct SimPath {
    double horizon = 0.0;
    std::vector<double> times;  // times[0] = 0, then one entry per jump
    std::vector<int> states;    // state after each entry of `times`

    int final_state() const { return states.back(); }
};

struct TerminalState {
    int state = 0;
    int ups = 0;
};

SimPath gillespie_simulate(const BirthDeathModel& model, int y0, double t, Philox4x32& rng);

// Forward simulation keeping only the state at the horizon (and the number of
// upward jumps, which is the infection count for the SIR reduction).
TerminalState simulate_terminal(const BirthDeathModel& model, int y0, double t, Philox4x32& rng);

struct TerminalCounts {
    std::map<int, std::uint64_t> counts;
    std::uint64_t n = 0;

    McEstimate estimate(int j) const;
};

TerminalCounts terminal_distribution(const BirthDeathModel& model, int i, double t,
                                     std::uint64_t n, const EstimateOptions& options = {});

// Hit fraction of n forward paths ending at j, with binomial standard error.
McEstimate straight_estimate(const BirthDeathModel& model, int i, int j, double t,
                             std::uint64_t n, const EstimateOptions& options = {});

// Forward SIR epidemic from (s0, i0) recorded as susceptible counts at
// `times` (ascending, first entry 0).
Observations simulate_sir_observations(const SirParams& params, int s0, int i0,
                                       const std::vector<double>& times, Philox4x32& rng);

}  // namespace bdbridge
