#pragma once

// Likelihood of an SIR epidemic observed only through its susceptible counts.
//
// The bridge filter keeps a dense posterior over the hidden infectious count
// and estimates each one-step predictive probability by sampling bridges of
// the I-process with B = S_{k-1} - S_k forced infections. The bootstrap
// filter is the plain simulate-and-match baseline, kept for comparison and
// for its failure diagnostics.

#include <cstdint>
#include <limits>
#include <vector>

#include "bdbridge/likelihood.hpp"
#include "bdbridge/models.hpp"
#include "bdbridge/observations.hpp"
#include "bdbridge/sampler.hpp"

namespace bdbridge {

/// pr(I_k = j | S_{0:k}) on j = 0..posterior.size()-1.
struct FilterState {
    int step = 0;
    std::vector<double> posterior;
    double p_alive = 1.0;

    static FilterState initial(int i0);
    // Throws DomainError unless the posterior is a probability vector
    // (tolerance 1e-12) and p_alive = 1 - posterior[0].
    void validate() const;
};

struct FilterOptions {
    std::uint64_t replicates = 10'000;  // m per step
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t stream = 0;
    int threads = 1;
    std::size_t chunk_size = 1024;
    SamplerOptions sampler;
};

struct FilterStep {
    FilterState state;
    double cond_loglik = 0.0;
    // Replicates with a positive weight; zero together with cond_loglik = -inf
    // means no sampled bridge could explain the observation.
    std::uint64_t positive_weights = 0;
};

// One recursion step over an interval of length dt in which S drops from
// s_prev to s_next. Streams derive from (seed, stream, state.step), so equal
// options give common random numbers across parameter values.
FilterStep igbs_filter_step(const FilterState& state, const SirParams& params, int s_prev,
                            int s_next, double dt, const FilterOptions& options = {});

struct StepSummary {
    double cond_loglik = 0.0;
    double p_alive = 0.0;  // after the step
};

struct FilterResult {
    double loglik = 0.0;
    std::vector<StepSummary> steps;
    std::vector<double> posterior_final;
};

// Runs every step from delta_{i0}; stops at the first -inf. params.n0 is used
// as given (the SIR reduction only needs beta, gamma and the observed S).
FilterResult igbs_filter(const SirParams& params, const Observations& obs, int i0,
                         const FilterOptions& options = {});
double igbs_filter_loglik(const SirParams& params, const Observations& obs, int i0,
                          const FilterOptions& options = {});

/// Hidden I values of the particle cloud after weighting. With the 0-1
/// observation law every weight is 0 or 1, so the survivors are the posterior.
struct ParticleState {
    std::vector<int> survivors;
    std::uint64_t particles = 0;

    double survival() const noexcept {
        return particles == 0 ? 0.0
                              : static_cast<double>(survivors.size()) /
                                    static_cast<double>(particles);
    }
};

struct BootstrapOptions {
    std::uint64_t particles = 100'000;
    double threshold = 1e-3;
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t stream = 0;
    int threads = 1;
    std::size_t chunk_size = 4096;
};

struct BootstrapResult {
    double loglik = 0.0;
    std::vector<double> survival;  // surviving fraction per step
    bool failed = false;
    double survival_min = 1.0;
};

BootstrapResult bootstrap_filter(const SirParams& params, const Observations& obs, int i0,
                                 const BootstrapOptions& options = {});

struct ScanCell {
    double beta = 0.0;
    double gamma = 0.0;
    double survival_min = 1.0;
    double loglik = 0.0;
    std::vector<bool> failed;  // one flag per threshold
};

// One bootstrap run per grid point (beta-major order). A cell fails at a
// threshold when its minimum surviving fraction drops below it, so the failed
// sets shrink as the threshold decreases.
std::vector<ScanCell> failure_domain_scan(const Observations& obs, int i0,
                                          const std::vector<double>& betas,
                                          const std::vector<double>& gammas,
                                          const std::vector<double>& thresholds,
                                          const BootstrapOptions& options = {});

}  // namespace bdbridge
