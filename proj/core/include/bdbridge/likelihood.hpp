#pragma once

// Complete-path likelihood and the bridge-sampling Monte Carlo estimators of
// transition probabilities.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "bdbridge/counting.hpp"
#include "bdbridge/models.hpp"
#include "bdbridge/sampler.hpp"

namespace bdbridge {

inline constexpr std::uint64_t kDefaultSeed = 20211227;

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    double log_value = -std::numeric_limits<double>::infinity();
    std::uint64_t n = 0;
};

// Finite ascending set of admissible up-jump counts.
struct BSet {
    std::vector<int> values;

    static BSet range(int first, int last);
    static BSet single(int ups) { return BSet{{ups}}; }

    // Throws DomainError unless nonempty, strictly ascending and nonnegative.
    void validate() const;
};

struct EstimateOptions {
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t stream = 0;
    int threads = 1;
    std::size_t chunk_size = 4096;
    SamplerOptions sampler;
    // Explicit taboo bounds; default derives them from the model boundaries.
    std::optional<int> lower_bound;
    std::optional<int> upper_bound;
};

/// Streaming mean of nonnegative weights given on the log scale. Keeps a
/// running maximum so rare-event weights neither underflow nor overflow.
class LogWeightAccumulator {
  public:
    void add(double log_weight) noexcept;
    void merge(const LogWeightAccumulator& other) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    // Mean of exp(log_weight) times exp(log_scale), with its standard error.
    McEstimate estimate(double log_scale = 0.0) const noexcept;

  private:
    void rescale(double new_max) noexcept;

    std::uint64_t n_ = 0;
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
    double sum_sq_ = 0.0;
};

// Log-likelihood of a complete path. -inf when the path uses a jump whose rate
// is zero. Throws DomainError for malformed paths or for a state outside the
// model's state space reached before any impossible jump.
double path_loglik(const BirthDeathModel& model, const BridgePath& path);

// Same without validation; for paths produced by the samplers.
double path_loglik_unchecked(const BirthDeathModel& model, const BridgePath& path) noexcept;

// Bridge spec with taboo bounds derived from the model boundaries (or the
// overrides in `options`). nullopt when the space is structurally empty.
std::optional<BridgeSpec> bridge_spec_for(const BirthDeathModel& model, int i, int j, int ups,
                                          double t, const EstimateOptions& options = {});

McEstimate estimate_pij(const BirthDeathModel& model, int i, int j, double t, const BSet& bset,
                        std::uint64_t n, const EstimateOptions& options = {});

McEstimate estimate_pij_B(const BirthDeathModel& model, int i, int j, double t, int ups,
                          std::uint64_t n, const EstimateOptions& options = {});

struct BSetOptions {
    std::uint64_t pilot_samples = 2000;
    int max_span = 400;
    int quiet_run = 3;
    EstimateOptions estimate;
};

// Grows B from (j-i)^+ with cheap pilot estimates of p^B until `quiet_run`
// consecutive increments fall below eps * running total; returns the range up
// to the last significant B.
BSet choose_bset(int i, int j, const BirthDeathModel& model, double t, double eps,
                 const BSetOptions& options = {});

}  // namespace bdbridge
