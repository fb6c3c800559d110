#pragma once

// Uniform sampling over restricted bridge path spaces.
//
// A path with K jumps decomposes into its ordered jump times (uniform on the
// open simplex 0 < tau_1 < ... < tau_K < t) and its skeleton (uniform over
// the finite set counted in counting.hpp). The two draws are independent.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "bdbridge/counting.hpp"
#include "bdbridge/random.hpp"

namespace bdbridge {

/// Decomposed path: times tau_0..tau_{K+1} with tau_0 = 0 and tau_{K+1} = t,
/// states w_0..w_{K+1} with w_{K+1} = w_K.
struct BridgePath {
    std::vector<double> times;
    std::vector<int> states;

    int jumps() const noexcept { return static_cast<int>(states.size()) - 2; }
    int ups() const noexcept;
};

// Structural checks (lengths, time ordering, +-1 steps). Throws DomainError.
void validate_path(const BridgePath& path);

// Additionally checks the path against a bridge spec: endpoints, up-jump
// count, taboo bounds and elapsed time.
void validate_path(const BridgePath& path, const BridgeSpec& spec);

enum class SkeletonStrategy {
    automatic,   // rejection unless acceptance is poor and K is small
    rejection,   // shuffle the +-1 steps, reject on taboo contact
    sequential,  // count-guided step-by-step draw (K <= 64)
};

struct SamplerOptions {
    SkeletonStrategy strategy = SkeletonStrategy::automatic;
    std::uint64_t max_attempts = 1'000'000;
    // automatic switches to sequential below this expected acceptance rate.
    double min_rejection_acceptance = 0.1;
};

struct AcceptanceStats {
    std::uint64_t draws = 0;
    std::uint64_t attempts = 0;

    double rate() const noexcept {
        return attempts == 0 ? 1.0 : static_cast<double>(draws) / static_cast<double>(attempts);
    }
};

// K i.i.d. Uniform(0, t) draws, sorted. Exact ties are redrawn.
void sample_times(std::span<double> out, double t, Philox4x32& rng);
std::vector<double> sample_times(int jumps, double t, Philox4x32& rng);

/// Uniform sampler over the skeletons of one bridge spec.
class SkeletonSampler {
  public:
    explicit SkeletonSampler(const BridgeSpec& spec, SamplerOptions options = {});

    // Writes w_0..w_K into `out` (size K + 1). Returns the number of attempts
    // used (1 for the sequential strategy). Throws DomainError for an empty
    // space and RejectionLimitError when max_attempts is exhausted.
    std::uint64_t sample(std::span<int> out, Philox4x32& rng);

    bool empty() const noexcept { return log_count_ == -std::numeric_limits<double>::infinity(); }
    double log_count() const noexcept { return log_count_; }
    // card / C(K', B'), the probability that one shuffle survives.
    double expected_acceptance() const noexcept { return expected_acceptance_; }
    SkeletonStrategy strategy() const noexcept { return strategy_; }
    const AcceptanceStats& stats() const noexcept { return stats_; }
    const BridgeSpec& spec() const noexcept { return spec_; }

  private:
    std::uint64_t sample_rejection(std::span<int> out, Philox4x32& rng);
    void sample_sequential(std::span<int> out, Philox4x32& rng);

    BridgeSpec spec_;
    SamplerOptions options_;
    SkeletonStrategy strategy_;
    double log_count_;
    double expected_acceptance_ = 1.0;
    int free_steps_ = 0;   // steps before a forced absorbing jump
    int free_target_ = 0;  // state reached after the free steps
    int free_ups_ = 0;
    int final_step_ = 0;   // forced last step (-1, +1) or 0 when none
    std::vector<int> steps_;
    AcceptanceStats stats_;
};

std::vector<int> sample_skeleton(const BridgeSpec& spec, Philox4x32& rng,
                                 SamplerOptions options = {});

/// Draws whole paths uniformly from one restricted path space. Holds the
/// cached count, density and step buffer, so reuse one per spec.
class BridgeSampler {
  public:
    explicit BridgeSampler(const BridgeSpec& spec, SamplerOptions options = {});

    bool empty() const noexcept { return skeleton_.empty(); }
    // log h = log f + log g. Throws DomainError when the space is empty.
    double log_density() const;
    const BridgeSpec& spec() const noexcept { return skeleton_.spec(); }
    const SkeletonSampler& skeleton() const noexcept { return skeleton_; }

    void draw(BridgePath& out, Philox4x32& rng);

  private:
    SkeletonSampler skeleton_;
    double log_density_ = 0.0;
};

BridgePath sample_bridge(const BridgeSpec& spec, Philox4x32& rng, SamplerOptions options = {});

}  // namespace bdbridge
