#pragma once

// Exact combinatorics of integer-grid bridges with taboo bounds.
//
// A skeleton is the sequence of embedded-chain states w_0..w_K from i to j
// with exactly B up-steps and D = B + i - j down-steps (K = B + D). With taboo
// bounds (l, u) every state must stay strictly inside the corridor. One
// exception models absorption: if j equals a bound, the path stays strictly
// inside for w_0..w_{K-1} and lands on the bound with its final jump.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace bdbridge {

using BigCount = boost::multiprecision::cpp_int;

// Largest K for which bridge_count() returns a native integer.
inline constexpr int kExactCountMaxJumps = 64;
inline constexpr int kDefaultEnumerationLimit = 20;

/// Identifies one restricted bridge space: start i, end j, B up-jumps over
/// elapsed time t, with optional taboo bounds (absent = unbounded).
struct BridgeSpec {
    int i = 0;
    int j = 0;
    int ups = 0;
    double t = 1.0;
    std::optional<int> lower;
    std::optional<int> upper;

    int downs() const noexcept { return ups + i - j; }
    int jumps() const noexcept { return 2 * ups + i - j; }

    bool absorbed_at_lower() const noexcept { return lower && j == *lower; }
    bool absorbed_at_upper() const noexcept { return upper && j == *upper; }

    // Structurally possible: D >= 0 and i strictly inside the corridor; j
    // inside or on a bound. Does not check t.
    bool feasible() const noexcept;

    // Throws DomainError when the spec is malformed (negative counts, i on or
    // beyond a bound, j outside the closed corridor, t <= 0).
    void validate() const;
};

struct BridgeCount {
    BigCount exact;
    double log_count = 0.0;  // -inf when empty
    // Reflection terms beyond the first-order barrier corrections plus the
    // (l,u)/(u,l) double-reflection pair were needed.
    bool extended_series = false;

    bool empty() const { return exact == 0; }
};

// Full alternating two-barrier reflection series. Works for any K.
BridgeCount count_bridges(const BridgeSpec& spec);

// Native exact count. Throws CapacityError when K > kExactCountMaxJumps and
// DomainError for malformed specs.
std::uint64_t bridge_count(const BridgeSpec& spec);

// Which of the four barrier regimes applies: 1 = neither bound reachable,
// 2 = only the lower bound, 3 = only the upper bound, 4 = both.
int barrier_case(const BridgeSpec& spec);

// Four-case closed form with first-order corrections and a single
// double-reflection pair. Exact only when count_bridges() reports no
// extended terms. Native integers; K <= 64.
std::int64_t barrier_case_count(const BridgeSpec& spec);

// Brute force: every skeleton, each as w_0..w_K.
std::vector<std::vector<int>> enumerate_bridges(const BridgeSpec& spec,
                                                int max_jumps = kDefaultEnumerationLimit);

// log(K!) - K log(t): log density of the uniform law on the ordered jump-time
// simplex.
double log_simplex_density(int jumps, double t);

// log density of the uniform law on the whole restricted path space, or
// nullopt when the space is empty (zero measure).
std::optional<double> log_bridge_density(const BridgeSpec& spec);

// Walks of `steps` +-1 steps from `from` to `to` staying strictly inside
// (lower, upper). Native exact arithmetic; steps <= kExactCountMaxJumps.
std::uint64_t corridor_walks(int from, int to, int steps, std::optional<int> lower,
                             std::optional<int> upper);

// Exact binomial for small arguments (K <= 64), 0 outside [0, K].
std::uint64_t binomial_u64(int n, int k) noexcept;

double log_binomial(int n, int k) noexcept;

// Natural log of a nonnegative big integer (-inf for zero).
double log_of(const BigCount& value);

}  // namespace bdbridge
