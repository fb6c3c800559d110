#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace bdbridge {

enum class BoundaryKind { none, absorbing, reflecting };

// Behaviour of a birth-death process at the edge of its state space.
struct Boundary {
    BoundaryKind kind = BoundaryKind::none;
    int state = 0;

    static Boundary none() { return {}; }
    static Boundary absorbing(int s) { return {BoundaryKind::absorbing, s}; }
    static Boundary reflecting(int s) { return {BoundaryKind::reflecting, s}; }

    bool active() const { return kind != BoundaryKind::none; }
};

struct Rates {
    double birth = 0.0;
    double death = 0.0;

    double total() const { return birth + death; }
};

// Linear birth-death with immigration: birth = lambda*y + nu, death = mu*y.
struct LbdiParams {
    double lambda = 0.0;
    double mu = 0.0;
    double nu = 0.0;
};

// SIS in the infectious count: birth = beta*I*(n0-I), death = gamma*I.
struct SisParams {
    int n0 = 1;
    double beta = 0.0;
    double gamma = 0.0;
};

// Closed SIR population: infection beta*S*I, removal gamma*I.
struct SirParams {
    int n0 = 1;
    double beta = 0.0;
    double gamma = 0.0;
};

/// A one-dimensional birth-death process with explicit boundary metadata.
///
/// Rates are evaluated as `rates(state, ups)` where `ups` is the number of
/// upward jumps taken so far along the current path. Only the SIR reduction
/// uses it: every infection moves one individual out of S, so the hidden
/// susceptible count is `s0 - ups` and the I-process stays one-dimensional.
/// All other models ignore `ups`.
///
/// Values are immutable after construction and may be shared across threads.
class BirthDeathModel {
  public:
    using RateFunction = std::function<double(int state)>;

    static BirthDeathModel lbdi(const LbdiParams& p);
    static BirthDeathModel sis(const SisParams& p);
    // I-process of the SIR model started with s0 susceptibles.
    static BirthDeathModel sir_infectious(const SirParams& p, int s0);
    // User-supplied rates. Boundary metadata is trusted for bridge bounds;
    // reflecting/absorbing rate conventions are checked at the boundary states.
    static BirthDeathModel custom(RateFunction birth, RateFunction death, Boundary lower,
                                  Boundary upper, std::string name = "custom");

    // Checked evaluation; throws DomainError outside the state space or when a
    // custom rate is negative or non-finite.
    Rates rates(int state, int ups = 0) const;

    // Hot-path evaluation without state-space checks.
    Rates rates_unchecked(int state, int ups) const noexcept;

    bool in_state_space(int state) const noexcept;
    bool is_absorbing(int state) const noexcept;

    const Boundary& lower() const noexcept { return lower_; }
    const Boundary& upper() const noexcept { return upper_; }
    std::string_view name() const noexcept { return name_; }
    bool path_dependent() const noexcept { return std::holds_alternative<SirReduced>(impl_); }

  private:
    struct SirReduced {
        SirParams params;
        int s0;
    };
    struct Custom {
        RateFunction birth;
        RateFunction death;
    };
    using Impl = std::variant<LbdiParams, SisParams, SirReduced, Custom>;

    BirthDeathModel(Impl impl, Boundary lower, Boundary upper, std::string name);

    Impl impl_;
    Boundary lower_;
    Boundary upper_;
    std::string name_;
};

}  // namespace bdbridge
