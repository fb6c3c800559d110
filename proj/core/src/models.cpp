#include "bdbridge/models.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "bdbridge/errors.hpp"

namespace bdbridge {
namespace {

void require_rate_parameter(double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0) {
        std::ostringstream msg;
        msg << "rate parameter " << name << " must be finite and >= 0, got " << value;
        throw DomainError(msg.str());
    }
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

BirthDeathModel::BirthDeathModel(Impl impl, Boundary lower, Boundary upper, std::string name)
    : impl_(std::move(impl)), lower_(lower), upper_(upper), name_(std::move(name)) {
    if (lower_.active() && upper_.active() && lower_.state >= upper_.state) {
        throw DomainError("lower boundary must lie below upper boundary");
    }
}

BirthDeathModel BirthDeathModel::lbdi(const LbdiParams& p) {
    require_rate_parameter(p.lambda, "lambda");
    require_rate_parameter(p.mu, "mu");
    require_rate_parameter(p.nu, "nu");
    const Boundary lower = p.nu > 0.0 ? Boundary::reflecting(0) : Boundary::absorbing(0);
    return BirthDeathModel(p, lower, Boundary::none(), "lbdi");
}

BirthDeathModel BirthDeathModel::sis(const SisParams& p) {
    if (p.n0 < 1) {
        throw DomainError("SIS population size n0 must be >= 1");
    }
    require_rate_parameter(p.beta, "beta");
    require_rate_parameter(p.gamma, "gamma");
    return BirthDeathModel(p, Boundary::absorbing(0), Boundary::reflecting(p.n0), "sis");
}

BirthDeathModel BirthDeathModel::sir_infectious(const SirParams& p, int s0) {
    if (p.n0 < 1) {
        throw DomainError("SIR population size n0 must be >= 1");
    }
    require_rate_parameter(p.beta, "beta");
    require_rate_parameter(p.gamma, "gamma");
    if (s0 < 0 || s0 > p.n0) {
        std::ostringstream msg;
        msg << "initial susceptible count " << s0 << " outside [0, " << p.n0 << "]";
        throw DomainError(msg.str());
    }
    return BirthDeathModel(SirReduced{p, s0}, Boundary::absorbing(0), Boundary::reflecting(p.n0),
                           "sir");
}

BirthDeathModel BirthDeathModel::custom(RateFunction birth, RateFunction death, Boundary lower,
                                        Boundary upper, std::string name) {
    if (!birth || !death) {
        throw DomainError("custom model needs both rate functions");
    }
    auto check_zero = [](const RateFunction& f, int s, const char* what) {
        if (f(s) != 0.0) {
            std::ostringstream msg;
            msg << what << " rate must vanish at boundary state " << s;
            throw DomainError(msg.str());
        }
    };
    if (lower.kind == BoundaryKind::reflecting) {
        check_zero(death, lower.state, "death");
    } else if (lower.kind == BoundaryKind::absorbing) {
        check_zero(death, lower.state, "death");
        check_zero(birth, lower.state, "birth");
    }
    if (upper.kind == BoundaryKind::reflecting) {
        check_zero(birth, upper.state, "birth");
    } else if (upper.kind == BoundaryKind::absorbing) {
        check_zero(death, upper.state, "death");
        check_zero(birth, upper.state, "birth");
    }
    return BirthDeathModel(Custom{std::move(birth), std::move(death)}, lower, upper,
                           std::move(name));
}

bool BirthDeathModel::in_state_space(int state) const noexcept {
    if (lower_.active() && state < lower_.state) {
        return false;
    }
    if (upper_.active() && state > upper_.state) {
        return false;
    }
    return true;
}

bool BirthDeathModel::is_absorbing(int state) const noexcept {
    return (lower_.kind == BoundaryKind::absorbing && state == lower_.state) ||
           (upper_.kind == BoundaryKind::absorbing && state == upper_.state);
}

Rates BirthDeathModel::rates_unchecked(int state, int ups) const noexcept {
    const double y = state;
    return std::visit(
        Overloaded{
            [&](const LbdiParams& p) { return Rates{p.lambda * y + p.nu, p.mu * y}; },
            [&](const SisParams& p) {
                return Rates{p.beta * y * static_cast<double>(p.n0 - state), p.gamma * y};
            },
            [&](const SirReduced& r) {
                const int s = r.s0 - ups;
                const double susceptible = s > 0 ? static_cast<double>(s) : 0.0;
                return Rates{r.params.beta * susceptible * y, r.params.gamma * y};
            },
            [&](const Custom& c) { return Rates{c.birth(state), c.death(state)}; },
        },
        impl_);
}

Rates BirthDeathModel::rates(int state, int ups) const {
    if (!in_state_space(state)) {
        std::ostringstream msg;
        msg << "state " << state << " outside the state space of model '" << name_ << "'";
        throw DomainError(msg.str());
    }
    if (ups < 0) {
        throw DomainError("up-jump count must be >= 0");
    }
    Rates r = rates_unchecked(state, ups);
    if (!std::isfinite(r.birth) || !std::isfinite(r.death) || r.birth < 0.0 || r.death < 0.0) {
        std::ostringstream msg;
        msg << "model '" << name_ << "' produced invalid rates (" << r.birth << ", " << r.death
            << ") at state " << state;
        throw DomainError(msg.str());
    }
    if (is_absorbing(state)) {
        r = {};
    } else {
        if (lower_.kind == BoundaryKind::reflecting && state == lower_.state) {
            r.death = 0.0;
        }
        if (upper_.kind == BoundaryKind::reflecting && state == upper_.state) {
            r.birth = 0.0;
        }
    }
    return r;
}

}  // namespace bdbridge
