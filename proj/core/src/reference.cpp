#include "bdbridge/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bdbridge/errors.hpp"
#include "bdbridge/parallel.hpp"

namespace bdbridge {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// x * log(p) with 0 * log(0) = 0.
double xlogy(double x, double p) { return x == 0.0 ? 0.0 : x * std::log(p); }

double log_negbin(int y, double r, double a) {
    if (r == 0.0 || a == 0.0) {
        return y == 0 ? 0.0 : kNegInf;
    }
    return std::lgamma(y + r) - std::lgamma(y + 1.0) - std::lgamma(r) + xlogy(y, a) +
           r * std::log1p(-a);
}

void require_start(const BirthDeathModel& model, int y0, double t) {
    if (!model.in_state_space(y0)) {
        std::ostringstream msg;
        msg << "initial state " << y0 << " outside the model's state space";
        throw DomainError(msg.str());
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("simulation horizon must be finite and >= 0");
    }
}

}  // namespace

double lbdi_transition(const LbdiParams& params, int i, int j, double t) {
    const double lambda = params.lambda;
    const double mu = params.mu;
    const double nu = params.nu;
    if (lambda < 0.0 || mu < 0.0 || nu < 0.0) {
        throw DomainError("L-BDI rates must be >= 0");
    }
    if (i < 0 || j < 0) {
        throw DomainError("L-BDI states must be >= 0");
    }
    if (!(t > 0.0)) {
        throw DomainError("elapsed time must be > 0");
    }
    if (lambda == mu) {
        throw UnsupportedError("closed form requires lambda != mu");
    }
    if (lambda == 0.0 && nu > 0.0) {
        throw UnsupportedError("closed form requires lambda > 0 when nu > 0");
    }
    const double rho = std::exp(-(mu - lambda) * t);
    const double denom = mu - lambda * rho;
    const double p = rho * (mu - lambda) / denom;
    const double alpha = lambda * (1.0 - rho) / denom;
    const double delta = lambda > 0.0 ? nu / lambda : 0.0;

    double max_term = kNegInf;
    std::vector<double> terms;
    for (int x = 0; x <= std::min(i, j); ++x) {
        const double log_binom = std::lgamma(i + 1.0) - std::lgamma(x + 1.0) -
                                 std::lgamma(i - x + 1.0) + xlogy(x, p) +
                                 (i - x == 0 ? 0.0 : (i - x) * std::log1p(-p));
        const double term = log_binom + log_negbin(j - x, x + delta, alpha);
        terms.push_back(term);
        max_term = std::max(max_term, term);
    }
    if (max_term == kNegInf) {
        return 0.0;
    }
    double sum = 0.0;
    for (double term : terms) {
        sum += std::exp(term - max_term);
    }
    return std::exp(max_term + std::log(sum));
}

SimPath gillespie_simulate(const BirthDeathModel& model, int y0, double t, Philox4x32& rng) {
    require_start(model, y0, t);
    SimPath path;
    path.horizon = t;
    path.times.push_back(0.0);
    path.states.push_back(y0);
    int state = y0;
    int ups = 0;
    double now = 0.0;
    for (;;) {
        const Rates r = model.rates_unchecked(state, ups);
        const double total = r.total();
        if (!(total > 0.0)) {
            break;
        }
        now += exponential(rng, total);
        if (now >= t) {
            break;
        }
        if (uniform_open01(rng) * total < r.birth) {
            ++state;
            ++ups;
        } else {
            --state;
        }
        path.times.push_back(now);
        path.states.push_back(state);
    }
    return path;
}

TerminalState simulate_terminal(const BirthDeathModel& model, int y0, double t, Philox4x32& rng) {
    TerminalState s{y0, 0};
    double now = 0.0;
    for (;;) {
        const Rates r = model.rates_unchecked(s.state, s.ups);
        const double total = r.total();
        if (!(total > 0.0)) {
            return s;
        }
        now += exponential(rng, total);
        if (now >= t) {
            return s;
        }
        if (uniform_open01(rng) * total < r.birth) {
            ++s.state;
            ++s.ups;
        } else {
            --s.state;
        }
    }
}

McEstimate TerminalCounts::estimate(int j) const {
    McEstimate out;
    out.n = n;
    const auto it = counts.find(j);
    if (n == 0 || it == counts.end()) {
        return out;
    }
    const double p = static_cast<double>(it->second) / static_cast<double>(n);
    out.value = p;
    out.log_value = std::log(p);
    out.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return out;
}

TerminalCounts terminal_distribution(const BirthDeathModel& model, int i, double t,
                                     std::uint64_t n, const EstimateOptions& options) {
    require_start(model, i, t);
    const std::size_t chunks = (n + options.chunk_size - 1) / options.chunk_size;
    std::vector<std::map<int, std::uint64_t>> partials(chunks);
    const RngStream root{options.seed, options.stream};
    parallel_chunks(n, options.chunk_size, options.threads,
                    [&](std::size_t c, std::size_t begin, std::size_t end) {
                        Philox4x32 rng = root.child(c).engine();
                        auto& counts = partials[c];
                        for (std::size_t k = begin; k < end; ++k) {
                            ++counts[simulate_terminal(model, i, t, rng).state];
                        }
                    });
    TerminalCounts out;
    out.n = n;
    for (const auto& p : partials) {
        for (const auto& [state, count] : p) {
            out.counts[state] += count;
        }
    }
    return out;
}

McEstimate straight_estimate(const BirthDeathModel& model, int i, int j, double t,
                             std::uint64_t n, const EstimateOptions& options) {
    if (n < 1) {
        throw DomainError("sample size must be >= 1");
    }
    return terminal_distribution(model, i, t, n, options).estimate(j);
}

Observations simulate_sir_observations(const SirParams& params, int s0, int i0,
                                       const std::vector<double>& times, Philox4x32& rng) {
    if (times.empty() || times.front() != 0.0) {
        throw DomainError("observation times must start at 0");
    }
    const BirthDeathModel model = BirthDeathModel::sir_infectious(params, s0);
    const SimPath path = gillespie_simulate(model, i0, times.back(), rng);
    Observations obs;
    std::size_t event = 1;
    int infections = 0;
    for (double when : times) {
        while (event < path.times.size() && path.times[event] <= when) {
            infections += path.states[event] > path.states[event - 1] ? 1 : 0;
            ++event;
        }
        obs.times.push_back(when);
        obs.susceptible.push_back(s0 - infections);
    }
    obs.validate();
    return obs;
}

}  // namespace bdbridge
