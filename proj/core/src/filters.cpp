#include "bdbridge/filters.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "bdbridge/errors.hpp"
#include "bdbridge/parallel.hpp"
#include "bdbridge/reference.hpp"

namespace bdbridge {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) noexcept {
    if (a == kNegInf) {
        return b;
    }
    if (b == kNegInf) {
        return a;
    }
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_interval(int s_prev, int s_next, double dt) {
    std::ostringstream msg;
    if (s_next < 0 || s_next > s_prev) {
        msg << "susceptible count must be nonincreasing and >= 0, got " << s_prev << " -> "
            << s_next;
    } else if (!(dt > 0.0) || !std::isfinite(dt)) {
        msg << "observation interval must be finite and > 0, got " << dt;
    } else {
        return;
    }
    throw DomainError(msg.str());
}

void check_sir(const SirParams& p) {
    if (!(p.beta >= 0.0) || !(p.gamma >= 0.0) || !std::isfinite(p.beta) ||
        !std::isfinite(p.gamma)) {
        throw DomainError("SIR rates must be finite and >= 0");
    }
}

// Bridge samplers for one step, keyed by (i, j) with j in 0..i+B.
class SamplerCache {
  public:
    SamplerCache(int max_i, int ups, double dt, SamplerOptions options)
        : ups_(ups), dt_(dt), width_(max_i + ups + 1), options_(options),
          slots_(static_cast<std::size_t>(max_i + 1) * static_cast<std::size_t>(width_)) {}

    BridgeSampler& get(int i, int j) {
        auto& slot = slots_[static_cast<std::size_t>(i) * width_ + static_cast<std::size_t>(j)];
        if (!slot) {
            const BridgeSpec spec{i, j, ups_, dt_, 0, ups_ + i + 1};
            slot = std::make_unique<BridgeSampler>(spec, options_);
        }
        return *slot;
    }

  private:
    int ups_;
    double dt_;
    int width_;
    SamplerOptions options_;
    std::vector<std::unique_ptr<BridgeSampler>> slots_;
};

}  // namespace

FilterState FilterState::initial(int i0) {
    if (i0 < 0) {
        throw DomainError("initial infectious count must be >= 0");
    }
    FilterState s;
    s.posterior.assign(static_cast<std::size_t>(i0) + 1, 0.0);
    s.posterior[static_cast<std::size_t>(i0)] = 1.0;
    s.p_alive = i0 > 0 ? 1.0 : 0.0;
    return s;
}

void FilterState::validate() const {
    if (posterior.empty()) {
        throw DomainError("filter posterior is empty");
    }
    double total = 0.0;
    for (double w : posterior) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw DomainError("filter posterior has a negative or non-finite entry");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw DomainError("filter posterior does not sum to 1");
    }
    if (std::abs(p_alive - (1.0 - posterior[0])) > 1e-12) {
        throw DomainError("p_alive disagrees with the posterior mass at 0");
    }
}

FilterStep igbs_filter_step(const FilterState& state, const SirParams& params, int s_prev,
                            int s_next, double dt, const FilterOptions& options) {
    check_interval(s_prev, s_next, dt);
    check_sir(params);
    state.validate();
    if (options.replicates < 1) {
        throw DomainError("replicate count m must be >= 1");
    }
    const int ups = s_prev - s_next;
    const double p = state.p_alive;

    FilterStep out;
    out.state.step = state.step + 1;
    const double log_dead = (ups == 0 && p < 1.0) ? std::log1p(-p) : kNegInf;

    // Positive part of the posterior, as a cumulative table for the draw of i.
    std::vector<int> support;
    std::vector<double> cumulative;
    for (std::size_t i = 1; i < state.posterior.size(); ++i) {
        if (state.posterior[i] > 0.0) {
            support.push_back(static_cast<int>(i));
            cumulative.push_back((cumulative.empty() ? 0.0 : cumulative.back()) +
                                 state.posterior[i]);
        }
    }

    if (p <= 0.0 || support.empty()) {
        out.cond_loglik = ups == 0 ? 0.0 : kNegInf;
        out.state.posterior = {1.0};
        out.state.p_alive = 0.0;
        return out;
    }

    const int max_i = support.back();
    const std::size_t width = static_cast<std::size_t>(max_i + ups) + 1;
    const std::size_t m = options.replicates;
    std::vector<int> ends(m);
    std::vector<double> log_q(m);

    const BirthDeathModel model = BirthDeathModel::sir_infectious(
        SirParams{std::max(params.n0, s_prev + max_i), params.beta, params.gamma}, s_prev);
    const RngStream root =
        RngStream{options.seed, options.stream}.child(static_cast<std::uint64_t>(state.step));

    struct Worker {
        SamplerCache cache;
        BridgePath path;
    };
    parallel_chunks(
        m, options.chunk_size, options.threads,
        [&] { return Worker{SamplerCache(max_i, ups, dt, options.sampler), {}}; },
        [&](Worker& w, std::size_t c, std::size_t begin, std::size_t end) {
            Philox4x32 rng = root.child(c).engine();
            for (std::size_t r = begin; r < end; ++r) {
                const double u = uniform_open01(rng) * cumulative.back();
                const auto pos = std::upper_bound(cumulative.begin(), cumulative.end(), u);
                const int i = support[std::min<std::size_t>(
                    static_cast<std::size_t>(pos - cumulative.begin()), support.size() - 1)];
                const int j = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(i + ups) + 1));
                ends[r] = j;
                BridgeSampler& sampler = w.cache.get(i, j);
                if (sampler.empty()) {
                    log_q[r] = kNegInf;
                    continue;
                }
                sampler.draw(w.path, rng);
                log_q[r] = path_loglik_unchecked(model, w.path) - sampler.log_density() +
                           std::log(static_cast<double>(i + ups + 1));
            }
        });

    // Deterministic reduction in replicate order.
    double top = kNegInf;
    for (double v : log_q) {
        top = std::max(top, v);
    }
    std::vector<double> by_end(width, 0.0);
    double total = 0.0;
    if (top != kNegInf) {
        for (std::size_t r = 0; r < m; ++r) {
            if (log_q[r] != kNegInf) {
                const double w = std::exp(log_q[r] - top);
                by_end[static_cast<std::size_t>(ends[r])] += w;
                total += w;
                ++out.positive_weights;
            }
        }
    }

    // log of p * mean(q), then of the full predictive probability.
    const double log_alive =
        total > 0.0 ? std::log(p) + top + std::log(total / static_cast<double>(m)) : kNegInf;
    out.cond_loglik = log_add(log_alive, log_dead);
    if (out.cond_loglik == kNegInf) {
        out.state.posterior = state.posterior;
        out.state.p_alive = state.p_alive;
        return out;
    }

    out.state.posterior.assign(width, 0.0);
    const double alive_scale = total > 0.0 ? std::exp(log_alive - out.cond_loglik) / total : 0.0;
    for (std::size_t j = 0; j < width; ++j) {
        out.state.posterior[j] = by_end[j] * alive_scale;
    }
    if (log_dead != kNegInf) {
        out.state.posterior[0] += std::exp(log_dead - out.cond_loglik);
    }
    const double norm =
        std::accumulate(out.state.posterior.begin(), out.state.posterior.end(), 0.0);
    for (double& v : out.state.posterior) {
        v /= norm;
    }
    // Trim trailing zeros so the support stays within the reachable range.
    while (out.state.posterior.size() > 1 && out.state.posterior.back() == 0.0) {
        out.state.posterior.pop_back();
    }
    out.state.p_alive = 1.0 - out.state.posterior[0];
    return out;
}

FilterResult igbs_filter(const SirParams& params, const Observations& obs, int i0,
                         const FilterOptions& options) {
    obs.validate();
    check_sir(params);
    if (i0 < 1) {
        throw DomainError("initial infectious count i0 must be >= 1");
    }
    FilterResult out;
    FilterState state = FilterState::initial(i0);
    for (std::size_t k = 1; k <= obs.intervals(); ++k) {
        FilterStep step = igbs_filter_step(state, params, obs.susceptible[k - 1],
                                           obs.susceptible[k], obs.elapsed(k), options);
        out.loglik += step.cond_loglik;
        out.steps.push_back({step.cond_loglik, step.state.p_alive});
        if (step.cond_loglik == kNegInf) {
            out.loglik = kNegInf;
            out.posterior_final = step.state.posterior;
            return out;
        }
        state = std::move(step.state);
    }
    out.posterior_final = std::move(state.posterior);
    return out;
}

double igbs_filter_loglik(const SirParams& params, const Observations& obs, int i0,
                          const FilterOptions& options) {
    return igbs_filter(params, obs, i0, options).loglik;
}

BootstrapResult bootstrap_filter(const SirParams& params, const Observations& obs, int i0,
                                 const BootstrapOptions& options) {
    obs.validate();
    check_sir(params);
    if (i0 < 1) {
        throw DomainError("initial infectious count i0 must be >= 1");
    }
    if (options.particles < 1) {
        throw DomainError("particle count must be >= 1");
    }
    if (!(options.threshold >= 0.0 && options.threshold <= 1.0)) {
        throw DomainError("failure threshold must lie in [0, 1]");
    }

    BootstrapResult out;
    const std::size_t n = options.particles;
    const std::size_t chunks = (n + options.chunk_size - 1) / options.chunk_size;
    ParticleState cloud{std::vector<int>{i0}, 1};
    const RngStream root{options.seed, options.stream};

    for (std::size_t k = 1; k <= obs.intervals(); ++k) {
        const int s_prev = obs.susceptible[k - 1];
        const int target = s_prev - obs.susceptible[k];
        const double dt = obs.elapsed(k);
        const BirthDeathModel model = BirthDeathModel::sir_infectious(
            SirParams{std::max(params.n0, s_prev + *std::max_element(cloud.survivors.begin(),
                                                                     cloud.survivors.end())),
                      params.beta, params.gamma},
            s_prev);
        const RngStream step_root = root.child(k);
        std::vector<std::vector<int>> kept(chunks);
        parallel_chunks(n, options.chunk_size, options.threads,
                        [&](std::size_t c, std::size_t begin, std::size_t end) {
                            Philox4x32 rng = step_root.child(c).engine();
                            for (std::size_t r = begin; r < end; ++r) {
                                const int start = cloud.survivors[uniform_index(
                                    rng, cloud.survivors.size())];
                                const TerminalState fin =
                                    simulate_terminal(model, start, dt, rng);
                                if (fin.ups == target) {
                                    kept[c].push_back(fin.state);
                                }
                            }
                        });
        ParticleState next{{}, n};
        for (auto& part : kept) {
            next.survivors.insert(next.survivors.end(), part.begin(), part.end());
        }
        const double survival = next.survival();
        out.survival.push_back(survival);
        out.survival_min = std::min(out.survival_min, survival);
        if (survival < options.threshold) {
            out.failed = true;
        }
        if (next.survivors.empty()) {
            out.loglik = kNegInf;
            out.failed = true;
            return out;
        }
        out.loglik += std::log(survival);
        cloud = std::move(next);
    }
    return out;
}

std::vector<ScanCell> failure_domain_scan(const Observations& obs, int i0,
                                          const std::vector<double>& betas,
                                          const std::vector<double>& gammas,
                                          const std::vector<double>& thresholds,
                                          const BootstrapOptions& options) {
    const int n0 = obs.susceptible.front() + i0;
    std::vector<ScanCell> cells;
    cells.reserve(betas.size() * gammas.size());
    for (double beta : betas) {
        for (double gamma : gammas) {
            BootstrapOptions run = options;
            run.threshold = 0.0;
            const BootstrapResult r = bootstrap_filter(SirParams{n0, beta, gamma}, obs, i0, run);
            ScanCell cell{beta, gamma, r.survival_min, r.loglik, {}};
            for (double th : thresholds) {
                cell.failed.push_back(r.loglik == kNegInf || r.survival_min < th);
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

}  // namespace bdbridge
