#include "bdbridge/likelihood.hpp"

#include <cmath>
#include <sstream>

#include "bdbridge/errors.hpp"
#include "bdbridge/parallel.hpp"

namespace bdbridge {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

McEstimate exact(double value, std::uint64_t n) {
    return {value, 0.0, value > 0.0 ? std::log(value) : kNegInf, n};
}

void require_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        std::ostringstream msg;
        msg << "elapsed time must be finite and > 0, got " << t;
        throw DomainError(msg.str());
    }
}

}  // namespace

BSet BSet::range(int first, int last) {
    if (last < first) {
        throw DomainError("empty B range");
    }
    BSet out;
    for (int b = first; b <= last; ++b) {
        out.values.push_back(b);
    }
    return out;
}

void BSet::validate() const {
    if (values.empty()) {
        throw DomainError("B set must be nonempty");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] < 0 || (k > 0 && values[k] <= values[k - 1])) {
            throw DomainError("B set must be strictly ascending and nonnegative");
        }
    }
}

void LogWeightAccumulator::rescale(double new_max) noexcept {
    if (max_ != kNegInf) {
        const double f = std::exp(max_ - new_max);
        sum_ *= f;
        sum_sq_ *= f * f;
    }
    max_ = new_max;
}

void LogWeightAccumulator::add(double log_weight) noexcept {
    ++n_;
    if (log_weight == kNegInf || std::isnan(log_weight)) {
        return;
    }
    if (log_weight > max_) {
        rescale(log_weight);
    }
    const double w = std::exp(log_weight - max_);
    sum_ += w;
    sum_sq_ += w * w;
}

void LogWeightAccumulator::merge(const LogWeightAccumulator& other) noexcept {
    n_ += other.n_;
    if (other.max_ == kNegInf) {
        return;
    }
    if (other.max_ > max_) {
        rescale(other.max_);
    }
    const double f = std::exp(other.max_ - max_);
    sum_ += other.sum_ * f;
    sum_sq_ += other.sum_sq_ * f * f;
}

McEstimate LogWeightAccumulator::estimate(double log_scale) const noexcept {
    McEstimate out;
    out.n = n_;
    if (n_ == 0 || max_ == kNegInf || sum_ <= 0.0) {
        return out;
    }
    const auto n = static_cast<double>(n_);
    const double mean_shifted = sum_ / n;
    out.log_value = max_ + std::log(mean_shifted) + log_scale;
    out.value = std::exp(out.log_value);
    if (n_ > 1) {
        const double var_shifted = std::max(0.0, (sum_sq_ - sum_ * mean_shifted) / (n - 1.0));
        out.std_error = std::exp(max_ + log_scale) * std::sqrt(var_shifted / n);
    }
    return out;
}

double path_loglik_unchecked(const BirthDeathModel& model, const BridgePath& path) noexcept {
    const std::size_t last = path.states.size() - 1;  // index K + 1
    double log_jumps = 0.0;
    double exposure = 0.0;
    int ups = 0;
    for (std::size_t k = 1; k < last; ++k) {
        const int from = path.states[k - 1];
        const Rates r = model.rates_unchecked(from, ups);
        exposure += r.total() * (path.times[k] - path.times[k - 1]);
        const bool up = path.states[k] > from;
        const double rate = up ? r.birth : r.death;
        if (!(rate > 0.0)) {
            return kNegInf;
        }
        log_jumps += std::log(rate);
        ups += up ? 1 : 0;
    }
    const Rates r = model.rates_unchecked(path.states[last - 1], ups);
    exposure += r.total() * (path.times[last] - path.times[last - 1]);
    return log_jumps - exposure;
}

double path_loglik(const BirthDeathModel& model, const BridgePath& path) {
    validate_path(path);
    // States are checked up to the first impossible jump; what lies beyond it
    // does not change the answer.
    const std::size_t last = path.states.size() - 1;
    int ups = 0;
    for (std::size_t k = 0; k < last; ++k) {
        const int from = path.states[k];
        if (!model.in_state_space(from)) {
            std::ostringstream msg;
            msg << "path visits state " << from << " outside the model's state space";
            throw DomainError(msg.str());
        }
        if (k + 1 == last) {
            break;
        }
        const Rates r = model.rates(from, ups);
        const bool up = path.states[k + 1] > from;
        if (!((up ? r.birth : r.death) > 0.0)) {
            return kNegInf;
        }
        ups += up ? 1 : 0;
    }
    return path_loglik_unchecked(model, path);
}

std::optional<BridgeSpec> bridge_spec_for(const BirthDeathModel& model, int i, int j, int ups,
                                          double t, const EstimateOptions& options) {
    BridgeSpec spec{i, j, ups, t, options.lower_bound, options.upper_bound};
    if (!spec.lower) {
        switch (model.lower().kind) {
            case BoundaryKind::absorbing: spec.lower = model.lower().state; break;
            case BoundaryKind::reflecting: spec.lower = model.lower().state - 1; break;
            case BoundaryKind::none: break;
        }
    }
    if (!spec.upper) {
        switch (model.upper().kind) {
            case BoundaryKind::absorbing: spec.upper = model.upper().state; break;
            case BoundaryKind::reflecting: spec.upper = model.upper().state + 1; break;
            case BoundaryKind::none: break;
        }
    }
    if (!spec.feasible()) {
        return std::nullopt;
    }
    return spec;
}

McEstimate estimate_pij(const BirthDeathModel& model, int i, int j, double t, const BSet& bset,
                        std::uint64_t n, const EstimateOptions& options) {
    require_time(t);
    bset.validate();
    if (n < 1) {
        throw DomainError("sample size must be >= 1");
    }
    if (!model.in_state_space(i) || !model.in_state_space(j)) {
        return exact(0.0, n);
    }
    if (model.is_absorbing(i)) {
        return exact(i == j ? 1.0 : 0.0, n);
    }

    std::vector<std::optional<BridgeSampler>> samplers;
    samplers.reserve(bset.values.size());
    bool any = false;
    for (int b : bset.values) {
        auto spec = bridge_spec_for(model, i, j, b, t, options);
        if (spec) {
            BridgeSampler s(*spec, options.sampler);
            if (!s.empty()) {
                samplers.emplace_back(std::move(s));
                any = true;
                continue;
            }
        }
        samplers.emplace_back(std::nullopt);
    }
    if (!any) {
        return exact(0.0, n);
    }

    const std::size_t m = samplers.size();
    const std::size_t chunks = (n + options.chunk_size - 1) / options.chunk_size;
    std::vector<LogWeightAccumulator> partials(chunks);
    const RngStream root{options.seed, options.stream};

    struct Worker {
        std::vector<std::optional<BridgeSampler>> samplers;
        BridgePath path;
    };
    parallel_chunks(
        n, options.chunk_size, options.threads, [&] { return Worker{samplers, {}}; },
        [&](Worker& w, std::size_t c, std::size_t begin, std::size_t end) {
            Philox4x32 rng = root.child(c).engine();
            LogWeightAccumulator& acc = partials[c];
            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t pick = m == 1 ? 0 : uniform_index(rng, m);
                auto& sampler = w.samplers[pick];
                if (!sampler) {
                    acc.add(kNegInf);
                    continue;
                }
                sampler->draw(w.path, rng);
                acc.add(path_loglik_unchecked(model, w.path) - sampler->log_density());
            }
        });

    LogWeightAccumulator total;
    for (const auto& p : partials) {
        total.merge(p);
    }
    return total.estimate(std::log(static_cast<double>(m)));
}

McEstimate estimate_pij_B(const BirthDeathModel& model, int i, int j, double t, int ups,
                          std::uint64_t n, const EstimateOptions& options) {
    if (ups < 0) {
        throw DomainError("number of up-jumps must be >= 0");
    }
    return estimate_pij(model, i, j, t, BSet::single(ups), n, options);
}

BSet choose_bset(int i, int j, const BirthDeathModel& model, double t, double eps,
                 const BSetOptions& options) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("eps must lie in (0, 1)");
    }
    const int first = std::max(0, j - i);
    int last_significant = first;
    double total = 0.0;
    int quiet = 0;
    EstimateOptions pilot = options.estimate;
    for (int b = first; b - first <= options.max_span; ++b) {
        pilot.stream = RngStream{options.estimate.seed, options.estimate.stream}
                           .child(static_cast<std::uint64_t>(b))
                           .stream_id;
        const double p = estimate_pij_B(model, i, j, t, b, options.pilot_samples, pilot).value;
        total += p;
        if (p > 0.0 && p >= eps * total) {
            last_significant = b;
            quiet = 0;
        } else if (total > 0.0 && ++quiet >= options.quiet_run) {
            break;
        }
    }
    return BSet::range(first, last_significant);
}

}  // namespace bdbridge
