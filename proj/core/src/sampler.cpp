#include "bdbridge/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdbridge/errors.hpp"

namespace bdbridge {
namespace {

bool outside(int state, const BridgeSpec& spec) noexcept {
    return (spec.lower && state <= *spec.lower) || (spec.upper && state >= *spec.upper);
}

}  // namespace

int BridgePath::ups() const noexcept {
    int n = 0;
    for (std::size_t k = 1; k + 1 < states.size(); ++k) {
        n += states[k] > states[k - 1] ? 1 : 0;
    }
    return n;
}

void validate_path(const BridgePath& path) {
    std::ostringstream msg;
    const std::size_t n = path.states.size();
    if (n < 2 || path.times.size() != n) {
        msg << "path needs matching times/states of length >= 2 (got " << path.times.size()
            << " times, " << n << " states)";
        throw DomainError(msg.str());
    }
    if (path.times.front() != 0.0) {
        throw DomainError("path must start at time 0");
    }
    for (std::size_t k = 1; k < n; ++k) {
        if (!(path.times[k] > path.times[k - 1]) || !std::isfinite(path.times[k])) {
            msg << "path times must be strictly increasing (index " << k << ")";
            throw DomainError(msg.str());
        }
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (std::abs(path.states[k] - path.states[k - 1]) != 1) {
            msg << "path jump " << k << " is not +-1";
            throw DomainError(msg.str());
        }
    }
    if (path.states[n - 1] != path.states[n - 2]) {
        throw DomainError("terminal state must repeat the state after the last jump");
    }
}

void validate_path(const BridgePath& path, const BridgeSpec& spec) {
    validate_path(path);
    spec.validate();
    const int k = path.jumps();
    std::ostringstream msg;
    if (k != spec.jumps() || path.ups() != spec.ups) {
        msg << "path has " << k << " jumps / " << path.ups() << " ups, spec needs "
            << spec.jumps() << " / " << spec.ups;
    } else if (path.states.front() != spec.i || path.states[static_cast<std::size_t>(k)] != spec.j) {
        msg << "path endpoints do not match spec (" << spec.i << " -> " << spec.j << ")";
    } else if (path.times.back() != spec.t) {
        msg << "path horizon " << path.times.back() << " differs from spec t=" << spec.t;
    } else {
        for (int m = 1; m < k; ++m) {
            if (outside(path.states[static_cast<std::size_t>(m)], spec)) {
                msg << "path state " << path.states[static_cast<std::size_t>(m)] << " at jump " << m
                    << " touches a taboo bound";
                throw DomainError(msg.str());
            }
        }
        return;
    }
    throw DomainError(msg.str());
}

void sample_times(std::span<double> out, double t, Philox4x32& rng) {
    if (out.empty()) {
        return;
    }
    for (;;) {
        for (double& x : out) {
            x = uniform_open01(rng) * t;
        }
        std::sort(out.begin(), out.end());
        bool ok = out.front() > 0.0 && out.back() < t;
        for (std::size_t k = 1; ok && k < out.size(); ++k) {
            ok = out[k] > out[k - 1];
        }
        if (ok) {
            return;
        }
    }
}

std::vector<double> sample_times(int jumps, double t, Philox4x32& rng) {
    if (jumps < 0) {
        throw DomainError("number of jumps must be >= 0");
    }
    if (!(t > 0.0)) {
        throw DomainError("elapsed time must be > 0");
    }
    std::vector<double> out(static_cast<std::size_t>(jumps));
    sample_times(out, t, rng);
    return out;
}

SkeletonSampler::SkeletonSampler(const BridgeSpec& spec, SamplerOptions options)
    : spec_(spec), options_(options), strategy_(options.strategy) {
    spec_.validate();
    const BridgeCount count = count_bridges(spec_);
    log_count_ = count.log_count;
    if (count.empty()) {
        expected_acceptance_ = 0.0;
        return;
    }
    int free_ups = spec_.ups;
    free_steps_ = spec_.jumps();
    free_target_ = spec_.j;
    if (spec_.absorbed_at_lower()) {
        free_steps_ -= 1;
        free_target_ = spec_.j + 1;
        final_step_ = -1;
    } else if (spec_.absorbed_at_upper()) {
        free_steps_ -= 1;
        free_target_ = spec_.j - 1;
        free_ups -= 1;
        final_step_ = +1;
    }
    free_ups_ = free_ups;
    steps_.resize(static_cast<std::size_t>(free_steps_));
    expected_acceptance_ = std::exp(log_count_ - log_binomial(free_steps_, free_ups));

    if (strategy_ == SkeletonStrategy::automatic) {
        const bool poor = expected_acceptance_ < options_.min_rejection_acceptance;
        strategy_ = poor && free_steps_ <= kExactCountMaxJumps ? SkeletonStrategy::sequential
                                                                : SkeletonStrategy::rejection;
    }
    if (strategy_ == SkeletonStrategy::sequential && free_steps_ > kExactCountMaxJumps) {
        throw CapacityError("sequential skeleton sampling supports K <= 64");
    }
}

std::uint64_t SkeletonSampler::sample(std::span<int> out, Philox4x32& rng) {
    if (empty()) {
        throw DomainError("cannot sample from an empty bridge space");
    }
    if (out.size() != static_cast<std::size_t>(spec_.jumps()) + 1) {
        throw DomainError("skeleton buffer must hold K + 1 states");
    }
    out[0] = spec_.i;
    std::uint64_t attempts = 1;
    if (strategy_ == SkeletonStrategy::sequential) {
        sample_sequential(out, rng);
        stats_.attempts += 1;
    } else {
        attempts = sample_rejection(out, rng);
    }
    stats_.draws += 1;
    if (final_step_ != 0) {
        out[static_cast<std::size_t>(free_steps_) + 1] = free_target_ + final_step_;
    }
    return attempts;
}

std::uint64_t SkeletonSampler::sample_rejection(std::span<int> out, Philox4x32& rng) {
    const auto n = static_cast<std::uint64_t>(free_steps_);
    // Each draw starts from the same arrangement so its outcome depends only
    // on the random stream, not on earlier draws from this sampler.
    std::fill(steps_.begin(), steps_.end(), -1);
    std::fill_n(steps_.begin(), free_ups_, +1);
    for (std::uint64_t attempt = 1; attempt <= options_.max_attempts; ++attempt) {
        stats_.attempts += 1;
        int state = spec_.i;
        bool ok = true;
        // Forward Fisher-Yates; a rejected prefix is as good as a full shuffle.
        for (std::uint64_t k = 0; k < n; ++k) {
            const std::uint64_t r = k + uniform_index(rng, n - k);
            std::swap(steps_[k], steps_[r]);
            state += steps_[k];
            out[k + 1] = state;
            if (outside(state, spec_)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return attempt;
        }
    }
    std::ostringstream msg;
    msg << "rejection sampler exceeded " << options_.max_attempts << " attempts for bridge "
        << spec_.i << " -> " << spec_.j << " with B=" << spec_.ups << " (acceptance rate "
        << stats_.rate() << ")";
    throw RejectionLimitError(msg.str(), stats_.rate());
}

void SkeletonSampler::sample_sequential(std::span<int> out, Philox4x32& rng) {
    int state = spec_.i;
    int remaining = free_steps_;
    std::uint64_t total = corridor_walks(state, free_target_, remaining, spec_.lower, spec_.upper);
    for (int k = 1; k <= free_steps_; ++k) {
        --remaining;
        const std::uint64_t via_up =
            corridor_walks(state + 1, free_target_, remaining, spec_.lower, spec_.upper);
        const double p_up = static_cast<double>(via_up) / static_cast<double>(total);
        if (uniform_open01(rng) < p_up) {
            state += 1;
            total = via_up;
        } else {
            state -= 1;
            total -= via_up;
        }
        out[static_cast<std::size_t>(k)] = state;
    }
}

std::vector<int> sample_skeleton(const BridgeSpec& spec, Philox4x32& rng, SamplerOptions options) {
    SkeletonSampler sampler(spec, options);
    std::vector<int> out(static_cast<std::size_t>(spec.jumps()) + 1);
    sampler.sample(out, rng);
    return out;
}

BridgeSampler::BridgeSampler(const BridgeSpec& spec, SamplerOptions options)
    : skeleton_(spec, options) {
    if (!skeleton_.empty()) {
        log_density_ = log_simplex_density(spec.jumps(), spec.t) - skeleton_.log_count();
    }
}

double BridgeSampler::log_density() const {
    if (empty()) {
        throw DomainError("empty bridge space has no density");
    }
    return log_density_;
}

void BridgeSampler::draw(BridgePath& out, Philox4x32& rng) {
    const BridgeSpec& s = skeleton_.spec();
    const auto k = static_cast<std::size_t>(s.jumps());
    out.times.resize(k + 2);
    out.states.resize(k + 2);
    out.times[0] = 0.0;
    sample_times(std::span<double>(out.times).subspan(1, k), s.t, rng);
    out.times[k + 1] = s.t;
    skeleton_.sample(std::span<int>(out.states).first(k + 1), rng);
    out.states[k + 1] = out.states[k];
}

BridgePath sample_bridge(const BridgeSpec& spec, Philox4x32& rng, SamplerOptions options) {
    BridgeSampler sampler(spec, options);
    if (sampler.empty()) {
        throw DomainError("cannot sample from an empty bridge space");
    }
    BridgePath path;
    sampler.draw(path, rng);
    return path;
}

}  // namespace bdbridge
