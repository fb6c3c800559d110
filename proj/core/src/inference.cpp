#include "bdbridge/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "bdbridge/errors.hpp"

namespace bdbridge {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double parse_number(const std::string& text, const std::string& whole) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && std::isfinite(v)) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw DomainError("malformed grid '" + whole + "', expected a:b:steps");
}

// Linear crossing of `level` between (x0, y0) inside and (x1, y1) outside.
double crossing(double x0, double y0, double x1, double y1, double level) {
    if (y1 == kNegInf || y0 == y1) {
        return x1;
    }
    const double f = (y0 - level) / (y0 - y1);
    return x0 + std::clamp(f, 0.0, 1.0) * (x1 - x0);
}

std::vector<double> refine_axis(const std::vector<double>& coarse, double centre, int steps) {
    double step = 0.0;
    for (std::size_t k = 1; k < coarse.size(); ++k) {
        step = std::max(step, coarse[k] - coarse[k - 1]);
    }
    if (coarse.size() < 2 || steps < 2) {
        return {centre};
    }
    const double lo = std::max(centre - step, coarse.front());
    const double hi = std::min(centre + step, coarse.back());
    return GridAxis{lo, hi, steps}.values();
}

}  // namespace

std::vector<double> GridAxis::values() const {
    if (steps < 1) {
        throw DomainError("grid needs at least one point");
    }
    if (steps == 1) {
        return {lo};
    }
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        out[static_cast<std::size_t>(k)] =
            k == steps - 1 ? hi : lo + (hi - lo) * static_cast<double>(k) / (steps - 1);
    }
    return out;
}

GridAxis GridAxis::parse(const std::string& text) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
        throw DomainError("malformed grid '" + text + "', expected a:b:steps");
    }
    GridAxis axis;
    axis.lo = parse_number(text.substr(0, a), text);
    axis.hi = parse_number(text.substr(a + 1, b - a - 1), text);
    const double steps = parse_number(text.substr(b + 1), text);
    if (steps < 1 || steps != std::floor(steps) || steps > 1e6) {
        throw DomainError("grid '" + text + "' needs an integer step count >= 1");
    }
    axis.steps = static_cast<int>(steps);
    if (axis.hi < axis.lo) {
        throw DomainError("grid '" + text + "' has upper end below lower end");
    }
    return axis;
}

Surface loglik_surface(const Observations& obs, const std::vector<double>& betas,
                       const std::vector<double>& gammas, const SurfaceOptions& options) {
    if (betas.empty() || gammas.empty()) {
        throw DomainError("surface grids must be nonempty");
    }
    if (options.replications < 1) {
        throw DomainError("replications must be >= 1");
    }
    obs.validate();
    const int n0 = obs.susceptible.front() + options.i0;
    Surface s{betas, gammas, {}, {}};
    s.loglik.reserve(betas.size() * gammas.size());
    s.spread.reserve(betas.size() * gammas.size());
    for (double beta : betas) {
        for (double gamma : gammas) {
            const SirParams params{n0, beta, gamma};
            std::vector<double> runs;
            for (int r = 0; r < options.replications; ++r) {
                FilterOptions f = options.filter;
                f.stream = options.filter.stream + static_cast<std::uint64_t>(r);
                runs.push_back(igbs_filter_loglik(params, obs, options.i0, f));
            }
            if (std::any_of(runs.begin(), runs.end(), [](double v) { return v == kNegInf; })) {
                s.loglik.push_back(kNegInf);
                s.spread.push_back(0.0);
                continue;
            }
            double mean = 0.0;
            for (double v : runs) {
                mean += v;
            }
            mean /= static_cast<double>(runs.size());
            double ss = 0.0;
            for (double v : runs) {
                ss += (v - mean) * (v - mean);
            }
            s.loglik.push_back(mean);
            s.spread.push_back(runs.size() > 1 ? std::sqrt(ss / (runs.size() - 1.0)) : 0.0);
        }
    }
    return s;
}

Interval profile_interval(const std::vector<SurfacePoint>& points, Parameter which, double drop) {
    if (points.empty()) {
        throw DomainError("no surface points to profile");
    }
    std::map<double, double> profile;
    for (const auto& pt : points) {
        const double key = which == Parameter::beta ? pt.beta : pt.gamma;
        auto [it, inserted] = profile.emplace(key, pt.loglik);
        if (!inserted) {
            it->second = std::max(it->second, pt.loglik);
        }
    }
    std::vector<std::pair<double, double>> curve(profile.begin(), profile.end());
    std::size_t best = 0;
    for (std::size_t k = 1; k < curve.size(); ++k) {
        if (curve[k].second > curve[best].second) {
            best = k;
        }
    }
    if (curve[best].second == kNegInf) {
        throw DomainError("log-likelihood is -inf on every surface point");
    }
    const double level = curve[best].second - drop;

    Interval out;
    std::size_t lo = best;
    while (lo > 0 && curve[lo - 1].second >= level) {
        --lo;
    }
    if (lo == 0) {
        out.lo = curve.front().first;
        out.lo_open = true;
    } else {
        out.lo = crossing(curve[lo].first, curve[lo].second, curve[lo - 1].first,
                          curve[lo - 1].second, level);
    }
    std::size_t hi = best;
    while (hi + 1 < curve.size() && curve[hi + 1].second >= level) {
        ++hi;
    }
    if (hi + 1 == curve.size()) {
        out.hi = curve.back().first;
        out.hi_open = true;
    } else {
        out.hi = crossing(curve[hi].first, curve[hi].second, curve[hi + 1].first,
                          curve[hi + 1].second, level);
    }
    return out;
}

double basic_reproduction_number(double beta, double gamma, int n0) {
    if (!(gamma > 0.0)) {
        throw DomainError("R0 needs gamma > 0");
    }
    return beta * n0 / gamma;
}

FitResult fit_mle(const Observations& obs, const FitConfig& config) {
    if (config.refine_levels < 0) {
        throw DomainError("refine_levels must be >= 0");
    }
    if (!(config.ci_drop > 0.0)) {
        throw DomainError("ci_drop must be > 0");
    }
    FitResult out;
    out.n0 = obs.susceptible.front() + config.surface.i0;

    std::vector<double> betas = config.beta.values();
    std::vector<double> gammas = config.gamma.values();
    double best = kNegInf;
    for (int level = 0; level <= config.refine_levels; ++level) {
        const Surface s = loglik_surface(obs, betas, gammas, config.surface);
        std::size_t arg_b = 0;
        std::size_t arg_g = 0;
        for (std::size_t b = 0; b < betas.size(); ++b) {
            for (std::size_t g = 0; g < gammas.size(); ++g) {
                const double v = s.at(b, g);
                out.points.push_back({betas[b], gammas[g], v, s.spread[b * gammas.size() + g], level});
                if (level == 0 && v > s.at(arg_b, arg_g)) {
                    arg_b = b;
                    arg_g = g;
                }
                if (v > best) {
                    best = v;
                    out.beta_hat = betas[b];
                    out.gamma_hat = gammas[g];
                    out.loglik_max = v;
                    out.loglik_spread = s.spread[b * gammas.size() + g];
                }
            }
        }
        if (best == kNegInf) {
            throw DomainError("log-likelihood is -inf on the whole search grid");
        }
        if (level == 0) {
            out.boundary_warning =
                (betas.size() > 1 && (arg_b == 0 || arg_b + 1 == betas.size())) ||
                (gammas.size() > 1 && (arg_g == 0 || arg_g + 1 == gammas.size()));
        }
        betas = refine_axis(betas, out.beta_hat, config.refine_steps);
        gammas = refine_axis(gammas, out.gamma_hat, config.refine_steps);
    }
    out.ci_beta = profile_interval(out.points, Parameter::beta, config.ci_drop);
    out.ci_gamma = profile_interval(out.points, Parameter::gamma, config.ci_drop);
    out.r0 = basic_reproduction_number(out.beta_hat, out.gamma_hat, out.n0);
    return out;
}

}  // namespace bdbridge
