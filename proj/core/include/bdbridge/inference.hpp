#pragma once

// Grid-based maximum likelihood for (beta, gamma) of the SIR model observed
// through susceptible counts, with profile-likelihood intervals.

#include <string>
#include <vector>

#include "bdbridge/filters.hpp"
#include "bdbridge/observations.hpp"

namespace bdbridge {

/// `steps` evenly spaced points from lo to hi inclusive.
struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1;

    std::vector<double> values() const;
    // "a:b:steps"; throws DomainError on malformed text, steps < 1 or b < a.
    static GridAxis parse(const std::string& text);
};

struct SurfaceOptions {
    FilterOptions filter;
    int replications = 5;
    int i0 = 1;
};

/// Seed-averaged log-likelihood on a (beta, gamma) grid, beta-major.
struct Surface {
    std::vector<double> betas;
    std::vector<double> gammas;
    std::vector<double> loglik;  // mean over replications, -inf if any is -inf
    std::vector<double> spread;  // sample sd over replications (0 for one)

    double at(std::size_t b, std::size_t g) const { return loglik[b * gammas.size() + g]; }
};

// Replication r uses stream filter.stream + r in every cell, so cells share
// random numbers and differences between cells are smoother than the noise.
Surface loglik_surface(const Observations& obs, const std::vector<double>& betas,
                       const std::vector<double>& gammas, const SurfaceOptions& options = {});

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    // The cutoff was not crossed inside the searched range on that side.
    bool lo_open = false;
    bool hi_open = false;
};

struct SurfacePoint {
    double beta = 0.0;
    double gamma = 0.0;
    double loglik = 0.0;
    double spread = 0.0;
    int level = 0;
};

enum class Parameter { beta, gamma };

// {theta : max over the other parameter of loglik >= max - drop}, with the
// crossings placed by linear interpolation between neighbouring grid values.
Interval profile_interval(const std::vector<SurfacePoint>& points, Parameter which, double drop);

struct FitConfig {
    GridAxis beta{0.0005, 0.004, 15};
    GridAxis gamma{0.05, 0.6, 12};
    int refine_levels = 2;
    int refine_steps = 7;  // points per axis in each refinement grid
    double ci_drop = 1.92;  // chi-square(1) 95% cutoff / 2
    SurfaceOptions surface;
};

struct FitResult {
    double beta_hat = 0.0;
    double gamma_hat = 0.0;
    double loglik_max = 0.0;
    double loglik_spread = 0.0;
    Interval ci_beta;
    Interval ci_gamma;
    double r0 = 0.0;
    int n0 = 0;
    // argmax of the coarse grid sits on its edge.
    bool boundary_warning = false;
    std::vector<SurfacePoint> points;  // every evaluated cell
};

FitResult fit_mle(const Observations& obs, const FitConfig& config = {});

// beta * n0 / gamma.
double basic_reproduction_number(double beta, double gamma, int n0);

}  // namespace bdbridge
