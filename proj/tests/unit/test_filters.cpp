#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bdbridge/errors.hpp"
#include "bdbridge/filters.hpp"
#include "oracles.hpp"

using namespace bdbridge;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const SirParams kMle{199, 0.0016, 0.2607};

// Exact one-step predictive probability and posterior from the augmented
// chain: pr(dS = B) = sum_i pr(i) sum_j p^B_{ij} + (1 - p) 1{B = 0}.
struct ExactStep {
    double prob = 0.0;
    std::vector<double> posterior;
};

ExactStep exact_step(const std::vector<double>& prior, const SirParams& params, int s_prev,
                     int ups, double dt) {
    const auto model = BirthDeathModel::sir_infectious(params, s_prev);
    const int max_i = static_cast<int>(prior.size()) - 1;
    ExactStep out;
    out.posterior.assign(static_cast<std::size_t>(max_i + ups) + 1, 0.0);
    for (int i = 1; i <= max_i; ++i) {
        for (int j = 0; j <= i + ups; ++j) {
            const double w = prior[i] * testing::transition_with_ups(model, i, j, dt, ups);
            out.posterior[j] += w;
            out.prob += w;
        }
    }
    if (ups == 0) {
        out.posterior[0] += prior[0];
        out.prob += prior[0];
    }
    for (double& v : out.posterior) {
        v /= out.prob;
    }
    return out;
}

FilterState state_from(std::vector<double> posterior) {
    FilterState s;
    s.posterior = std::move(posterior);
    s.p_alive = 1.0 - s.posterior[0];
    return s;
}

}  // namespace

TEST_CASE("filter state invariants") {
    const FilterState s = FilterState::initial(3);
    CHECK(s.posterior == std::vector<double>{0, 0, 0, 1});
    CHECK(s.p_alive == 1.0);
    CHECK_NOTHROW(s.validate());
    CHECK_THROWS_AS(state_from({0.5, 0.4}).validate(), DomainError);
    FilterState wrong = state_from({0.5, 0.5});
    wrong.p_alive = 0.9;
    CHECK_THROWS_AS(wrong.validate(), DomainError);
}

TEST_CASE("absorbed epidemic follows the 0-1 law") {
    const FilterState dead = FilterState::initial(0);
    const FilterStep same = igbs_filter_step(dead, kMle, 150, 150, 1.0);
    CHECK(same.cond_loglik == 0.0);
    CHECK(same.state.posterior == std::vector<double>{1.0});
    CHECK(same.state.p_alive == 0.0);
    CHECK(igbs_filter_step(dead, kMle, 150, 149, 1.0).cond_loglik == kNegInf);
}

TEST_CASE("step preconditions") {
    const FilterState s = FilterState::initial(1);
    CHECK_THROWS_AS(igbs_filter_step(s, kMle, 150, 151, 1.0), DomainError);
    CHECK_THROWS_AS(igbs_filter_step(s, kMle, 150, 150, 0.0), DomainError);
    FilterOptions none;
    none.replicates = 0;
    CHECK_THROWS_AS(igbs_filter_step(s, kMle, 150, 150, 1.0, none), DomainError);
}

TEST_CASE("first Shigellosis step: no new infection from a single case") {
    // Closed form: with B = 0 from I = 1 the only paths are "nothing happens"
    // and "one removal", so pr = exp(-L) + gamma / L * (1 - exp(-L)) with
    // L = beta * 198 + gamma.
    const double rate = kMle.beta * 198 + kMle.gamma;
    const double exact = std::exp(-rate) + kMle.gamma / rate * (1.0 - std::exp(-rate));
    const auto model = BirthDeathModel::sir_infectious(kMle, 198);
    CHECK(exact == doctest::Approx(testing::transition_with_ups(model, 1, 0, 1.0, 0) +
                                   testing::transition_with_ups(model, 1, 1, 1.0, 0)));

    // Bridge estimate built directly from the likelihood module.
    EstimateOptions eo;
    eo.lower_bound = 0;
    eo.upper_bound = 2;
    const auto to0 = estimate_pij_B(model, 1, 0, 1.0, 0, 20000, eo);
    const auto to1 = estimate_pij_B(model, 1, 1, 1.0, 0, 20000, eo);
    const double direct = to0.value + to1.value;
    const double direct_se = std::hypot(to0.std_error, to1.std_error);

    FilterOptions fo;
    fo.replicates = 20000;
    const FilterStep step = igbs_filter_step(FilterState::initial(1), kMle, 198, 198, 1.0, fo);
    const double est = std::exp(step.cond_loglik);
    CHECK(std::abs(est - exact) < 0.01);
    CHECK(std::abs(direct - exact) <= 3.0 * direct_se + 1e-12);
    CHECK(std::abs(est - direct) <= 0.01 + 3.0 * direct_se);
}

TEST_CASE("one-step oracle equivalence over a spread posterior") {
    const std::vector<double> prior{0.1, 0.25, 0.3, 0.2, 0.1, 0.05};
    const SirParams params{60, 0.01, 0.4};
    const int s_prev = 50;
    for (int ups : {0, 1, 3}) {
        const ExactStep exact = exact_step(prior, params, s_prev, ups, 1.0);
        std::vector<double> draws;
        std::vector<double> mean_post(exact.posterior.size(), 0.0);
        const int seeds = 20;
        for (int r = 0; r < seeds; ++r) {
            FilterOptions fo;
            fo.replicates = 5000;
            fo.stream = static_cast<std::uint64_t>(r);
            const FilterStep step =
                igbs_filter_step(state_from(prior), params, s_prev, s_prev - ups, 1.0, fo);
            draws.push_back(std::exp(step.cond_loglik));
            for (std::size_t j = 0; j < step.state.posterior.size() && j < mean_post.size(); ++j) {
                mean_post[j] += step.state.posterior[j] / seeds;
            }
            CHECK(step.state.posterior.size() <= exact.posterior.size());
        }
        const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / seeds;
        double ss = 0.0;
        for (double d : draws) {
            ss += (d - mean) * (d - mean);
        }
        const double se = std::sqrt(ss / (seeds - 1) / seeds);
        CHECK(std::abs(mean - exact.prob) <= 3.0 * se + 1e-12);
        for (std::size_t j = 0; j < exact.posterior.size(); ++j) {
            CHECK(std::abs(mean_post[j] - exact.posterior[j]) < 0.02);
        }
    }
}

TEST_CASE("posterior stays normalized and inside the reachable range") {
    const Observations& obs = shigellosis();
    FilterState state = FilterState::initial(1);
    FilterOptions fo;
    fo.replicates = 2000;
    for (std::size_t k = 1; k <= obs.intervals(); ++k) {
        FilterStep step = igbs_filter_step(state, kMle, obs.susceptible[k - 1],
                                           obs.susceptible[k], obs.elapsed(k), fo);
        REQUIRE(std::isfinite(step.cond_loglik));
        CHECK_NOTHROW(step.state.validate());
        const double total =
            std::accumulate(step.state.posterior.begin(), step.state.posterior.end(), 0.0);
        CHECK(std::abs(total - 1.0) <= 1e-12);
        CHECK(static_cast<int>(step.state.posterior.size()) - 1 <=
              1 + obs.susceptible.front() - obs.susceptible[k]);
        CHECK(step.state.step == static_cast<int>(k));
        state = std::move(step.state);
    }
}

TEST_CASE("log-likelihood edge cases") {
    const Observations flat{{0, 1, 2, 3, 4}, {50, 50, 50, 50, 50}};
    CHECK(igbs_filter_loglik({51, 0.0, 0.5}, flat, 1) == doctest::Approx(0.0).epsilon(0.01));
    CHECK(std::isfinite(igbs_filter_loglik({51, 0.001, 0.5}, flat, 1)));

    const Observations jump{{0, 1}, {50, 48}};
    CHECK(igbs_filter_loglik({51, 0.0, 0.5}, jump, 1) == kNegInf);

    const Observations single{{0}, {198}};
    CHECK(igbs_filter_loglik(kMle, single, 1) == 0.0);
    CHECK_THROWS_AS(igbs_filter_loglik(kMle, single, 0), DomainError);
}

TEST_CASE("filter result records each step") {
    FilterOptions fo;
    fo.replicates = 1000;
    const FilterResult r = igbs_filter(kMle, shigellosis(), 1, fo);
    CHECK(r.steps.size() == 27);
    double total = 0.0;
    for (const auto& s : r.steps) {
        total += s.cond_loglik;
        CHECK(s.cond_loglik <= 1e-12);
    }
    CHECK(r.loglik == doctest::Approx(total));
    CHECK(std::accumulate(r.posterior_final.begin(), r.posterior_final.end(), 0.0) ==
          doctest::Approx(1.0));
}

TEST_CASE("filter is deterministic and thread-count independent") {
    FilterOptions one;
    one.replicates = 3000;
    one.chunk_size = 256;
    FilterOptions four = one;
    four.threads = 4;
    const double a = igbs_filter_loglik(kMle, shigellosis(), 1, one);
    CHECK(a == igbs_filter_loglik(kMle, shigellosis(), 1, one));
    CHECK(a == igbs_filter_loglik(kMle, shigellosis(), 1, four));
    FilterOptions other = one;
    other.stream = 1;
    CHECK(a != igbs_filter_loglik(kMle, shigellosis(), 1, other));
}

TEST_CASE("bootstrap filter on a frozen epidemic") {
    const Observations flat{{0, 1, 2}, {20, 20, 20}};
    BootstrapOptions bo;
    bo.particles = 1000;
    const BootstrapResult r = bootstrap_filter({21, 0.0, 0.0}, flat, 1, bo);
    CHECK(r.loglik == 0.0);
    CHECK(r.survival == std::vector<double>{1.0, 1.0});
    CHECK_FALSE(r.failed);
}

TEST_CASE("bootstrap and bridge filters agree at the Shigellosis estimate") {
    BootstrapOptions bo;
    bo.particles = 100000;
    const BootstrapResult boot = bootstrap_filter(kMle, shigellosis(), 1, bo);
    CHECK_FALSE(boot.failed);
    const double igbs = igbs_filter_loglik(kMle, shigellosis(), 1);
    CHECK(std::abs(boot.loglik - igbs) < 1.0);
}

TEST_CASE("bootstrap collapse is reported, not thrown") {
    const Observations jump{{0, 1}, {50, 40}};
    BootstrapOptions bo;
    bo.particles = 1000;
    const BootstrapResult r = bootstrap_filter({51, 0.0, 0.5}, jump, 1, bo);
    CHECK(r.failed);
    CHECK(r.loglik == kNegInf);
    CHECK(r.survival_min == 0.0);
}

TEST_CASE("failure scan: thresholds nest and extreme beta fails") {
    BootstrapOptions bo;
    bo.particles = 20000;
    const std::vector<double> betas{0.0016, 0.02};
    const std::vector<double> gammas{0.2607};
    const auto cells = failure_domain_scan(shigellosis(), 1, betas, gammas, {1e-3, 1e-4}, bo);
    REQUIRE(cells.size() == 2);
    for (const auto& c : cells) {
        REQUIRE(c.failed.size() == 2);
        CHECK((!c.failed[1] || c.failed[0]));
    }
    CHECK(cells[0].beta == 0.0016);
    CHECK_FALSE(cells[0].failed[0]);
    CHECK(cells[1].failed[0]);
    CHECK(cells[1].failed[1]);
}

TEST_CASE("property: rescaling time units leaves the likelihood unchanged") {
    // Days to hours: rates per hour are 24 times smaller, observation times 24
    // times larger. Weights change by the same factor in the path likelihood
    // and the bridge density, so the estimate is unchanged up to rounding.
    FilterOptions opts;
    opts.replicates = 2000;
    const Observations days = shigellosis();
    Observations hours = days;
    for (double& t : hours.times) {
        t *= 24.0;
    }
    const double a = igbs_filter_loglik(kMle, days, 1, opts);
    const double b =
        igbs_filter_loglik({kMle.n0, kMle.beta / 24.0, kMle.gamma / 24.0}, hours, 1, opts);
    CHECK(b == doctest::Approx(a).epsilon(1e-9));
}
