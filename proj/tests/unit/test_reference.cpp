#include <doctest.h>

#include <cmath>

#include "bdbridge/errors.hpp"
#include "bdbridge/reference.hpp"
#include "oracles.hpp"
#include "stats.hpp"

using namespace bdbridge;

namespace {
const LbdiParams kTable1{0.8, 0.6, 1.2};
}

TEST_CASE("closed form: extinct lineage stays extinct without immigration") {
    const LbdiParams p{0.8, 0.6, 0.0};
    CHECK(lbdi_transition(p, 0, 0, 1.0) == 1.0);
    for (int j = 1; j < 10; ++j) {
        CHECK(lbdi_transition(p, 0, j, 1.0) == 0.0);
    }
}

TEST_CASE("closed form is normalized") {
    double total = 0.0;
    for (int j = 0; j <= 60; ++j) {
        total += lbdi_transition(kTable1, 5, j, 1.0);
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("closed form matches the truncated generator exponential") {
    const LbdiParams sets[] = {kTable1, {0.8, 0.6, 0.0}, {0.5, 0.9, 0.7}, {1.3, 0.4, 2.0}};
    for (const auto& p : sets) {
        const auto m = BirthDeathModel::lbdi(p);
        for (int i : {0, 1, 5}) {
            const auto row = testing::transition_row(m, i, 1.0, 200);
            for (int j = 0; j <= 25; ++j) {
                CHECK(std::abs(lbdi_transition(p, i, j, 1.0) - row[j]) < 1e-8);
            }
        }
    }
    const auto row = testing::transition_row(BirthDeathModel::lbdi(kTable1), 5, 1.0, 200);
    CHECK(lbdi_transition(kTable1, 5, 5, 1.0) == doctest::Approx(row[5]).epsilon(1e-8));
}

TEST_CASE("closed form refuses unsupported cases") {
    CHECK_THROWS_AS(lbdi_transition({0.7, 0.7, 1.0}, 5, 5, 1.0), UnsupportedError);
    CHECK_THROWS_AS(lbdi_transition({0.0, 0.7, 1.0}, 5, 5, 1.0), UnsupportedError);
    CHECK_THROWS_AS(lbdi_transition(kTable1, 5, 5, 0.0), DomainError);
    CHECK_THROWS_AS(lbdi_transition(kTable1, 5, -1, 1.0), DomainError);
}

TEST_CASE("pure death closed form") {
    // lambda = 0, nu = 0: each of i lineages survives with exp(-mu t).
    const LbdiParams p{0.0, 0.6, 0.0};
    const double s = std::exp(-0.6);
    CHECK(lbdi_transition(p, 3, 2, 1.0) == doctest::Approx(3 * s * s * (1 - s)));
}

TEST_CASE("Gillespie trivial paths") {
    Philox4x32 rng(1, 0);
    const auto frozen = BirthDeathModel::custom([](int) { return 0.0; }, [](int) { return 0.0; },
                                                Boundary::none(), Boundary::none());
    const SimPath still = gillespie_simulate(frozen, 4, 3.0, rng);
    CHECK(still.states == std::vector<int>{4});
    CHECK(still.final_state() == 4);
    CHECK(still.horizon == 3.0);

    const auto sis = BirthDeathModel::sis({30, 0.003, 1.0});
    CHECK(gillespie_simulate(sis, 0, 5.0, rng).states == std::vector<int>{0});
}

TEST_CASE("Gillespie paths are +-1 walks and stay absorbed") {
    Philox4x32 rng(2, 0);
    const auto m = BirthDeathModel::lbdi({0.8, 0.6, 0.0});
    for (int r = 0; r < 2000; ++r) {
        const SimPath p = gillespie_simulate(m, 2, 3.0, rng);
        for (std::size_t k = 1; k < p.states.size(); ++k) {
            CHECK(std::abs(p.states[k] - p.states[k - 1]) == 1);
            CHECK(p.times[k] > p.times[k - 1]);
            CHECK(p.times[k] < 3.0);
            CHECK(p.states[k - 1] != 0);  // nothing leaves the absorbing state
        }
    }
}

TEST_CASE("terminal law of Gillespie matches the closed form") {
    const auto m = BirthDeathModel::lbdi(kTable1);
    const auto counts = terminal_distribution(m, 5, 1.0, 1'000'000);
    CHECK(counts.n == 1'000'000);
    // Cells j = 0..19 plus a lumped tail.
    std::vector<std::uint64_t> observed;
    std::vector<double> expected;
    double head = 0.0;
    std::uint64_t head_count = 0;
    for (int j = 0; j < 20; ++j) {
        const double p = lbdi_transition(kTable1, 5, j, 1.0);
        const auto it = counts.counts.find(j);
        observed.push_back(it == counts.counts.end() ? 0 : it->second);
        expected.push_back(p);
        head += p;
        head_count += observed.back();
    }
    observed.push_back(counts.n - head_count);
    expected.push_back(1.0 - head);
    CHECK(testing::chi_square_pvalue(observed, expected) > 1e-3);

    for (int j = 0; j <= 12; ++j) {
        const auto e = counts.estimate(j);
        CHECK(std::abs(e.value - lbdi_transition(kTable1, 5, j, 1.0)) <= 4.0 * e.std_error);
    }
}

TEST_CASE("straight estimate") {
    const auto frozen = BirthDeathModel::custom([](int) { return 0.0; }, [](int) { return 0.0; },
                                                Boundary::none(), Boundary::none());
    const auto e = straight_estimate(frozen, 3, 3, 1.0, 100);
    CHECK(e.value == 1.0);
    CHECK(e.std_error == 0.0);
    CHECK(straight_estimate(frozen, 3, 4, 1.0, 100).value == 0.0);
}

TEST_CASE("terminal distribution is independent of the thread count") {
    const auto m = BirthDeathModel::sis({30, 0.003, 1.0});
    EstimateOptions one;
    one.chunk_size = 1000;
    EstimateOptions four = one;
    four.threads = 4;
    CHECK(terminal_distribution(m, 5, 1.0, 20000, one).counts ==
          terminal_distribution(m, 5, 1.0, 20000, four).counts);
}

TEST_CASE("simulated SIR observations") {
    Philox4x32 rng(5, 0);
    const std::vector<double> times{0, 1, 2, 3, 4, 5};
    const Observations obs =
        simulate_sir_observations({50, 0.02, 0.3}, 49, 1, times, rng);
    CHECK(obs.times == times);
    CHECK(obs.susceptible.front() == 49);
    CHECK_NOTHROW(obs.validate());
    const Observations flat = simulate_sir_observations({50, 0.0, 0.3}, 49, 1, times, rng);
    CHECK(flat.susceptible == std::vector<int>(6, 49));
    CHECK_THROWS_AS(simulate_sir_observations({50, 0.0, 0.3}, 49, 1, {1.0, 2.0}, rng),
                    DomainError);
}
