#include <doctest.h>

#include <cmath>

#include "bdbridge/errors.hpp"
#include "bdbridge/models.hpp"

using namespace bdbridge;

TEST_CASE("L-BDI rates") {
    const auto m = BirthDeathModel::lbdi({0.8, 0.6, 1.2});
    const Rates r = m.rates(5);
    CHECK(r.birth == doctest::Approx(5.2));
    CHECK(r.death == doctest::Approx(3.0));
    CHECK(m.lower().kind == BoundaryKind::reflecting);
    CHECK(m.rates(0).death == 0.0);
    CHECK(m.rates(0).birth == doctest::Approx(1.2));
    CHECK_THROWS_AS(m.rates(-1), DomainError);
}

TEST_CASE("L-BDI without immigration absorbs at 0") {
    const auto m = BirthDeathModel::lbdi({0.8, 0.6, 0.0});
    CHECK(m.lower().kind == BoundaryKind::absorbing);
    CHECK(m.is_absorbing(0));
    CHECK(m.rates(0).total() == 0.0);
}

TEST_CASE("SIS rates and boundaries") {
    const auto m = BirthDeathModel::sis({30, 0.003, 1.0});
    CHECK(m.rates(30).birth == 0.0);
    CHECK(m.rates(30).death == doctest::Approx(30.0));
    CHECK(m.rates(0).birth == 0.0);
    CHECK(m.rates(0).death == 0.0);
    CHECK(m.rates(10).birth == doctest::Approx(0.003 * 10 * 20));
    CHECK_THROWS_AS(m.rates(31), DomainError);
    CHECK_FALSE(m.in_state_space(31));
}

TEST_CASE("SIS property: birth vanishes exactly at 0 and n0, death exactly at 0") {
    const auto m = BirthDeathModel::sis({12, 0.2, 0.7});
    for (int s = 0; s <= 12; ++s) {
        const Rates r = m.rates(s);
        CHECK(std::isfinite(r.birth));
        CHECK(std::isfinite(r.death));
        CHECK((r.birth == 0.0) == (s == 0 || s == 12));
        CHECK((r.death == 0.0) == (s == 0));
    }
}

TEST_CASE("SIR reduced to the infectious count") {
    const auto m = BirthDeathModel::sir_infectious({199, 0.0016, 0.2607}, 198);
    const Rates r = m.rates(1, 0);
    CHECK(r.birth == doctest::Approx(0.0016 * 198));
    CHECK(r.death == doctest::Approx(0.2607));
    CHECK(m.path_dependent());
    // Every up-jump removes one susceptible.
    CHECK(m.rates(3, 2).birth == doctest::Approx(0.0016 * 196 * 3));
    CHECK(m.rates(0, 0).total() == 0.0);
    CHECK(m.is_absorbing(0));
}

TEST_CASE("SIR with no susceptibles is a pure death process") {
    const auto m = BirthDeathModel::sir_infectious({10, 0.5, 0.3}, 0);
    for (int s = 1; s <= 10; ++s) {
        CHECK(m.rates(s).birth == 0.0);
        CHECK(m.rates(s).death == doctest::Approx(0.3 * s));
    }
}

TEST_CASE("SIR rejects out-of-range s0") {
    CHECK_THROWS_AS(BirthDeathModel::sir_infectious({10, 0.5, 0.3}, 11), DomainError);
    CHECK_THROWS_AS(BirthDeathModel::sir_infectious({10, 0.5, 0.3}, -1), DomainError);
}

TEST_CASE("custom models carry their boundary metadata") {
    const auto m = BirthDeathModel::custom([](int s) { return 0.5 * s; },
                                           [](int s) { return 0.25 * s; },
                                           Boundary::absorbing(0), Boundary::none());
    CHECK(m.rates(4).birth == doctest::Approx(2.0));
    CHECK(m.rates(4).death == doctest::Approx(1.0));
    CHECK(m.is_absorbing(0));
    CHECK(m.in_state_space(1000));
    CHECK_FALSE(m.in_state_space(-1));

    const auto bad = BirthDeathModel::custom([](int) { return -1.0; }, [](int) { return 0.0; },
                                             Boundary::none(), Boundary::none());
    CHECK_THROWS_AS(bad.rates(2), DomainError);
}

TEST_CASE("built-in models are deterministic in their inputs") {
    const auto a = BirthDeathModel::lbdi({0.8, 0.6, 1.2});
    const auto b = a;
    for (int s = 0; s < 50; ++s) {
        CHECK(a.rates(s).birth == b.rates(s).birth);
        CHECK(a.rates(s).death == b.rates(s).death);
    }
}
