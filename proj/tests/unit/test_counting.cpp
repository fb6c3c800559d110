#include <doctest.h>

#include <cmath>
#include <optional>

#include "bdbridge/counting.hpp"
#include "bdbridge/errors.hpp"

using namespace bdbridge;

namespace {

BridgeSpec spec(int i, int j, int b, std::optional<int> l = std::nullopt,
                std::optional<int> u = std::nullopt, double t = 1.0) {
    return BridgeSpec{i, j, b, t, l, u};
}

}  // namespace

TEST_CASE("counting examples") {
    CHECK(bridge_count(spec(5, 5, 2)) == 6);
    CHECK(bridge_count(spec(0, 0, 1, -1, 2)) == 1);
    CHECK(bridge_count(spec(1, 1, 2, 0, 3)) == 1);
    CHECK(barrier_case(spec(1, 1, 2, 0, 3)) == 4);
    CHECK(barrier_case_count(spec(1, 1, 2, 0, 3)) == 1);
    CHECK(bridge_count(spec(5, 8, 2)) == 0);
}

TEST_CASE("enumeration examples") {
    CHECK(enumerate_bridges(spec(0, 0, 1, -1, 2)) == std::vector<std::vector<int>>{{0, 1, 0}});
    CHECK(enumerate_bridges(spec(5, 6, 1)) == std::vector<std::vector<int>>{{5, 6}});
    CHECK(enumerate_bridges(spec(5, 8, 2)).empty());
    CHECK(enumerate_bridges(spec(1, 1, 2, 0, 3)) ==
          std::vector<std::vector<int>>{{1, 2, 1, 2, 1}});
    CHECK_THROWS_AS(enumerate_bridges(spec(0, 0, 11)), DomainError);
}

TEST_CASE("simplex density examples") {
    CHECK(log_simplex_density(3, 2.0) == doctest::Approx(std::log(0.75)));
    CHECK(log_simplex_density(0, 7.5) == 0.0);
    CHECK(log_simplex_density(1, 0.5) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(log_simplex_density(2, 0.0), DomainError);
    CHECK_THROWS_AS(log_simplex_density(2, -1.0), DomainError);
}

TEST_CASE("bridge density examples") {
    CHECK(*log_bridge_density(spec(0, 0, 1, -1, 2)) == doctest::Approx(std::log(2.0)));
    CHECK(*log_bridge_density(spec(5, 5, 0)) == 0.0);
    CHECK_FALSE(log_bridge_density(spec(5, 8, 2)).has_value());
}

TEST_CASE("malformed specs are domain errors") {
    CHECK_THROWS_AS(bridge_count(spec(0, 0, 1, 0, 3)), DomainError);   // i on a bound
    CHECK_THROWS_AS(bridge_count(spec(1, 4, 3, 0, 3)), DomainError);   // j beyond u
    CHECK_THROWS_AS(bridge_count(spec(1, 1, -1)), DomainError);        // negative B
    CHECK_THROWS_AS(bridge_count(spec(1, 1, 1, 3, 3)), DomainError);   // l >= u
    CHECK_THROWS_AS(spec(1, 1, 1, 0, 3, 0.0).validate(), DomainError); // t <= 0
}

TEST_CASE("capacity: native counts stop at K = 64, big counts continue") {
    CHECK_NOTHROW(bridge_count(spec(0, 0, 32)));
    CHECK_THROWS_AS(bridge_count(spec(0, 0, 33)), CapacityError);
    const BridgeCount big = count_bridges(spec(0, 0, 50));
    CHECK(big.exact > BigCount(std::numeric_limits<std::uint64_t>::max()));
    CHECK(big.log_count == doctest::Approx(log_binomial(100, 50)).epsilon(1e-12));
}

TEST_CASE("big-integer and native series agree where both apply") {
    // K = 64 uses native arithmetic; the same walk shifted to K = 66 with one
    // extra up/down pair is checked against enumeration-free identities.
    for (int width = 2; width <= 8; ++width) {
        const BridgeCount c = count_bridges(spec(1, 1, 32, 0, width));
        CHECK(c.exact == BigCount(bridge_count(spec(1, 1, 32, 0, width))));
    }
    // Corridor of width 2 admits exactly one zig-zag for every K.
    CHECK(count_bridges(spec(1, 1, 40, 0, 2)).exact == 0);
    CHECK(count_bridges(spec(0, 0, 40, -1, 2)).exact == 1);
}

TEST_CASE("absorbing terminal state: forced final jump onto the bound") {
    // i=2 -> j=0 with lower bound 0: paths stay >= 1 until the last jump.
    const BridgeSpec s = spec(2, 0, 1, 0, 5);
    CHECK(s.absorbed_at_lower());
    const auto paths = enumerate_bridges(s);
    CHECK(bridge_count(s) == paths.size());
    for (const auto& p : paths) {
        CHECK(p.back() == 0);
        for (std::size_t k = 0; k + 1 < p.size(); ++k) {
            CHECK(p[k] > 0);
        }
    }
    // Upper absorbing mirror.
    const BridgeSpec up = spec(3, 5, 3, 0, 5);
    CHECK(bridge_count(up) == enumerate_bridges(up).size());
    CHECK(bridge_count(spec(1, 0, 0, 0, 5)) == 1);
    CHECK(bridge_count(spec(4, 5, 1, 0, 5)) == 1);
    CHECK(bridge_count(spec(4, 5, 0, 0, 5)) == 0);
}

TEST_CASE("oracle equivalence on a sweep (K <= 10)") {
    int checked = 0;
    for (int width = 2; width <= 6; ++width) {
        for (int i = 1; i < width; ++i) {
            for (int j = 0; j <= width; ++j) {
                for (int b = 0; b <= 5; ++b) {
                    const BridgeSpec s = spec(i, j, b, 0, width);
                    if (s.jumps() > 10 || s.jumps() < 0) {
                        continue;
                    }
                    CHECK(bridge_count(s) == enumerate_bridges(s).size());
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("four-case closed form matches whenever the series needs no extra terms") {
    for (int width = 2; width <= 8; ++width) {
        for (int i = 1; i < width; ++i) {
            for (int j = 1; j < width; ++j) {
                for (int b = 0; b <= 8; ++b) {
                    const BridgeSpec s = spec(i, j, b, 0, width);
                    if (s.downs() < 0) {
                        continue;
                    }
                    const BridgeCount c = count_bridges(s);
                    if (!c.extended_series) {
                        CHECK(barrier_case_count(s) ==
                              static_cast<std::int64_t>(c.exact.convert_to<std::uint64_t>()));
                    }
                }
            }
        }
    }
    // A narrow corridor where the higher reflections matter.
    const BridgeSpec narrow = spec(1, 1, 6, 0, 3);
    CHECK(count_bridges(narrow).extended_series);
    CHECK(bridge_count(narrow) == 1);
    CHECK(barrier_case_count(narrow) != 1);
}

TEST_CASE("property: widening the corridor never decreases the count") {
    for (int i = 2; i <= 4; ++i) {
        for (int j = 1; j <= 5; ++j) {
            for (int b = 0; b <= 6; ++b) {
                std::uint64_t prev = 0;
                for (int u = 6; u <= 14; ++u) {
                    const BridgeSpec s = spec(i, j, b, 0, u);
                    if (s.downs() < 0) {
                        break;
                    }
                    const auto c = bridge_count(s);
                    CHECK(c >= prev);
                    prev = c;
                }
                const BridgeSpec open = spec(i, j, b);
                if (open.downs() >= 0) {
                    CHECK(bridge_count(open) >= prev);
                }
            }
        }
    }
}

TEST_CASE("property: up/down reflection symmetry") {
    for (int l = -3; l <= 0; ++l) {
        for (int u = l + 2; u <= l + 8; ++u) {
            for (int i = l + 1; i < u; ++i) {
                for (int j = l + 1; j < u; ++j) {
                    for (int b = 0; b <= 6; ++b) {
                        const BridgeSpec s = spec(i, j, b, l, u);
                        if (s.downs() < 0) {
                            continue;
                        }
                        const BridgeSpec m = spec(-i, -j, s.downs(), -u, -l);
                        CHECK(bridge_count(s) == bridge_count(m));
                    }
                }
            }
        }
    }
}

TEST_CASE("corridor_walks agrees with enumeration") {
    for (int steps = 0; steps <= 10; ++steps) {
        for (int to = 1; to <= 4; ++to) {
            const int b2 = steps + to - 2;
            const std::uint64_t expected =
                (b2 % 2 == 0 && b2 >= 0 && b2 / 2 <= steps)
                    ? enumerate_bridges(spec(2, to, b2 / 2, 0, 5)).size()
                    : 0;
            CHECK(corridor_walks(2, to, steps, 0, 5) == expected);
        }
    }
    CHECK_THROWS_AS(corridor_walks(0, 0, 66, std::nullopt, std::nullopt), CapacityError);
}
