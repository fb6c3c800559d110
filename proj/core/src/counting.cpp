#include "bdbridge/counting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "bdbridge/errors.hpp"
#include "bdbridge/random.hpp"

namespace bdbridge {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using PascalRow = std::array<std::uint64_t, kExactCountMaxJumps + 1>;
using PascalTable = std::array<PascalRow, kExactCountMaxJumps + 1>;

const PascalTable& pascal() {
    static const PascalTable table = [] {
        PascalTable t{};
        for (int n = 0; n <= kExactCountMaxJumps; ++n) {
            t[n][0] = 1;
            for (int k = 1; k <= n; ++k) {
                t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
            }
        }
        return t;
    }();
    return table;
}

BigCount big_binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    if (n <= kExactCountMaxJumps) {
        return BigCount(pascal()[n][k]);
    }
    k = std::min(k, n - k);
    BigCount r = 1;
    for (int m = 1; m <= k; ++m) {
        r *= (n - k + m);
        r /= m;
    }
    return r;
}

// Corridor walk from `from` to `to` in `steps` steps with `ups` up-steps,
// staying strictly inside (lower, upper).
struct Walk {
    int from;
    int to;
    int steps;
    int ups;
    std::optional<int> lower;
    std::optional<int> upper;
};

struct SeriesTerm {
    int index;
    int sign;
    bool first_order;
};

// Reflection terms C(steps, index) with signs. Empty when the walk is
// impossible.
template <class Visit>
bool for_each_term(const Walk& w, Visit&& visit) {
    const int downs = w.steps - w.ups;
    if (w.ups < 0 || downs < 0 || w.from - w.to + w.ups != downs) {
        return false;
    }
    if (w.lower && (w.from <= *w.lower || w.to <= *w.lower)) {
        return false;
    }
    if (w.upper && (w.from >= *w.upper || w.to >= *w.upper)) {
        return false;
    }
    const int n = w.steps;
    visit(SeriesTerm{w.ups, +1, true});
    if (!w.lower && !w.upper) {
        return true;
    }
    if (!w.lower) {
        visit(SeriesTerm{w.ups + *w.upper - w.to, -1, true});
        return true;
    }
    if (!w.upper) {
        visit(SeriesTerm{w.ups + *w.lower - w.to, -1, true});
        return true;
    }
    // sum_k [ C(n, ups + k*width) - C(n, ups + upper - to + k*width) ]
    const int width = *w.upper - *w.lower;
    const int mirror = w.ups + *w.upper - w.to;
    const int reach = n / width + 2;
    visit(SeriesTerm{mirror, -1, true});
    for (int k = 1; k <= reach; ++k) {
        // k = -1 terms are B_lu and B_l; k = +1 first term is B_ul.
        visit(SeriesTerm{w.ups + k * width, +1, k == 1});
        visit(SeriesTerm{w.ups - k * width, +1, k == 1});
        visit(SeriesTerm{mirror + k * width, -1, false});
        visit(SeriesTerm{mirror - k * width, -1, k == 1});
    }
    return true;
}

Walk reduce(const BridgeSpec& s) {
    if (s.absorbed_at_lower()) {
        return {s.i, s.j + 1, s.jumps() - 1, s.ups, s.lower, s.upper};
    }
    if (s.absorbed_at_upper()) {
        return {s.i, s.j - 1, s.jumps() - 1, s.ups - 1, s.lower, s.upper};
    }
    return {s.i, s.j, s.jumps(), s.ups, s.lower, s.upper};
}

void validate_shape(const BridgeSpec& s) {
    std::ostringstream msg;
    if (s.ups < 0) {
        msg << "number of up-jumps must be >= 0, got " << s.ups;
    } else if (s.lower && s.upper && *s.lower >= *s.upper) {
        msg << "taboo bounds must satisfy l < u, got (" << *s.lower << ", " << *s.upper << ")";
    } else if ((s.lower && s.i <= *s.lower) || (s.upper && s.i >= *s.upper)) {
        msg << "start state " << s.i << " must lie strictly inside the taboo bounds";
    } else if ((s.lower && s.j < *s.lower) || (s.upper && s.j > *s.upper)) {
        msg << "end state " << s.j << " lies outside the taboo bounds";
    } else {
        return;
    }
    throw DomainError(msg.str());
}

}  // namespace

bool BridgeSpec::feasible() const noexcept {
    if (ups < 0 || downs() < 0) {
        return false;
    }
    if ((lower && i <= *lower) || (upper && i >= *upper)) {
        return false;
    }
    if ((lower && j < *lower) || (upper && j > *upper)) {
        return false;
    }
    if (absorbed_at_lower() && downs() < 1) {
        return false;
    }
    if (absorbed_at_upper() && ups < 1) {
        return false;
    }
    return true;
}

void BridgeSpec::validate() const {
    validate_shape(*this);
    if (!(t > 0.0) || !std::isfinite(t)) {
        std::ostringstream msg;
        msg << "elapsed time must be finite and > 0, got " << t;
        throw DomainError(msg.str());
    }
}

std::uint64_t binomial_u64(int n, int k) noexcept {
    if (n < 0 || n > kExactCountMaxJumps || k < 0 || k > n) {
        return 0;
    }
    return pascal()[n][k];
}

double log_binomial(int n, int k) noexcept {
    if (k < 0 || k > n) {
        return kNegInf;
    }
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_of(const BigCount& value) {
    if (value <= 0) {
        return kNegInf;
    }
    const std::size_t bits = boost::multiprecision::msb(value) + 1;
    if (bits <= 62) {
        return std::log(value.convert_to<double>());
    }
    const std::size_t shift = bits - 62;
    const BigCount top = value >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

BridgeCount count_bridges(const BridgeSpec& spec) {
    validate_shape(spec);
    BridgeCount out;
    if (!spec.feasible()) {
        out.log_count = kNegInf;
        return out;
    }
    const Walk walk = reduce(spec);
    const int n = walk.steps;
    if (n <= kExactCountMaxJumps) {
        detail::int128 acc = 0;
        for_each_term(walk, [&](const SeriesTerm& term) {
            const std::uint64_t c = binomial_u64(n, term.index);
            if (c != 0 && !term.first_order) {
                out.extended_series = true;
            }
            acc += term.sign * static_cast<detail::int128>(c);
        });
        out.exact = BigCount(static_cast<std::uint64_t>(acc));
    } else {
        BigCount acc = 0;
        for_each_term(walk, [&](const SeriesTerm& term) {
            if (term.index < 0 || term.index > n) {
                return;
            }
            if (!term.first_order) {
                out.extended_series = true;
            }
            const BigCount c = big_binomial(n, term.index);
            if (term.sign > 0) {
                acc += c;
            } else {
                acc -= c;
            }
        });
        out.exact = acc;
    }
    out.log_count = log_of(out.exact);
    return out;
}

std::uint64_t corridor_walks(int from, int to, int steps, std::optional<int> lower,
                             std::optional<int> upper) {
    if (steps > kExactCountMaxJumps) {
        throw CapacityError("corridor_walks supports at most 64 steps");
    }
    if (steps < 0 || ((steps + to - from) % 2) != 0) {
        return 0;
    }
    const Walk walk{from, to, steps, (steps + to - from) / 2, lower, upper};
    detail::int128 acc = 0;
    for_each_term(walk, [&](const SeriesTerm& term) {
        acc += term.sign * static_cast<detail::int128>(binomial_u64(steps, term.index));
    });
    return static_cast<std::uint64_t>(acc);
}

std::uint64_t bridge_count(const BridgeSpec& spec) {
    if (spec.jumps() > kExactCountMaxJumps) {
        std::ostringstream msg;
        msg << "bridge with K=" << spec.jumps() << " jumps exceeds exact integer capacity (K <= "
            << kExactCountMaxJumps << "); use count_bridges() for log-space counts";
        throw CapacityError(msg.str());
    }
    return count_bridges(spec).exact.convert_to<std::uint64_t>();
}

int barrier_case(const BridgeSpec& spec) {
    validate_shape(spec);
    const Walk w = reduce(spec);
    const int downs = w.steps - w.ups;
    const bool lower_reachable = w.lower && w.from <= downs + *w.lower;
    const bool upper_reachable = w.upper && w.from >= *w.upper - w.ups;
    if (!lower_reachable && !upper_reachable) {
        return 1;
    }
    if (lower_reachable && !upper_reachable) {
        return 2;
    }
    if (!lower_reachable) {
        return 3;
    }
    return 4;
}

std::int64_t barrier_case_count(const BridgeSpec& spec) {
    validate_shape(spec);
    if (!spec.feasible()) {
        return 0;
    }
    const Walk w = reduce(spec);
    if (w.steps > kExactCountMaxJumps) {
        throw CapacityError("barrier_case_count supports K <= 64 only");
    }
    const int n = w.steps;
    const int b = w.ups;
    auto c = [n](int k) { return static_cast<std::int64_t>(binomial_u64(n, k)); };
    const int case_id = barrier_case(spec);
    const std::int64_t full = c(b);
    if (case_id == 1) {
        return full;
    }
    const int b_lower = w.lower ? b - w.to + *w.lower : -1;
    const int b_upper = w.upper ? b - w.to + *w.upper : -1;
    if (case_id == 2) {
        return full - c(b_lower);
    }
    if (case_id == 3) {
        return full - c(b_upper);
    }
    const int width = *w.upper - *w.lower;
    return full - c(b_lower) - c(b_upper) + c(b - width) + c(b + width);
}

std::vector<std::vector<int>> enumerate_bridges(const BridgeSpec& spec, int max_jumps) {
    validate_shape(spec);
    if (!spec.feasible()) {
        return {};
    }
    const int n = spec.jumps();
    if (n > max_jumps) {
        std::ostringstream msg;
        msg << "enumeration limited to K <= " << max_jumps << ", spec has K=" << n;
        throw DomainError(msg.str());
    }
    std::vector<std::vector<int>> out;
    std::vector<int> path;
    path.reserve(static_cast<std::size_t>(n) + 1);
    path.push_back(spec.i);

    auto inside = [&](int s, bool terminal) {
        if (terminal && s == spec.j) {
            return true;  // may sit on a bound when absorbed there
        }
        return (!spec.lower || s > *spec.lower) && (!spec.upper || s < *spec.upper);
    };

    auto recurse = [&](auto&& self, int ups_left, int downs_left) -> void {
        const int step = static_cast<int>(path.size()) - 1;
        if (ups_left == 0 && downs_left == 0) {
            out.push_back(path);
            return;
        }
        const int here = path.back();
        const bool last = step + 1 == n;
        if (ups_left > 0 && inside(here + 1, last)) {
            path.push_back(here + 1);
            self(self, ups_left - 1, downs_left);
            path.pop_back();
        }
        if (downs_left > 0 && inside(here - 1, last)) {
            path.push_back(here - 1);
            self(self, ups_left, downs_left - 1);
            path.pop_back();
        }
    };
    recurse(recurse, spec.ups, spec.downs());
    return out;
}

double log_simplex_density(int jumps, double t) {
    if (jumps < 0) {
        throw DomainError("number of jumps must be >= 0");
    }
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("elapsed time must be finite and > 0");
    }
    if (jumps == 0) {
        return 0.0;
    }
    return std::lgamma(jumps + 1.0) - jumps * std::log(t);
}

std::optional<double> log_bridge_density(const BridgeSpec& spec) {
    spec.validate();
    const BridgeCount count = count_bridges(spec);
    if (count.empty()) {
        return std::nullopt;
    }
    return log_simplex_density(spec.jumps(), spec.t) - count.log_count;
}

}  // namespace bdbridge
