#include "bdbridge/observations.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

#include "bdbridge/errors.hpp"

namespace bdbridge {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << source << ":" << line << ": " << what;
    throw IngestError(msg.str());
}

}  // namespace

void Observations::validate() const {
    if (times.empty() || times.size() != susceptible.size()) {
        throw IngestError("observations need at least one record with matching time and S");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::ostringstream msg;
        if (!std::isfinite(times[k])) {
            msg << "record " << k << ": time is not finite";
        } else if (susceptible[k] < 0) {
            msg << "record " << k << ": S must be >= 0";
        } else if (k > 0 && !(times[k] > times[k - 1])) {
            msg << "record " << k << ": times must be strictly increasing";
        } else if (k > 0 && susceptible[k] > susceptible[k - 1]) {
            msg << "record " << k << ": S must be nonincreasing";
        } else {
            continue;
        }
        throw IngestError(msg.str());
    }
}

Observations parse_observations(std::istream& in, const std::string& source) {
    Observations obs;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) {
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
            fail(source, line_no, "expected two comma-separated fields");
        }
        const std::string_view first = trim(row.substr(0, comma));
        const std::string_view second = trim(row.substr(comma + 1));
        if (!header_seen) {
            if (first != "time" || second != "S") {
                fail(source, line_no, "expected header 'time,S'");
            }
            header_seen = true;
            continue;
        }
        double time = 0.0;
        try {
            std::size_t used = 0;
            time = std::stod(std::string(first), &used);
            if (used != first.size()) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception&) {
            fail(source, line_no, "time '" + std::string(first) + "' is not a number");
        }
        long long s = 0;
        const auto [ptr, ec] = std::from_chars(second.data(), second.data() + second.size(), s);
        if (ec != std::errc() || ptr != second.data() + second.size() ||
            s > std::numeric_limits<int>::max()) {
            fail(source, line_no, "S '" + std::string(second) + "' is not an integer");
        }
        if (s < 0) {
            fail(source, line_no, "S must be >= 0");
        }
        if (!obs.times.empty() && !(time > obs.times.back())) {
            fail(source, line_no, "times must be strictly increasing");
        }
        if (!obs.susceptible.empty() && s > obs.susceptible.back()) {
            fail(source, line_no, "S must be nonincreasing");
        }
        obs.times.push_back(time);
        obs.susceptible.push_back(static_cast<int>(s));
    }
    if (!header_seen) {
        throw IngestError(source + ": empty observation file");
    }
    if (obs.times.empty()) {
        throw IngestError(source + ": no observation records");
    }
    obs.validate();
    return obs;
}

Observations load_observations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError("cannot open observation file " + path.string());
    }
    return parse_observations(in, path.string());
}

void write_observations(std::ostream& out, const Observations& obs) {
    out << "time,S\n";
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t k = 0; k < obs.times.size(); ++k) {
        out << obs.times[k] << ',' << obs.susceptible[k] << '\n';
    }
    out.precision(old);
}

const Observations& shigellosis() {
    static const Observations data = [] {
        Observations obs;
        const int s[] = {198, 198, 198, 198, 198, 197, 197, 197, 197, 196, 195, 190, 189, 186,
                         186, 184, 181, 177, 170, 166, 163, 161, 160, 160, 160, 160, 158, 157};
        for (int day = 0; day < 28; ++day) {
            obs.times.push_back(day);
            obs.susceptible.push_back(s[day]);
        }
        return obs;
    }();
    return data;
}

}  // namespace bdbridge
