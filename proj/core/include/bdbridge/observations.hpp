#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bdbridge {

/// Susceptible counts S_0..S_N recorded at strictly increasing times.
struct Observations {
    std::vector<double> times;
    std::vector<int> susceptible;

    std::size_t intervals() const noexcept { return times.empty() ? 0 : times.size() - 1; }
    // S_{k-1} - S_k, k >= 1.
    int new_infections(std::size_t k) const { return susceptible[k - 1] - susceptible[k]; }
    double elapsed(std::size_t k) const { return times[k] - times[k - 1]; }

    // Throws IngestError naming the offending record.
    void validate() const;
};

// CSV with header `time,S`, one record per line.
Observations parse_observations(std::istream& in, const std::string& source = "<stream>");
Observations load_observations(const std::filesystem::path& path);
void write_observations(std::ostream& out, const Observations& obs);

// Shigellosis outbreak in a San Francisco homeless shelter, 27 Dec 1991 to
// 23 Jan 1992: daily susceptible counts (Britton & O'Neill 2002).
const Observations& shigellosis();

}  // namespace bdbridge
