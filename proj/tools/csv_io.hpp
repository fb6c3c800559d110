#pragma once

// Readers for the CSV files the command-line tool writes.

#include <iosfwd>
#include <string>
#include <vector>

#include "bdbridge/reference.hpp"
#include "bdbridge/sampler.hpp"

namespace bdbridge::cli {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a named column; throws IngestError when absent.
    std::size_t column(const std::string& name) const;
};

// Comma-separated, no quoting; every row must match the header width.
CsvTable read_csv(std::istream& in);

// `sample` output: replicate_id,k,tau_k,omega_k.
std::vector<BridgePath> read_sample_csv(std::istream& in);

// `simulate` output: replicate_id,event,time,state with event in
// {start, jump, end}.
std::vector<SimPath> read_simulation_csv(std::istream& in);

void write_sample_csv(std::ostream& out, std::size_t replicate, const BridgePath& path);
void write_simulation_csv(std::ostream& out, std::size_t replicate, const SimPath& path);

}  // namespace bdbridge::cli
