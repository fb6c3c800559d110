#include "csv_io.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bdbridge/errors.hpp"

namespace bdbridge::cli {
namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream s(line);
    while (std::getline(s, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

long long to_int(const std::string& text) {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) {
        throw IngestError("expected an integer, got '" + text + "'");
    }
    return v;
}

double to_double(const std::string& text) {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) {
        throw IngestError("expected a number, got '" + text + "'");
    }
    return v;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) {
            return k;
        }
    }
    throw IngestError("CSV has no column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto fields = split(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected " << table.header.size() << " fields, got "
                << fields.size();
            throw IngestError(msg.str());
        }
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) {
        throw IngestError("empty CSV input");
    }
    return table;
}

std::vector<BridgePath> read_sample_csv(std::istream& in) {
    const CsvTable t = read_csv(in);
    const auto rep = t.column("replicate_id");
    const auto k = t.column("k");
    const auto tau = t.column("tau_k");
    const auto omega = t.column("omega_k");
    std::vector<BridgePath> paths;
    long long current = -1;
    for (const auto& row : t.rows) {
        const long long id = to_int(row[rep]);
        if (id != current) {
            paths.emplace_back();
            current = id;
        }
        if (to_int(row[k]) != static_cast<long long>(paths.back().states.size())) {
            throw IngestError("sample rows must list k = 0, 1, ... per replicate");
        }
        paths.back().times.push_back(to_double(row[tau]));
        paths.back().states.push_back(static_cast<int>(to_int(row[omega])));
    }
    for (const auto& p : paths) {
        validate_path(p);
    }
    return paths;
}

std::vector<SimPath> read_simulation_csv(std::istream& in) {
    const CsvTable t = read_csv(in);
    const auto rep = t.column("replicate_id");
    const auto event = t.column("event");
    const auto time = t.column("time");
    const auto state = t.column("state");
    std::vector<SimPath> paths;
    for (const auto& row : t.rows) {
        const std::string& kind = row[event];
        if (kind == "start") {
            paths.emplace_back();
            paths.back().times.push_back(to_double(row[time]));
            paths.back().states.push_back(static_cast<int>(to_int(row[state])));
        } else if (paths.empty() || to_int(row[rep]) + 1 != static_cast<long long>(paths.size())) {
            throw IngestError("simulation rows must begin each replicate with a start event");
        } else if (kind == "jump") {
            paths.back().times.push_back(to_double(row[time]));
            paths.back().states.push_back(static_cast<int>(to_int(row[state])));
        } else if (kind == "end") {
            paths.back().horizon = to_double(row[time]);
        } else {
            throw IngestError("unknown simulation event '" + kind + "'");
        }
    }
    return paths;
}

void write_sample_csv(std::ostream& out, std::size_t replicate, const BridgePath& path) {
    for (std::size_t k = 0; k < path.states.size(); ++k) {
        out << replicate << ',' << k << ',' << path.times[k] << ',' << path.states[k] << '\n';
    }
}

void write_simulation_csv(std::ostream& out, std::size_t replicate, const SimPath& path) {
    for (std::size_t k = 0; k < path.states.size(); ++k) {
        out << replicate << ',' << (k == 0 ? "start" : "jump") << ',' << path.times[k] << ','
            << path.states[k] << '\n';
    }
    out << replicate << ",end," << path.horizon << ',' << path.final_state() << '\n';
}

}  // namespace bdbridge::cli
