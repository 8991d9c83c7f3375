#pragma once

// Experiment reporting: named check rows with measured/bound/tolerance data,
// JSON and CSV serialization, and helpers for byte-stable comparison (wall
// time is the only volatile field; everything else is deterministic for a
// fixed seed).

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qslab {

using json = nlohmann::ordered_json;

struct CheckRow {
    std::string name;
    double measured = 0;
    double bound = 0;
    double tol = 0;
    bool pass = false;
    std::string note;
};

struct ExperimentReport {
    std::string command;
    std::string input_digest;
    std::uint64_t seed = 0;
    std::vector<CheckRow> rows;
    double wall_time_s = 0;

    bool all_pass() const;
    void add(const std::string& name, double measured, double bound, double tol, bool pass,
             const std::string& note = "");
    // measured <= bound + tol
    void add_upper(const std::string& name, double measured, double bound, double tol,
                   const std::string& note = "");
    // measured >= bound - tol
    void add_lower(const std::string& name, double measured, double bound, double tol,
                   const std::string& note = "");
    // |measured - target| <= tol
    void add_close(const std::string& name, double measured, double target, double tol,
                   const std::string& note = "");
    void add_flag(const std::string& name, bool ok, const std::string& note = "");
};

// JSON encoding of a possibly-infinite value ("inf" / "-inf" as strings).
json num_or_inf(double v);
double parse_num_or_inf(const json& j);

json report_to_json(const ExperimentReport& rep);
std::string report_to_csv(const ExperimentReport& rep);

// Writes <out_base>.json and <out_base>.csv.
void write_report(const ExperimentReport& rep, const std::string& out_base);

// Removes volatile keys (wall_time_s) recursively, for byte-identical
// determinism comparisons.
json strip_volatile(json j);

// FNV-1a 64-bit hex digest of a canonical parameter string.
std::string digest_hex(const std::string& data);

} // namespace qslab
