#include "qslab/report.hpp"

#include "qslab/types.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace qslab {

namespace {

std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

bool ExperimentReport::all_pass() const {
    for (const CheckRow& r : rows)
        if (!r.pass) return false;
    return true;
}

void ExperimentReport::add(const std::string& name, double measured, double bound, double tol,
                           bool pass, const std::string& note) {
    rows.push_back({name, measured, bound, tol, pass, note});
}

void ExperimentReport::add_upper(const std::string& name, double measured, double bound,
                                 double tol, const std::string& note) {
    add(name, measured, bound, tol, measured <= bound + tol, note);
}

void ExperimentReport::add_lower(const std::string& name, double measured, double bound,
                                 double tol, const std::string& note) {
    add(name, measured, bound, tol, measured >= bound - tol, note);
}

void ExperimentReport::add_close(const std::string& name, double measured, double target,
                                 double tol, const std::string& note) {
    add(name, measured, target, tol, std::abs(measured - target) <= tol, note);
}

void ExperimentReport::add_flag(const std::string& name, bool ok, const std::string& note) {
    add(name, ok ? 1.0 : 0.0, 1.0, 0.0, ok, note);
}

json num_or_inf(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(v);
}

double parse_num_or_inf(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw qslab_error("parse_num_or_inf: unexpected string '" + s + "'");
    }
    return j.get<double>();
}

json report_to_json(const ExperimentReport& rep) {
    json j;
    j["command"] = rep.command;
    j["input_digest"] = rep.input_digest;
    j["seed"] = rep.seed;
    j["all_pass"] = rep.all_pass();
    j["rows"] = json::array();
    for (const CheckRow& r : rep.rows) {
        json row;
        row["name"] = r.name;
        row["measured"] = num_or_inf(r.measured);
        row["bound"] = num_or_inf(r.bound);
        row["tol"] = r.tol;
        row["pass"] = r.pass;
        if (!r.note.empty()) row["note"] = r.note;
        j["rows"].push_back(std::move(row));
    }
    j["wall_time_s"] = rep.wall_time_s;
    return j;
}

std::string report_to_csv(const ExperimentReport& rep) {
    std::string out = "check_name,measured,bound,tolerance,pass,note\n";
    for (const CheckRow& r : rep.rows) {
        out += csv_escape(r.name) + ',' + fmt_double(r.measured) + ',' + fmt_double(r.bound) +
               ',' + fmt_double(r.tol) + ',' + (r.pass ? "true" : "false") + ',' +
               csv_escape(r.note) + '\n';
    }
    return out;
}

void write_report(const ExperimentReport& rep, const std::string& out_base) {
    {
        std::ofstream f(out_base + ".json");
        if (!f) throw qslab_error("write_report: cannot open " + out_base + ".json");
        f << report_to_json(rep).dump(2) << '\n';
    }
    std::ofstream f(out_base + ".csv");
    if (!f) throw qslab_error("write_report: cannot open " + out_base + ".csv");
    f << report_to_csv(rep);
}

json strip_volatile(json j) {
    if (j.is_object()) {
        j.erase("wall_time_s");
        for (auto& [key, value] : j.items()) value = strip_volatile(value);
    } else if (j.is_array()) {
        for (auto& value : j) value = strip_volatile(value);
    }
    return j;
}

std::string digest_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace qslab
