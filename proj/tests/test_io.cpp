// Serialization round trips, report formatting, and determinism helpers.
//
// Frozen constant: FNV-1a 64-bit of "a" = af63dc4c8601ec8c (standard test
// vector for the 0xcbf29ce484222325 / 0x100000001b3 parameterization).

#include "doctest.h"

#include "qslab/json_io.hpp"
#include "qslab/qstate.hpp"
#include "qslab/report.hpp"
#include "qslab/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

using namespace qslab;

TEST_CASE("matrix and state round trips are exact") {
    Rng rng(51);
    Mat m = rng.density(3, 2);
    Mat back = mat_from_json(mat_to_json(m));
    CHECK((m - back).cwiseAbs().maxCoeff() == 0.0); // shortest-round-trip doubles

    DensityMatrix rho(rng.density(4, 4), SubsystemLayout::pair(2, 2));
    DensityMatrix rho2 = density_from_json(density_to_json(rho));
    CHECK((rho.m - rho2.m).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(rho2.layout.has_value());
    CHECK(rho2.layout->factor_dims == rho.layout->factor_dims);

    PureState psi(rng.pure(6), SubsystemLayout({2, 3}));
    PureState psi2 = pure_from_json(pure_to_json(psi));
    CHECK((psi.a - psi2.a).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(psi2.layout.has_value());
    CHECK(psi2.layout->factor_dims == psi.layout->factor_dims);

    Povm povm = rng.povm(3, 4);
    Povm povm2 = povm_from_json(povm_to_json(povm));
    REQUIRE(povm2.outcomes() == 4);
    for (int i = 0; i < 4; ++i)
        CHECK((povm.elements[i] - povm2.elements[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("state pairs load from classical or quantum JSON") {
    json cj;
    cj["p"] = {0.75, 0.25};
    cj["q"] = {0.25, 0.75};
    StatePair cp = state_pair_from_json(cj);
    CHECK(cp.classical());
    REQUIRE(cp.p.has_value());
    CHECK((*cp.p)[0] == 0.75);

    Rng rng(52);
    json qj;
    qj["rho"] = mat_to_json(rng.density(2, 2));
    qj["sigma"] = mat_to_json(rng.density(2, 2));
    StatePair qp = state_pair_from_json(qj);
    CHECK_FALSE(qp.classical());
    REQUIRE(qp.rho.has_value());
    REQUIRE(qp.sigma.has_value());

    json missing_q;
    missing_q["p"] = {0.5, 0.5};
    CHECK_THROWS_AS(state_pair_from_json(missing_q), qslab_error); // q missing
}

TEST_CASE("infinities serialize as strings") {
    CHECK(num_or_inf(1.5) == json(1.5));
    CHECK(num_or_inf(std::numeric_limits<double>::infinity()) == json("inf"));
    CHECK(parse_num_or_inf(json("inf")) == std::numeric_limits<double>::infinity());
    CHECK(parse_num_or_inf(json("-inf")) == -std::numeric_limits<double>::infinity());
    CHECK(parse_num_or_inf(json(2.25)) == 2.25);

    DivergenceResult r;
    r.value = std::numeric_limits<double>::infinity();
    CHECK(divergence_to_json(r)["value"] == json("inf"));
}

TEST_CASE("reports: row semantics, serialization, volatile stripping") {
    ExperimentReport rep;
    rep.command = "unit";
    rep.seed = 7;
    rep.input_digest = digest_hex("unit:7");
    rep.add_upper("upper_ok", 1.0, 1.0, 0.0);
    rep.add_upper("upper_fail", 1.1, 1.0, 1e-3);
    rep.add_lower("lower_ok", 0.9, 1.0, 0.2);
    rep.add_close("close_ok", 1.0 + 1e-12, 1.0, 1e-9);
    rep.add_flag("flag", true, "note text");
    rep.wall_time_s = 12.5;

    CHECK(rep.rows[0].pass);
    CHECK_FALSE(rep.rows[1].pass);
    CHECK(rep.rows[2].pass);
    CHECK(rep.rows[3].pass);
    CHECK_FALSE(rep.all_pass());

    json j = report_to_json(rep);
    CHECK(j["command"] == "unit");
    CHECK(j["seed"] == 7);
    CHECK(j["all_pass"] == false);
    REQUIRE(j["rows"].size() == 5);
    CHECK(j["rows"][1]["pass"] == false);
    CHECK(j.contains("wall_time_s"));
    json stripped = strip_volatile(j);
    CHECK_FALSE(stripped.contains("wall_time_s"));
    // stripping is recursive
    json nested;
    nested["a"]["wall_time_s"] = 1.0;
    nested["a"]["keep"] = 2.0;
    CHECK_FALSE(strip_volatile(nested)["a"].contains("wall_time_s"));
    CHECK(strip_volatile(nested)["a"].contains("keep"));

    std::string csv = report_to_csv(rep);
    std::istringstream lines(csv);
    std::string line;
    int count = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++count;
    CHECK(count == 6); // header + five rows
    CHECK(csv.rfind("check_name,measured,bound,tolerance,pass,note", 0) == 0);

    // write + parse back
    std::string base = "/tmp/qslab_test_report";
    write_report(rep, base);
    json loaded = load_json_file(base + ".json");
    CHECK(loaded["rows"].size() == 5);
    CHECK(loaded["input_digest"] == rep.input_digest);
    std::remove((base + ".json").c_str());
    std::remove((base + ".csv").c_str());
}

TEST_CASE("digest is FNV-1a 64 and reports are byte-stable") {
    CHECK(digest_hex("a") == "af63dc4c8601ec8c");
    CHECK(digest_hex("") == "cbf29ce484222325"); // offset basis
    CHECK(digest_hex("abc") != digest_hex("abd"));

    // identical content serializes identically regardless of wall time
    ExperimentReport a, b;
    a.command = b.command = "det";
    a.seed = b.seed = 1;
    a.add_upper("x", 0.5, 1.0, 0.0);
    b.add_upper("x", 0.5, 1.0, 0.0);
    a.wall_time_s = 1.0;
    b.wall_time_s = 99.0;
    CHECK(strip_volatile(report_to_json(a)).dump() == strip_volatile(report_to_json(b)).dump());
}

TEST_CASE("json file IO raises on missing files") {
    CHECK_THROWS_AS(load_json_file("/tmp/definitely_missing_qslab.json"), qslab_error);
}
