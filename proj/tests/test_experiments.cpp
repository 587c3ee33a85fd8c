#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qadd/experiments.hpp"

using namespace qadd;
using nlohmann::json;

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
        } else {
            t.rows.push_back(cells);
        }
    }
    return t;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("coherent information surface honors the known slices") {
    const CsvTable t = parse_csv(run_coherent_info_surface(6, 6));
    REQUIRE(t.header == std::vector<std::string>{"s", "t", "u_star", "q1"});
    bool saw_origin = false, saw_half = false;
    for (const auto& row : t.rows) {
        REQUIRE(row.size() == 4);
        const double s = std::stod(row[0]), tt = std::stod(row[1]), q = std::stod(row[3]);
        CHECK(s + tt <= 1.0 + 1e-9);
        CHECK(q >= 0.0);
        if (tt >= 0.5) CHECK(q < 1e-6);
        if (s == 0.0 && tt == 0.0) {
            saw_origin = true;
            CHECK(q == doctest::Approx(1.0).epsilon(1e-6));
        }
        if (s == 0.2 && tt == 0.2) saw_half = true;
    }
    CHECK(saw_origin);
    CHECK(saw_half);
}

TEST_CASE("private information surface is positive below the halfway line") {
    const CsvTable t = parse_csv(run_private_info_surface(6, 6));
    REQUIRE(t.header == std::vector<std::string>{"s", "t", "p_star", "u_star", "p1"});
    for (const auto& row : t.rows) {
        const double s = std::stod(row[0]), tt = std::stod(row[1]), p1 = std::stod(row[4]);
        CHECK(p1 >= 0.0);
        if (tt >= 0.5 + 1e-9) CHECK(p1 <= 1e-6);        // anti-degradable side
        if (s == 0.2 && tt == 0.4) CHECK(p1 > 1e-3);    // strictly inside t < 1/2
    }
}

TEST_CASE("flagged region scan: inequality classifier matches the feasibility search") {
    const CsvTable t = parse_csv(run_flagged_region_scan(4, 4, 2));
    REQUIRE(t.header.back() == "agree");
    CHECK(t.rows.size() == 32);
    for (const auto& row : t.rows) {
        INFO(row[0] << "," << row[1] << "," << row[2] << " analytic=" << row[3]
                    << " numeric=" << row[4]);
        CHECK(row[5] == "1");
    }
}

TEST_CASE("amplification demo passes its own inequality checks") {
    const json j = json::parse(run_amplification_demo(0.3, 0.2, 0.5, {}));
    CHECK(j["pass"]["lambda_in_range"].get<bool>());
    CHECK(j["pass"]["gain_positive"].get<bool>());
    CHECK(j["pass"]["r_b_within_5pct"].get<bool>());
    CHECK(j["pass"]["r_e_within_5pct"].get<bool>());
    CHECK(j["q1"].get<double>() > 0.01);
}

TEST_CASE("smith-yard demo exhibits superadditivity at a zero-capacity point") {
    const json j = json::parse(run_smith_yard_demo(0.3, 0.45, 3));
    CHECK(j["q1_channel"].get<double>() < 1e-6);
    CHECK(j["p1_two_state"].get<double>() > 0.05);
    CHECK(j["pass"]["identity_ok"].get<bool>());
    CHECK(j["pass"]["joint_rate_positive"].get<bool>());
    CHECK(j["pass"]["superadditive"].get<bool>());
}

TEST_CASE("scaling demo fits the predicted coefficient") {
    const json j = json::parse(run_scaling_demo(0.3));
    CHECK(j["pass"]["within_10pct"].get<bool>());
    CHECK(j["predicted_c2_log"].get<double>() ==
          doctest::Approx(-(1.0 - 0.3) / (4.0 * 0.3)).epsilon(1e-12));
}

TEST_CASE("ratio probe reports bounds without asserting the conjecture") {
    const json j = json::parse(run_ratio_probe(0.2, 0.3, 2, 24, 5));
    CHECK(j["probe_only"].get<bool>());
    CHECK(j["r3_upper_bound"].get<double>() > 0.0);
    CHECK(j["samples_used"].get<std::size_t>() > 0);
    CHECK(j["contraction"]["sup_estimate"].get<double>() >=
          j["contraction"]["inf_estimate"].get<double>());
    CHECK(j.contains("conjectured_contraction_inf"));
}

TEST_CASE("experiment runner: reruns are byte-identical and echo their config") {
    ExperimentConfig cfg;
    cfg.experiment = "scaling_demo";
    cfg.params = {{"gamma", "0.5"}};
    cfg.out_path = "/tmp/qadd_test_scaling.json";
    cfg.seed = 42;
    REQUIRE(run_experiment(cfg) == 0);
    const std::string first = slurp(cfg.out_path);
    const std::string echo = slurp(cfg.out_path + ".config.json");
    REQUIRE(run_experiment(cfg) == 0);
    CHECK(first == slurp(cfg.out_path));
    CHECK(first.find("\"within_10pct\": true") != std::string::npos);

    const json e = json::parse(echo);
    CHECK(e["experiment"] == "scaling_demo");
    CHECK(e["params"]["gamma"] == "0.5");
    CHECK(e["seed"] == 42);
    std::remove(cfg.out_path.c_str());
    std::remove((cfg.out_path + ".config.json").c_str());
}

TEST_CASE("experiment runner: exit codes distinguish precondition failures") {
    ExperimentConfig bad;
    bad.experiment = "no_such_experiment";
    bad.out_path = "/tmp/qadd_test_err.json";
    CHECK(run_experiment(bad) == 2);
    const json e = json::parse(slurp(bad.out_path));
    CHECK(e["exit_code"] == 2);
    std::remove(bad.out_path.c_str());
    std::remove((bad.out_path + ".config.json").c_str());

    ExperimentConfig pre;
    pre.experiment = "amplification_demo";
    pre.params = {{"s", "0.2"}, {"t", "0.6"}};  // one-shot rate vanishes here
    CHECK(run_experiment(pre) == 2);

    ExperimentConfig typo;
    typo.experiment = "scaling_demo";
    typo.params = {{"gamm", "0.3"}};
    CHECK(run_experiment(typo) == 2);

    ExperimentConfig toobig;
    toobig.experiment = "coherent_surface";
    toobig.params = {{"s_steps", "500"}};
    CHECK(run_experiment(toobig) == 2);
}
