#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "clusterfb/commands.hpp"
#include "clusterfb/experiment.hpp"

using namespace clusterfb;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path fresh_dir(const char* tag) {
    auto p = std::filesystem::temp_directory_path() /
             (std::string("clusterfb_test_") + tag);
    std::filesystem::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("config survives a render and parse round trip") {
    ExperimentConfig cfg = default_config();
    std::string a = render_config(cfg);
    std::string b = render_config(parse_config(a));
    CHECK(a == b);

    cfg.variances.explicit_list = true;
    cfg.variances.values = {0.4, 0.9, 0.6};
    cfg.system.K = 3;
    cfg.scheme.schemes = {SchemeKind::ClusterType1, SchemeKind::SingleThreshold};
    cfg.scheme.threshold_policy = ThresholdPolicy::MinThreshold;
    cfg.scheme.report_policy = ReportPolicy::AllBeams;
    cfg.scheme.exact_report = true;
    cfg.scheme.snr_source = SnrSource::Matrix;
    cfg.run.n_drops = 123;
    cfg.run.workers = 2;
    std::string c = render_config(cfg);
    std::string d = render_config(parse_config(c));
    CHECK(c == d);

    ExperimentConfig back = parse_config(c);
    CHECK(back.variances.explicit_list);
    CHECK(back.system.K == 3);
    CHECK(back.scheme.schemes.size() == 2);
    CHECK(back.scheme.schemes[0] == SchemeKind::ClusterType1);
    CHECK(back.scheme.threshold_policy == ThresholdPolicy::MinThreshold);
    CHECK(back.scheme.report_policy == ReportPolicy::AllBeams);
    CHECK(back.scheme.exact_report);
    CHECK(back.scheme.snr_source == SnrSource::Matrix);
    CHECK(back.run.n_drops == 123);
}

TEST_CASE("unknown or inconsistent keys are rejected by name") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"sytem": {}})"),
                         doctest::Contains("sytem"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config(R"({"system": {"m": 4}})"),
                         doctest::Contains("m"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scheme": {"budgets": 0.8}})"),
                         doctest::Contains("budgets"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config(R"({"run": {"drops": 10}})"),
                         doctest::Contains("drops"), std::invalid_argument);
    CHECK_THROWS(parse_config(
        R"({"system": {"channel_vars": [1.0], "channel_var_seed": 3}})"));
    CHECK_THROWS(parse_config(R"({"system": {"K": 2, "channel_vars": [1.0]}})"));
    CHECK_THROWS(parse_config(
        R"({"system": {"channel_vars": [1.0, 0.5]}, "run": {"k_sweep": [2, 4]}})"));
    CHECK_THROWS(parse_config(R"({"scheme": {"schemes": ["fullcsi", "no_such"]}})"));
    CHECK_THROWS(parse_config(R"({"run": {"n_drops": 0}})"));
}

TEST_CASE("drawn variances are deterministic, open-unit, and nested") {
    auto v5 = draw_variances(42, 5);
    auto v9 = draw_variances(42, 9);
    REQUIRE(v5.size() == 5);
    REQUIRE(v9.size() == 9);
    for (double v : v9) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    for (int i = 0; i < 5; ++i) CHECK(v5[static_cast<std::size_t>(i)] ==
                                      v9[static_cast<std::size_t>(i)]);
    CHECK(draw_variances(43, 5) != v5);
}

TEST_CASE("sweep emits one row per user count and scheme in order") {
    ExperimentConfig cfg = default_config();
    cfg.scheme.schemes = {SchemeKind::FullCSI, SchemeKind::ClusterType2};
    cfg.scheme.n_clusters = 2;
    cfg.run.k_sweep = {4, 6};
    cfg.run.n_drops = 300;
    cfg.run.seed = 9;

    auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].K == 4);
    CHECK(rows[1].K == 4);
    CHECK(rows[2].K == 6);
    CHECK(rows[3].K == 6);
    CHECK(rows[0].scheme == "fullcsi");
    CHECK(rows[1].scheme == "cluster_type2");
    for (const auto& r : rows) {
        CHECK(r.seed == 9);
        CHECK(r.sum_rate > 0.0);
        CHECK(r.sum_rate_se > 0.0);
    }
    CHECK(rows[0].fb_bits == 0.0);          // full feedback costs nothing here
    CHECK(rows[0].rate_loss_bound == 0.0);  // and sets no threshold
    CHECK(rows[1].fb_bits > 0.0);
    CHECK(rows[1].fb_bits_analytic > 0.0);
    CHECK(rows[1].rate_loss_bound > 0.0);
}

TEST_CASE("csv has the fixed header and six significant digits") {
    ResultRow r;
    r.K = 10;
    r.scheme = "conventional";
    r.sum_rate = 1.0 / 3.0;
    r.sum_rate_se = 0.000123456789;
    r.fb_bits = 120.0;
    r.fb_bits_se = 1.5;
    r.fb_bits_analytic = 119.875;
    r.rate_loss_bound = 0.0;
    r.seed = 7;
    std::string csv = to_csv({r});
    std::istringstream ss(csv);
    std::string header, line;
    std::getline(ss, header);
    CHECK(header ==
          "K,scheme,sum_rate,sum_rate_se,fb_bits,fb_bits_se,fb_bits_analytic,"
          "rate_loss_bound,seed");
    std::getline(ss, line);
    CHECK(line == "10,conventional,0.333333,0.000123457,120,1.5,119.875,0,7");
}

TEST_CASE("repeated runs produce identical tables") {
    ExperimentConfig cfg = default_config();
    cfg.scheme.schemes = {SchemeKind::Conventional, SchemeKind::ClusterType1};
    cfg.system.K = 6;
    cfg.scheme.n_clusters = 3;
    cfg.run.n_drops = 400;
    cfg.run.seed = 21;
    std::string a = to_csv(run_experiment(cfg));
    std::string b = to_csv(run_experiment(cfg));
    CHECK(a == b);

    cfg.run.workers = 3;
    std::string c = to_csv(run_experiment(cfg));
    CHECK(a == c);
}

TEST_CASE("simulate command writes the table and manifest") {
    ExperimentConfig cfg = default_config();
    cfg.scheme.schemes = {SchemeKind::SingleThreshold};
    cfg.system.K = 5;
    cfg.run.n_drops = 200;
    auto dir = fresh_dir("sim");
    cfg.run.out_dir = dir.string();

    std::ostringstream out;
    REQUIRE(cmd_simulate(cfg, out) == 0);
    CHECK(std::filesystem::exists(dir / "results.csv"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    std::string csv = slurp(dir / "results.csv");
    CHECK(csv.rfind("K,scheme,", 0) == 0);
    CHECK(csv.find("single_threshold") != std::string::npos);
    std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"config\"") != std::string::npos);

    std::ostringstream out2;
    REQUIRE(cmd_simulate(cfg, out2) == 0);
    CHECK(slurp(dir / "results.csv") == csv);
    std::filesystem::remove_all(dir);
}

TEST_CASE("threshold and bit allocation commands report their tables") {
    ExperimentConfig cfg = default_config();
    cfg.system.K = 8;
    cfg.scheme.n_clusters = 4;

    std::ostringstream thr;
    REQUIRE(cmd_thresholds(cfg, thr) == 0);
    CHECK(thr.str().find("cluster 0") != std::string::npos);
    CHECK(thr.str().find("threshold_type1") != std::string::npos);
    CHECK(thr.str().find("min_clusters") != std::string::npos);

    std::ostringstream bit;
    REQUIRE(cmd_bitalloc(cfg, bit) == 0);
    CHECK(bit.str().find("bits per region:") != std::string::npos);
    CHECK(bit.str().find("objective:") != std::string::npos);
    CHECK(bit.str().find("region 0 levels:") != std::string::npos);

    cfg.scheme.n_clusters = 9; // more clusters than users
    std::ostringstream bad;
    CHECK_THROWS_WITH_AS(cmd_thresholds(cfg, bad), doctest::Contains("n_clusters"),
                         std::invalid_argument);
}

TEST_CASE("per-user-count systems resolve their variances") {
    ExperimentConfig cfg = default_config();
    SystemConfig sys = system_for_k(cfg, 7);
    CHECK(sys.K == 7);
    REQUIRE(sys.channel_vars.size() == 7);

    cfg.variances.explicit_list = true;
    cfg.variances.values = {0.5, 0.6};
    CHECK_THROWS(system_for_k(cfg, 3));
    SystemConfig ok = system_for_k(cfg, 2);
    CHECK(ok.channel_vars == cfg.variances.values);
}
