#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "rdsig/config.hpp"
#include "rdsig/csv.hpp"
#include "rdsig/errors.hpp"
#include "rdsig/experiments.hpp"
#include "rdsig/sampling.hpp"

using namespace rdsig;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("rdsig_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int counter;
};
int TempDir::counter = 0;

fs::path write_file(const fs::path& dir, const std::string& name,
                    const std::string& body) {
    fs::path p = dir / name;
    std::ofstream out(p);
    out << body;
    return p;
}

KeyValue kv(const std::string& k, const std::string& v) { return {k, v, 0}; }

std::string data_rows(const fs::path& p) {
    std::ifstream in(p);
    std::string line, out;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace

TEST_CASE("flag-only config resolves with defaults") {
    ExperimentConfig cfg = parse_config(
        std::nullopt, {kv("model.delta", "2"), kv("model.mu1", "0"),
                       kv("model.mu2", "1"), kv("model.sigma", "0.5")});
    CHECK(cfg.params.delta() == 2);
    CHECK(cfg.params.pmf(kState1).probs() == std::vector<double>{0.5, 0.5});
    CHECK(cfg.alpha == 0.01);
    CHECK(cfg.t_horizon == 200);
    CHECK(cfg.runs == 100000);
    CHECK(cfg.scale == 0.1);
    CHECK(cfg.effective_runs() == 10000);
}

TEST_CASE("empty config lists the missing keys") {
    try {
        parse_config(std::nullopt, {});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("model.delta") != std::string::npos);
        CHECK(msg.find("model.sigma") != std::string::npos);
    }
}

TEST_CASE("unknown keys name the offender and line") {
    TempDir tmp;
    fs::path file = write_file(tmp.path,
                               "bad.cfg",
                               "model.delta=2\nmodel.typo=1\n");
    try {
        parse_config(file, {});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("model.typo") != std::string::npos);
        CHECK(msg.find("line 2") != std::string::npos);
    }
}

TEST_CASE("layering: defaults < preset < file < flags") {
    TempDir tmp;
    fs::path file = write_file(tmp.path, "exp.cfg",
                               "preset=fig1\n"
                               "run.T=150\n"
                               "# comment line\n"
                               "model.sigma=12\n");
    ExperimentConfig cfg =
        parse_config(file, {kv("model.sigma", "15"), kv("run.seed", "99")});
    CHECK(cfg.preset == Preset::fig1);
    CHECK(cfg.params.delta() == 3);      // preset
    CHECK(cfg.params.mu1() == 2.0);      // preset
    CHECK(cfg.t_horizon == 150);         // file overrides preset's 300
    CHECK(cfg.params.sigma() == 15.0);   // flag overrides file
    CHECK(cfg.seed == 99);               // flag
    CHECK(cfg.alpha == 0.01);
}

TEST_CASE("preset values match the experiment table") {
    auto resolve = [](const std::string& name) {
        return parse_config(std::nullopt, {kv("preset", name)});
    };
    ExperimentConfig fig1 = resolve("fig1");
    CHECK(fig1.params.delta() == 3);
    CHECK(fig1.params.mu1() == 2.0);
    CHECK(fig1.params.mu2() == 5.0);
    CHECK(fig1.params.sigma() == 10.0);
    CHECK(fig1.alpha == 0.01);
    CHECK(fig1.t_horizon == 300);

    ExperimentConfig mu1zero = resolve("fig_mu1zero");
    CHECK(mu1zero.params.delta() == 2);
    CHECK(mu1zero.params.mu1() == 0.0);
    CHECK(mu1zero.params.mu2() == 1.0);
    REQUIRE(!mu1zero.sigma_grid.empty());
    CHECK(mu1zero.sigma_grid.front() == 0.2);
    CHECK(mu1zero.sigma_grid.back() == 0.6);

    ExperimentConfig dish = resolve("fig_dishwasher");
    CHECK(dish.params.delta() == 10);
    CHECK(dish.params.mu1() == 66.0);
    CHECK(dish.params.mu2() == 2200.0);
    CHECK(dish.params.mu0() == 90.0);

    CHECK_THROWS_AS(resolve("fig_nope"), ConfigError);
}

TEST_CASE("config invariants rejected with context") {
    CHECK_THROWS_AS(parse_config(std::nullopt,
                                 {kv("model.delta", "2"), kv("model.mu1", "0"),
                                  kv("model.mu2", "1"), kv("model.sigma", "0.5"),
                                  kv("run.alpha", "1.5")}),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(std::nullopt,
                                 {kv("model.delta", "2"), kv("model.mu1", "0"),
                                  kv("model.mu2", "1"), kv("model.sigma", "-1")}),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(std::nullopt,
                                 {kv("model.delta", "2"), kv("model.mu1", "0"),
                                  kv("model.mu2", "1"), kv("model.sigma", "0.5"),
                                  kv("model.p1", "0.4,0.4,0.2")}),
                    ConfigError);
}

TEST_CASE("canonical form and hash ignore run-irrelevant fields") {
    auto base = parse_config(
        std::nullopt, {kv("model.delta", "2"), kv("model.mu1", "0"),
                       kv("model.mu2", "1"), kv("model.sigma", "0.5")});
    auto threaded = base;
    threaded.threads = 8;
    threaded.output_dir = "elsewhere";
    CHECK(base.config_hash() == threaded.config_hash());
    auto reseeded = base;
    reseeded.seed = 2;
    CHECK(base.config_hash() != reseeded.config_hash());
}

TEST_CASE("observation csv round trip") {
    TempDir tmp;
    std::vector<double> x = {1.5, -2.25, 0.0, 3.14159};
    fs::path p = tmp.path / "obs.csv";
    write_observation_csv(p, "version=test seed=1", x);
    std::vector<double> back = read_observation_csv(p);
    CHECK(back == x);
}

TEST_CASE("trace reader flags malformed rows with their line") {
    TempDir tmp;
    fs::path p = write_file(tmp.path, "bad.csv", "t,x\n1,0.5\nnot-a-row\n");
    try {
        read_observation_csv(p);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    fs::path empty = write_file(tmp.path, "empty.csv", "t,x\n");
    CHECK_THROWS_AS(read_observation_csv(empty), ConfigError);
}

TEST_CASE("phase sequence csv shape") {
    TempDir tmp;
    PhaseSequence seq(std::vector<Phase>{{kState1, 2}, {kState2, 3}});
    fs::path p = tmp.path / "phases.csv";
    write_phase_sequence_csv(p, "meta", seq);
    std::string rows = data_rows(p);
    CHECK(rows == "phase_index,state,duration,censored\n1,1,2,0\n2,2,3,1\n");
}

TEST_CASE("ingest detects an injected signal and stays quiet on noise") {
    TempDir tmp;
    ModelParams params(2, DurationPmf::uniform(2), DurationPmf::uniform(2), 0.0,
                       1.0, 0.25);
    Rng rng(61);
    Observations h1 = sample_observations(params, Hypothesis::h1, 60, rng);
    fs::path sig = tmp.path / "sig.csv";
    write_observation_csv(sig, "synthetic h1", h1.x);
    IngestReport hit = ingest_trace(sig, params, 0.01, 4000, 9001, 2);
    REQUIRE(hit.first_crossing_t.has_value());
    CHECK(*hit.first_crossing_t <= 60);
    CHECK(hit.log_lrt.size() == 60);
    CHECK(hit.gamma_star_log.size() == 60);

    // Calibration check: noise-only traces cross at roughly the budget rate
    // at the final horizon.
    BatchResult probe = run_batch(params, Hypothesis::h0, 60, 1000, 424242, 2);
    BatchResult calib = run_batch(params, Hypothesis::h0, 60, 10000,
                                  derive_seed(9001, 3), 2);
    double cut = threshold_at_alpha(calib, 60, 0.01);
    int crossings = 0;
    for (int j = 0; j < 1000; ++j) crossings += probe.at(j, 60) > cut;
    double rate = crossings / 1000.0;
    CHECK(rate <= 0.01 + 0.0135);
    CHECK(rate >= 0.0);

    CHECK_THROWS_AS(ingest_trace(tmp.path / "missing.csv", params, 0.01, 100, 1, 1),
                    ConfigError);
}

TEST_CASE("reproduce is deterministic across thread counts") {
    TempDir tmp;
    auto make_cfg = [&](const std::string& sub, int threads) {
        ExperimentConfig cfg = parse_config(
            std::nullopt,
            {kv("preset", "fig_dishwasher"), kv("run.scale", "0.002"),
             kv("run.T", "15"), kv("run.sigma_grid", "90,110"),
             kv("run.seed", "7")});
        cfg.output_dir = tmp.path / sub;
        cfg.threads = threads;
        return cfg;
    };
    auto first = reproduce(make_cfg("a", 1));
    auto second = reproduce(make_cfg("b", 4));
    REQUIRE(first.size() == second.size());
    for (size_t i = 0; i < first.size(); ++i) {
        CHECK(data_rows(first[i]) == data_rows(second[i]));
        CHECK(!data_rows(first[i]).empty());
    }
}

TEST_CASE("reproduce emits the documented tables") {
    TempDir tmp;

    ExperimentConfig bounds_cfg = parse_config(
        std::nullopt, {kv("preset", "fig_exponent_vs_bound"),
                       kv("run.scale", "0.02"), kv("run.T", "60"),
                       kv("run.sigma_grid", "10,20"), kv("run.seed", "11")});
    bounds_cfg.output_dir = tmp.path / "bounds";
    bounds_cfg.threads = 2;
    reproduce(bounds_cfg);
    std::ifstream table(tmp.path / "bounds" / "fig_exponent_vs_bound.csv");
    REQUIRE(table.good());
    std::string meta, header;
    std::getline(table, meta);
    std::getline(table, header);
    CHECK(header == "sigma,slope,lb,ub");
    CHECK(meta.rfind("# version=", 0) == 0);

    // High-SNR appliance levels: the miss probability collapses within a
    // handful of samples.
    ExperimentConfig dish_cfg = parse_config(
        std::nullopt,
        {kv("preset", "fig_dishwasher"), kv("run.scale", "0.02"),
         kv("run.T", "15"), kv("run.sigma_grid", "90"), kv("run.seed", "11")});
    dish_cfg.output_dir = tmp.path / "dish";
    dish_cfg.threads = 2;
    reproduce(dish_cfg);
    std::ifstream summary(tmp.path / "dish" / "fig_dishwasher_summary.json");
    REQUIRE(summary.good());
    std::string body((std::istreambuf_iterator<char>(summary)),
                     std::istreambuf_iterator<char>());
    auto pos = body.find("\"first_t_pmiss_zero\": ");
    REQUIRE(pos != std::string::npos);
    int first_zero = std::stoi(body.substr(pos + 23));
    CHECK(first_zero <= 12);
}

TEST_CASE("reproduce without a preset is a config error") {
    ExperimentConfig cfg = parse_config(
        std::nullopt, {kv("model.delta", "2"), kv("model.mu1", "0"),
                       kv("model.mu2", "1"), kv("model.sigma", "0.5")});
    CHECK_THROWS_AS(reproduce(cfg), ConfigError);
}
