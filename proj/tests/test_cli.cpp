#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gridsched/cli.hpp"
#include "gridsched/generator.hpp"
#include "gridsched/scenario_io.hpp"

using namespace gridsched;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "gridsched_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// Small, fast generator config: 3 EVs over two days.
fs::path write_small_config(const fs::path& dir, std::uint64_t seed) {
    auto cfg = GeneratorConfig::example(3, seed);
    cfg.grid = TimeGrid{96, 0.5, "Sun 00:00"};
    auto path = dir / ("gen_" + std::to_string(seed) + ".json");
    std::ofstream(path) << generator_config_to_json(cfg);
    return path;
}

struct CaptureCerr {
    std::ostringstream captured;
    std::streambuf* old;
    CaptureCerr() : old(std::cerr.rdbuf(captured.rdbuf())) {}
    ~CaptureCerr() { std::cerr.rdbuf(old); }
};

}  // namespace

TEST_CASE("generate: writes a valid scenario, byte-stable under one seed") {
    auto dir = work_dir();
    auto cfg_path = write_small_config(dir, 7);
    auto out1 = dir / "scen1.json";
    auto out2 = dir / "scen2.json";
    CHECK(run_cli({"generate", "--config", cfg_path.string(), "--out", out1.string()}) == 0);
    CHECK(run_cli({"generate", "--config", cfg_path.string(), "--out", out2.string()}) == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(run_cli({"validate", out1.string()}) == 0);
}

TEST_CASE("generate: missing consumption_matrix exits 2 naming the field") {
    auto dir = work_dir();
    auto bad = dir / "bad_gen.json";
    std::ofstream(bad) << R"({
      "fleet_size": 2,
      "zones": [{"id": "a", "demand_shape": "rural_flat"}],
      "destination_distribution": {"residential": [1.0], "work": [1.0], "other": [1.0]}
    })";
    CaptureCerr capture;
    CHECK(run_cli({"generate", "--config", bad.string(), "--out",
                   (dir / "x.json").string()}) == 2);
    CHECK(capture.captured.str().find("consumption_matrix") != std::string::npos);
}

TEST_CASE("generate: GRIDSCHED_SEED overrides the config seed, flag beats both") {
    auto dir = work_dir();
    auto cfg_path = write_small_config(dir, 7);
    auto by_env = dir / "by_env.json";
    auto by_flag = dir / "by_flag.json";
    auto plain9 = dir / "plain9.json";

    setenv("GRIDSCHED_SEED", "9", 1);
    CHECK(run_cli({"generate", "--config", cfg_path.string(), "--out", by_env.string()}) == 0);
    CHECK(run_cli({"generate", "--config", cfg_path.string(), "--out", by_flag.string(),
                   "--seed", "11"}) == 0);
    unsetenv("GRIDSCHED_SEED");
    auto cfg9 = write_small_config(dir, 9);
    CHECK(run_cli({"generate", "--config", cfg9.string(), "--out", plain9.string()}) == 0);

    CHECK(slurp(by_env) == slurp(plain9));          // env seed took effect
    CHECK(slurp(by_flag) != slurp(by_env));         // flag overrode env
}

TEST_CASE("solve: emits the full report bundle with stable exit codes") {
    auto dir = work_dir();
    auto cfg_path = write_small_config(dir, 21);
    auto scen = dir / "scen_solve.json";
    REQUIRE(run_cli({"generate", "--config", cfg_path.string(), "--out", scen.string()}) == 0);

    auto out = dir / "solve_out";
    CHECK(run_cli({"solve", scen.string(), "--out-dir", out.string()}) == 0);
    for (const char* f :
         {"report.json", "report_zones.csv", "report_evs.csv", "schedule.csv",
          "plotdata_cbd.csv", "plotdata_suburb.csv", "plotdata_rural.csv", "figures.json"})
        CHECK(fs::exists(out / f));

    auto report = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(report.at("zones").size() == 3);
    CHECK(report.at("evs").size() == 3);
}

TEST_CASE("solve: uni mode reports zero discharged/charged ratios") {
    auto dir = work_dir();
    auto cfg_path = write_small_config(dir, 33);
    auto scen = dir / "scen_uni.json";
    REQUIRE(run_cli({"generate", "--config", cfg_path.string(), "--out", scen.string()}) == 0);
    auto out = dir / "uni_out";
    REQUIRE(run_cli({"solve", scen.string(), "--out-dir", out.string(), "--mode", "uni"}) == 0);
    auto report = nlohmann::json::parse(slurp(out / "report.json"));
    for (const auto& ev : report.at("evs"))
        CHECK(ev.at("discharged_charged_ratio").get<double>() == 0.0);
}

TEST_CASE("solve: v2g over a full week on the rt profile earns arbitrage credit") {
    auto dir = work_dir();
    auto cfg = GeneratorConfig::example(3, 21);  // weekly grid: room to arbitrage
    auto cfg_path = dir / "gen_week.json";
    std::ofstream(cfg_path) << generator_config_to_json(cfg);
    auto scen = dir / "scen_v2g.json";
    REQUIRE(run_cli({"generate", "--config", cfg_path.string(), "--out", scen.string()}) == 0);
    auto out = dir / "v2g_out";
    REQUIRE(run_cli({"solve", scen.string(), "--out-dir", out.string(), "--mode", "v2g",
                     "--price", "rt"}) == 0);
    auto report = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(report.at("total_cost").get<double>() < 0.0);
}

TEST_CASE("solve: an overloaded zero-headroom scenario exits 3 with a named row") {
    auto dir = work_dir();
    // Hand-built scenario: one EV connected only while the zone sits at its
    // peak, eta=0 gives it no headroom.
    std::string doc = R"({
      "grid": {"interval_count": 2, "dt_hours": 0.5, "start_label": "Mon 00:00"},
      "zones": [{"id": "z", "local_demand_kw": [100.0, 40.0],
                 "power_cap_kw": [100.0, 100.0]}],
      "prices": {"kind": "rt", "charge_price": [[0.2, 0.2]]},
      "fleet": [{"id": "ev0", "initial_energy_kwh": 24.0, "target_energy_kwh": 25.0,
                 "max_discharge_kw": 0.0}],
      "presence": {"per_ev": [{"zones": [[1, 0]], "driving_kwh": [0.0, 0.0]}]}
    })";
    auto scen = dir / "overloaded.json";
    std::ofstream(scen) << doc;
    CaptureCerr capture;
    CHECK(run_cli({"solve", scen.string(), "--out-dir", (dir / "inf_out").string()}) == 3);
    CHECK(capture.captured.str().find("cap[z][t0]") != std::string::npos);
}

TEST_CASE("validate: malformed scenario exits 2") {
    auto dir = work_dir();
    auto bad = dir / "bad_scen.json";
    std::ofstream(bad) << "{\"grid\": {\"interval_count\": 2, \"dt_hours\": 0.5}}";
    CHECK(run_cli({"validate", bad.string()}) == 2);
}

TEST_CASE("export-lp: writes a readable model") {
    auto dir = work_dir();
    auto cfg_path = write_small_config(dir, 21);
    auto scen = dir / "scen_lp.json";
    REQUIRE(run_cli({"generate", "--config", cfg_path.string(), "--out", scen.string()}) == 0);
    auto lp_path = dir / "model.lp";
    CHECK(run_cli({"export-lp", scen.string(), "--out", lp_path.string()}) == 0);
    auto text = slurp(lp_path);
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("target[ev0]") != std::string::npos);
    CHECK(text.find("soc[ev0][t0]") != std::string::npos);
}

TEST_CASE("sweep: a one-value sweep reproduces the solve output") {
    auto dir = work_dir();
    auto cfg_path = write_small_config(dir, 21);
    auto scen = dir / "scen_sw.json";
    REQUIRE(run_cli({"generate", "--config", cfg_path.string(), "--out", scen.string()}) == 0);

    auto spec = dir / "one_sweep.json";
    std::ofstream(spec) << R"({
      "base_scenario": ")" << scen.filename().string() << R"(",
      "output_dir": ")" << (dir / "one_out").string() << R"(",
      "axes": [{"parameter": "price_profile", "values": ["re"]}]
    })";
    CHECK(run_cli({"sweep", spec.string(), "--jobs", "1"}) == 0);

    auto solve_out = dir / "one_solve";
    REQUIRE(run_cli({"solve", scen.string(), "--out-dir", solve_out.string(), "--price",
                     "re"}) == 0);

    // The sweep's single run directory holds the identical zone report.
    std::string zone_csv;
    for (const auto& entry : fs::directory_iterator(dir / "one_out")) {
        if (entry.is_directory() && fs::exists(entry.path() / "report_zones.csv"))
            zone_csv = slurp(entry.path() / "report_zones.csv");
    }
    CHECK(zone_csv == slurp(solve_out / "report_zones.csv"));
}

TEST_CASE("sweep: master CSV is stable modulo its timestamp header") {
    auto dir = work_dir();
    auto cfg_path = write_small_config(dir, 50);
    auto spec = dir / "det_sweep.json";
    std::ofstream(spec) << R"({
      "base_scenario": ")" << cfg_path.filename().string() << R"(",
      "output_dir": ")" << (dir / "det_a").string() << R"(",
      "axes": [
        {"parameter": "direction_mode", "values": ["uni", "v2g"]},
        {"parameter": "eta", "values": [null, 0.0]},
        {"parameter": "constrained_zones", "values": ["all"]}
      ]
    })";
    CHECK(run_cli({"sweep", spec.string(), "--jobs", "2"}) == 0);
    CHECK(run_cli({"sweep", spec.string(), "--jobs", "1", "--out-dir",
                   (dir / "det_b").string()}) == 0);

    auto strip = [](std::string s) { return s.substr(s.find('\n') + 1); };
    CHECK(strip(slurp(dir / "det_a" / "sweep_master.csv")) ==
          strip(slurp(dir / "det_b" / "sweep_master.csv")));
}

TEST_CASE("sweep: rerunning into the same directory resumes finished runs") {
    auto dir = work_dir();
    auto cfg_path = write_small_config(dir, 60);
    auto out = dir / "resume_out";
    auto spec = dir / "resume_sweep.json";
    std::ofstream(spec) << R"({
      "base_scenario": ")" << cfg_path.filename().string() << R"(",
      "output_dir": ")" << out.string() << R"(",
      "axes": [{"parameter": "eta", "values": [0.6, 0.0]},
               {"parameter": "constrained_zones", "values": ["all"]}]
    })";
    REQUIRE(run_cli({"sweep", spec.string(), "--jobs", "1"}) == 0);
    auto first = slurp(out / "sweep_master.csv");

    // Second pass reuses the content-hashed run directories.
    REQUIRE(run_cli({"sweep", spec.string(), "--jobs", "1"}) == 0);
    auto second = slurp(out / "sweep_master.csv");
    auto strip = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
    CHECK(strip(first) == strip(second));
}

TEST_CASE("sweep: the price-profile axis ranks retail tariffs costliest") {
    auto dir = work_dir();
    auto cfg = GeneratorConfig::example(3, 21);  // weekly grid
    auto cfg_path = dir / "gen_price_axis.json";
    std::ofstream(cfg_path) << generator_config_to_json(cfg);
    auto spec = dir / "price_sweep.json";
    std::ofstream(spec) << R"({
      "base_scenario": ")" << cfg_path.filename().string() << R"(",
      "output_dir": ")" << (dir / "price_out").string() << R"(",
      "axes": [
        {"parameter": "direction_mode", "values": ["uni"]},
        {"parameter": "price_profile", "values": ["rt", "nd", "re"]}
      ]
    })";
    REQUIRE(run_cli({"sweep", spec.string(), "--jobs", "1"}) == 0);

    auto master = slurp(dir / "price_out" / "sweep_master.csv");
    std::istringstream lines(master);
    std::string line;
    std::getline(lines, line);  // timestamp
    std::getline(lines, line);  // header
    std::vector<double> costs;
    while (std::getline(lines, line))
        costs.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    REQUIRE(costs.size() == 3);  // rt, nd, re
    CHECK(costs[2] > costs[0]);
    CHECK(costs[2] > costs[1]);
}

TEST_CASE("sweep: eta axis ordering shows the cap-tightening cost trend") {
    auto dir = work_dir();
    auto cfg_path = write_small_config(dir, 21);
    auto spec = dir / "trend_sweep.json";
    std::ofstream(spec) << R"({
      "base_scenario": ")" << cfg_path.filename().string() << R"(",
      "output_dir": ")" << (dir / "trend_out").string() << R"(",
      "axes": [
        {"parameter": "direction_mode", "values": ["v2g"]},
        {"parameter": "constrained_zones", "values": ["all"]},
        {"parameter": "eta", "values": [0.6, 0.3, 0.0]}
      ]
    })";
    REQUIRE(run_cli({"sweep", spec.string(), "--jobs", "1"}) == 0);
    auto master = slurp(dir / "trend_out" / "sweep_master.csv");
    std::istringstream lines(master);
    std::string line;
    std::getline(lines, line);  // timestamp
    std::getline(lines, line);  // header
    std::vector<double> costs;
    while (std::getline(lines, line)) {
        auto pos = line.rfind(',');
        costs.push_back(std::stod(line.substr(pos + 1)));
    }
    REQUIRE(costs.size() == 3);
    CHECK(costs[0] <= costs[1] + 1e-6);
    CHECK(costs[1] <= costs[2] + 1e-6);
}
