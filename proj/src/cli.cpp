#include "gridsched/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>

#include "gridsched/generator.hpp"
#include "gridsched/lp_export.hpp"
#include "gridsched/metrics.hpp"
#include "gridsched/scenario_io.hpp"
#include "gridsched/schedule.hpp"
#include "gridsched/sweep.hpp"

namespace gridsched {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolverFailure = 4;

struct SolveFlags {
    std::string mode;      // uni | v2g
    std::string price;     // rt | nd | re
    std::string constrain; // all | none | zone ids
    double eta = std::numeric_limits<double>::quiet_NaN();
    bool drop_caps = false;
    std::string currency;
    std::string export_lp_path;
    double tol_feas = 1e-7;
    double tol_opt = 1e-9;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& flags) {
    cmd->add_option("--mode", flags.mode, "Charging direction: uni or v2g");
    cmd->add_option("--price", flags.price, "Price profile: rt, nd or re");
    cmd->add_option("--eta", flags.eta,
                    "Cap headroom fraction; caps become (1+eta)*peak demand");
    cmd->add_flag("--no-caps", flags.drop_caps, "Remove all zone power caps");
    cmd->add_option("--constrain", flags.constrain,
                    "Zones to cap: all, none, or comma-separated ids");
    cmd->add_option("--currency", flags.currency, "Currency label for reports");
    cmd->add_option("--export-lp", flags.export_lp_path,
                    "Also write the model in LP text format to this path");
    cmd->add_option("--tol-feas", flags.tol_feas, "Solver feasibility tolerance");
    cmd->add_option("--tol-opt", flags.tol_opt, "Solver optimality tolerance");
}

RunParams params_from_flags(const SolveFlags& flags) {
    RunParams p;
    if (!flags.mode.empty()) p.direction = direction_mode_from_string(flags.mode);
    if (!flags.price.empty()) p.price_profile = price_profile_from_string(flags.price);
    if (!flags.constrain.empty()) p.constrained_zones = flags.constrain;
    if (flags.drop_caps) p.drop_caps = true;
    else if (!std::isnan(flags.eta)) p.eta = flags.eta;
    return p;
}

std::uint64_t pick_seed(const GeneratorConfig& cfg, bool seed_flag_set,
                        std::uint64_t seed_flag) {
    // Precedence: --seed flag, then GRIDSCHED_SEED, then config.
    if (seed_flag_set) return seed_flag;
    if (const char* env = std::getenv("GRIDSCHED_SEED")) {
        char* end = nullptr;
        std::uint64_t v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0') return v;
        std::cerr << "gridsched: ignoring malformed GRIDSCHED_SEED='" << env << "'\n";
    }
    return cfg.rng_seed;
}

int cmd_validate(const std::string& scenario_path) {
    ScenarioConfig sc = load_scenario(scenario_path);
    ValidationReport report = validate(sc);
    for (const auto& w : report.warnings) std::cout << "warning: " << w << '\n';
    if (!report.ok()) {
        for (const auto& v : report.violations) std::cout << "violation: " << v << '\n';
        return kExitValidation;
    }
    std::cout << "scenario valid: " << sc.fleet.size() << " EVs, " << sc.zones.size()
              << " zones, " << sc.grid.interval_count << " intervals\n";
    return kExitOk;
}

int cmd_generate(const std::string& config_path, const std::string& out_path,
                 bool seed_set, std::uint64_t seed, const std::string& dump_dir) {
    GeneratorConfig cfg = load_generator_config(config_path);
    cfg.rng_seed = pick_seed(cfg, seed_set, seed);
    ScenarioConfig sc = generate_scenario(cfg);

    ValidationReport report = validate(sc);
    if (!report.ok()) {
        for (const auto& v : report.violations)
            std::cerr << "generated scenario invalid: " << v << '\n';
        return kExitValidation;
    }
    save_scenario(sc, out_path);
    if (!dump_dir.empty()) dump_presence_csv(sc, dump_dir);

    // Fleet summary: per-type counts and per-zone residential counts.
    std::map<std::string, int> type_counts;
    for (const auto& ev : sc.fleet) ++type_counts[to_string(ev.user_type)];
    std::vector<int> residential(sc.zones.size(), 0);
    for (const auto& loc : assign_locations(cfg)) ++residential[loc.residential];

    std::cout << "generated " << sc.fleet.size() << " EVs (seed " << cfg.rng_seed << ")\n";
    for (const auto& [type, count] : type_counts)
        std::cout << "  " << type << ": " << count << '\n';
    std::cout << "residential zones:\n";
    for (std::size_t z = 0; z < sc.zones.size(); ++z)
        std::cout << "  " << sc.zones[z].id << ": " << residential[z] << '\n';
    std::cout << "scenario written to " << out_path << '\n';
    return kExitOk;
}

int cmd_solve(const std::string& scenario_path, const std::string& out_dir,
              const SolveFlags& flags) {
    ScenarioConfig base = load_scenario(scenario_path);
    ScenarioConfig sc = resolve_run(&base, nullptr, params_from_flags(flags));
    if (!flags.currency.empty()) sc.currency = flags.currency;

    ValidationReport report = validate(sc);
    if (!report.ok()) {
        for (const auto& v : report.violations) std::cerr << "violation: " << v << '\n';
        return kExitValidation;
    }

    if (!flags.export_lp_path.empty()) export_lp(build_model(sc).lp, flags.export_lp_path);

    SimplexOptions options;
    options.tol_feas = flags.tol_feas;
    options.tol_opt = flags.tol_opt;
    ChargeSchedule schedule = solve_scenario(sc, options);
    ImpactReport impact = build_report(schedule, sc);

    std::filesystem::path dir = out_dir;
    write_report_json(impact, sc, dir / "report.json");
    write_report_zone_csv(impact, sc, dir / "report_zones.csv");
    write_report_ev_csv(impact, sc, dir / "report_evs.csv");
    write_schedule_csv(schedule, sc, dir / "schedule.csv");
    for (std::size_t z = 0; z < sc.zones.size(); ++z)
        write_plot_data_csv(impact, sc, static_cast<int>(z),
                            dir / ("plotdata_" + sc.zones[z].id + ".csv"));
    write_figure_manifest(sc, dir);

    std::cout << "total cost: " << format_number(impact.total_cost) << ' ' << sc.currency
              << " (" << schedule.lp_iterations << " simplex iterations)\n";
    for (std::size_t z = 0; z < sc.zones.size(); ++z)
        std::cout << "  " << sc.zones[z].id << ": mu=" << format_number(impact.peak_ratio_pct[z])
                  << "% xi=" << format_number(impact.energy_ratio_pct[z]) << "%\n";
    std::cout << "reports written to " << dir.string() << '\n';
    return kExitOk;
}

int cmd_export_lp(const std::string& scenario_path, const std::string& out_path,
                  const SolveFlags& flags) {
    ScenarioConfig base = load_scenario(scenario_path);
    ScenarioConfig sc = resolve_run(&base, nullptr, params_from_flags(flags));
    ValidationReport report = validate(sc);
    if (!report.ok()) {
        for (const auto& v : report.violations) std::cerr << "violation: " << v << '\n';
        return kExitValidation;
    }
    BuildResult built = build_model(sc);
    export_lp(built.lp, out_path);
    std::cout << "LP with " << built.lp.num_variables() << " variables, "
              << built.lp.num_rows() << " rows written to " << out_path << '\n';
    return kExitOk;
}

int cmd_sweep(const std::string& spec_path, int jobs, const std::string& out_dir) {
    SweepSpec spec = SweepSpec::load(spec_path);
    if (jobs > 0) spec.jobs = jobs;
    if (!out_dir.empty()) spec.output_dir = out_dir;
    SweepResult result = run_sweep(spec);

    int failed = 0;
    for (const auto& run : result.runs) {
        std::cout << run.run_id << "  [" << run.status << "]  " << run.params.label();
        if (run.status == "ok")
            std::cout << "  total_cost=" << format_number(run.total_cost);
        if (run.seconds > 0.0) std::cout << "  (" << format_number(run.seconds) << "s)";
        std::cout << '\n';
        if (run.status != "ok") ++failed;
    }
    std::cout << result.runs.size() << " runs (" << failed << " failed), master CSV: "
              << result.master_csv.string() << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"EV charge-schedule optimization over zone-constrained grids"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "Synthesize a scenario from a generator config");
    std::string gen_config, gen_out = "scenario.json", dump_dir;
    std::uint64_t seed = 0;
    generate->add_option("--config", gen_config, "Generator config JSON")->required();
    generate->add_option("--out", gen_out, "Output scenario path");
    auto* seed_opt = generate->add_option("--seed", seed, "Override the RNG seed");
    generate->add_option("--dump-presence", dump_dir, "Directory for presence/driving CSV dumps");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
    std::string val_path;
    validate_cmd->add_option("scenario", val_path, "Scenario JSON")->required();

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "Optimize one scenario and emit reports");
    std::string solve_path, solve_out = "out";
    SolveFlags solve_flags;
    solve_cmd->add_option("scenario", solve_path, "Scenario JSON")->required();
    solve_cmd->add_option("--out-dir", solve_out, "Report directory");
    add_solve_flags(solve_cmd, solve_flags);

    // export-lp
    auto* export_cmd = app.add_subcommand("export-lp", "Write the scheduling LP in LP text format");
    std::string export_path, export_out = "model.lp";
    SolveFlags export_flags;
    export_cmd->add_option("scenario", export_path, "Scenario JSON")->required();
    export_cmd->add_option("--out", export_out, "Output .lp path");
    add_solve_flags(export_cmd, export_flags);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
    std::string sweep_path, sweep_out;
    int sweep_jobs = 0;
    sweep_cmd->add_option("spec", sweep_path, "Sweep spec JSON")->required();
    sweep_cmd->add_option("--jobs", sweep_jobs, "Concurrent runs (default: hardware)");
    sweep_cmd->add_option("--out-dir", sweep_out, "Override the spec's output_dir");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*generate)
            return cmd_generate(gen_config, gen_out, seed_opt->count() > 0, seed, dump_dir);
        if (*validate_cmd) return cmd_validate(val_path);
        if (*solve_cmd) return cmd_solve(solve_path, solve_out, solve_flags);
        if (*export_cmd) return cmd_export_lp(export_path, export_out, export_flags);
        if (*sweep_cmd) return cmd_sweep(sweep_path, sweep_jobs, sweep_out);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const SolverFailureError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace gridsched
