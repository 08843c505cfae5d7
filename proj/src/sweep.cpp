#include "gridsched/sweep.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "gridsched/metrics.hpp"
#include "gridsched/scenario_io.hpp"
#include "gridsched/schedule.hpp"

namespace gridsched {

using nlohmann::json;

SweepSpec SweepSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sweep spec " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(std::string("sweep spec parse error: ") + e.what());
    }
    SweepSpec spec;
    try {
        std::filesystem::path base = j.at("base_scenario").get<std::string>();
        spec.base_scenario = base.is_absolute() ? base : path.parent_path() / base;
        spec.output_dir = j.value("output_dir", std::string("sweep-out"));
        spec.jobs = j.value("jobs", 0);
        spec.run_limit = j.value("run_limit", 500);
        for (const auto& aj : j.at("axes")) {
            SweepAxis axis;
            axis.parameter = aj.at("parameter").get<std::string>();
            for (const auto& v : aj.at("values")) {
                if (v.is_null()) axis.values.push_back("inf");
                else if (v.is_string()) axis.values.push_back(v.get<std::string>());
                else axis.values.push_back(format_number(v.get<double>()));
            }
            spec.axes.push_back(std::move(axis));
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("sweep spec malformed: ") + e.what());
    }
    return spec;
}

std::string RunParams::label() const {
    std::ostringstream os;
    if (price_profile) os << "price=" << to_string(*price_profile) << ' ';
    if (direction) os << "mode=" << to_string(*direction) << ' ';
    if (constrained_zones) os << "zones=" << *constrained_zones << ' ';
    if (drop_caps) os << "eta=inf ";
    else if (eta) os << "eta=" << format_number(*eta) << ' ';
    if (fleet_size) os << "fleet=" << *fleet_size << ' ';
    if (rng_seed) os << "seed=" << *rng_seed << ' ';
    std::string s = os.str();
    if (!s.empty()) s.pop_back();
    return s;
}

namespace {

void apply_axis_value(RunParams& p, const std::string& parameter, const std::string& value) {
    if (parameter == "eta") {
        if (value == "inf" || value == "none" || value == "unconstrained") {
            p.drop_caps = true;
            p.eta.reset();
        } else {
            p.drop_caps = false;
            p.eta = std::stod(value);
        }
    } else if (parameter == "constrained_zones") {
        p.constrained_zones = value;
    } else if (parameter == "price_profile") {
        p.price_profile = price_profile_from_string(value);
    } else if (parameter == "direction_mode") {
        p.direction = direction_mode_from_string(value);
    } else if (parameter == "fleet_size") {
        p.fleet_size = static_cast<int>(std::stod(value));
    } else if (parameter == "rng_seed") {
        p.rng_seed = static_cast<std::uint64_t>(std::stoull(value));
    } else {
        throw InvalidParameterError("unknown sweep axis parameter: " + parameter);
    }
}

CapPolicy parse_zone_scope(const std::string& value, const ScenarioConfig& sc,
                           double eta) {
    CapPolicy cp;
    cp.eta = eta;
    if (value == "all") {
        cp.scope = CapPolicy::Scope::All;
    } else if (value == "none") {
        cp.scope = CapPolicy::Scope::None;
    } else {
        cp.scope = CapPolicy::Scope::Listed;
        std::string cur;
        for (char c : value + ",") {
            if (c == ',') {
                if (!cur.empty()) {
                    if (sc.zone_index(cur) < 0)
                        throw InvalidParameterError("constrained_zones: unknown zone '" +
                                                    cur + "'");
                    cp.zone_ids.push_back(cur);
                    cur.clear();
                }
            } else {
                cur.push_back(c);
            }
        }
    }
    return cp;
}

}  // namespace

ScenarioConfig resolve_run(const ScenarioConfig* base_scenario,
                           const GeneratorConfig* base_generator,
                           const RunParams& params) {
    ScenarioConfig sc;
    if (base_generator != nullptr) {
        GeneratorConfig gen = *base_generator;
        if (params.fleet_size) gen.fleet_size = *params.fleet_size;
        if (params.rng_seed) gen.rng_seed = *params.rng_seed;
        if (params.direction) gen.direction = *params.direction;
        sc = generate_scenario(gen);
    } else {
        if (params.fleet_size || params.rng_seed)
            throw InvalidParameterError(
                "fleet_size/rng_seed axes need a generator config as the sweep base");
        sc = *base_scenario;
    }

    if (params.direction) sc.direction = *params.direction;
    if (params.direction == DirectionMode::Bidirectional)
        for (auto& ev : sc.fleet)
            if (ev.max_discharge_kw == 0.0) ev.max_discharge_kw = -ev.max_charge_kw;

    if (params.price_profile) {
        const PriceSchedule* p = sc.find_profile(*params.price_profile);
        if (p == nullptr)
            throw InvalidParameterError("scenario does not carry price profile '" +
                                        to_string(*params.price_profile) + "'");
        sc.prices = *p;
    }

    if (params.drop_caps) {
        sc.cap_policy = CapPolicy{};  // scope None
        apply_cap_policy(sc);
    } else if (params.eta || params.constrained_zones) {
        double eta = params.eta ? *params.eta : sc.cap_policy.eta;
        if (params.constrained_zones) {
            sc.cap_policy = parse_zone_scope(*params.constrained_zones, sc, eta);
        } else {
            sc.cap_policy.eta = eta;
            if (sc.cap_policy.scope == CapPolicy::Scope::None)
                sc.cap_policy.scope = CapPolicy::Scope::All;
        }
        apply_cap_policy(sc);
    }
    return sc;
}

std::string run_content_id(const ScenarioConfig& resolved, const RunParams& params) {
    std::string payload = scenario_to_json(resolved) + "|" + params.label();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : payload) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SweepResult run_sweep(const SweepSpec& spec) {
    // Base document: generator config if it has a fleet_size field.
    std::ifstream probe(spec.base_scenario);
    if (!probe) throw IoError("cannot open base scenario " + spec.base_scenario.string());
    json base_json = json::parse(probe);
    std::optional<GeneratorConfig> generator;
    std::optional<ScenarioConfig> scenario;
    if (base_json.contains("fleet_size"))
        generator = load_generator_config(spec.base_scenario);
    else
        scenario = load_scenario(spec.base_scenario);

    // Cross product of axes, in axis order.
    std::vector<RunParams> runs;
    runs.emplace_back();
    for (const auto& axis : spec.axes) {
        std::vector<RunParams> next;
        for (const auto& base : runs) {
            for (const auto& value : axis.values) {
                RunParams p = base;
                apply_axis_value(p, axis.parameter, value);
                next.push_back(std::move(p));
            }
        }
        runs = std::move(next);
    }
    if (static_cast<int>(runs.size()) > spec.run_limit)
        throw InvalidParameterError("sweep would launch " + std::to_string(runs.size()) +
                                    " runs, above the limit of " +
                                    std::to_string(spec.run_limit));

    SweepResult result;
    {
        ScenarioConfig probe_sc = resolve_run(scenario ? &*scenario : nullptr,
                                              generator ? &*generator : nullptr, RunParams{});
        for (const auto& z : probe_sc.zones) result.zone_ids.push_back(z.id);
    }
    result.runs.resize(runs.size());

    std::filesystem::create_directories(spec.output_dir);

    std::atomic<std::size_t> cursor{0};
    int jobs = spec.jobs > 0 ? spec.jobs
                             : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    jobs = std::min<int>(jobs, static_cast<int>(runs.size()));

    auto worker = [&]() {
        while (true) {
            std::size_t k = cursor.fetch_add(1);
            if (k >= runs.size()) return;
            RunOutcome& out = result.runs[k];
            out.params = runs[k];
            auto started = std::chrono::steady_clock::now();
            try {
                ScenarioConfig sc = resolve_run(scenario ? &*scenario : nullptr,
                                                generator ? &*generator : nullptr, runs[k]);
                out.run_id = run_content_id(sc, runs[k]);
                std::filesystem::path run_dir = spec.output_dir / ("run-" + out.run_id);

                // Content-hashed run directories make sweeps resumable: a
                // finished run is reused rather than re-solved. Unreadable
                // leftovers fall through to a fresh solve.
                if (std::filesystem::exists(run_dir / "report.json")) {
                    try {
                        std::ifstream in(run_dir / "report.json");
                        json cached = json::parse(in);
                        RunOutcome reused;
                        reused.run_id = out.run_id;
                        reused.params = out.params;
                        reused.status = "ok";
                        reused.total_cost = cached.at("total_cost").get<double>();
                        for (const auto& zj : cached.at("zones")) {
                            reused.mu.push_back(zj.at("peak_ratio_pct").get<double>());
                            reused.xi.push_back(zj.at("energy_ratio_pct").get<double>());
                        }
                        out = std::move(reused);
                        continue;
                    } catch (const json::exception&) {
                    }
                }

                ChargeSchedule schedule = solve_scenario(sc);
                ImpactReport report = build_report(schedule, sc);
                out.status = "ok";
                out.total_cost = report.total_cost;
                out.mu = report.peak_ratio_pct;
                out.xi = report.energy_ratio_pct;

                std::filesystem::create_directories(run_dir);
                write_report_json(report, sc, run_dir / "report.json");
                write_report_zone_csv(report, sc, run_dir / "report_zones.csv");
                write_report_ev_csv(report, sc, run_dir / "report_evs.csv");
                write_schedule_csv(schedule, sc, run_dir / "schedule.csv");
            } catch (const InfeasibleError& e) {
                out.status = "infeasible";
                if (out.run_id.empty()) out.run_id = "failed";
                std::filesystem::path run_dir = spec.output_dir / ("run-" + out.run_id);
                std::filesystem::create_directories(run_dir);
                std::ofstream(run_dir / "error.txt") << e.what() << '\n';
            } catch (const std::exception& e) {
                out.status = std::string("error: ") + e.what();
                if (out.run_id.empty()) out.run_id = "failed";
            }
            out.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                    .count();
        }
    };

    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // Master CSV: one row per run, Table-style columns. The first line is a
    // timestamp comment; everything below it is deterministic.
    std::ostringstream os;
    {
        auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[64];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
        os << "# generated_at " << stamp << "Z\n";
    }
    os << "run_id,price_profile,direction_mode,constrained_zones,eta,fleet_size,rng_seed,status";
    for (const auto& z : result.zone_ids) os << ",mu_" << z;
    for (const auto& z : result.zone_ids) os << ",xi_" << z;
    os << ",total_cost\n";
    for (const auto& run : result.runs) {
        const RunParams& p = run.params;
        os << run.run_id << ','
           << (p.price_profile ? to_string(*p.price_profile) : "") << ','
           << (p.direction ? to_string(*p.direction) : "") << ','
           << (p.constrained_zones ? *p.constrained_zones : "") << ','
           << (p.drop_caps ? "inf" : (p.eta ? format_number(*p.eta) : "")) << ','
           << (p.fleet_size ? std::to_string(*p.fleet_size) : "") << ','
           << (p.rng_seed ? std::to_string(*p.rng_seed) : "") << ',' << run.status;
        for (std::size_t z = 0; z < result.zone_ids.size(); ++z)
            os << ',' << (z < run.mu.size() ? format_number(run.mu[z]) : "");
        for (std::size_t z = 0; z < result.zone_ids.size(); ++z)
            os << ',' << (z < run.xi.size() ? format_number(run.xi[z]) : "");
        os << ',' << (run.status == "ok" ? format_number(run.total_cost) : "") << '\n';
    }
    result.master_csv = spec.output_dir / "sweep_master.csv";
    std::ofstream(result.master_csv, std::ios::binary) << os.str();
    return result;
}

}  // namespace gridsched
