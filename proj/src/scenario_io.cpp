#include "gridsched/scenario_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gridsched {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

const json& require(const json& j, const char* key, const std::string& context) {
    auto it = j.find(key);
    if (it == j.end())
        throw IoError("missing field '" + std::string(key) + "' in " + context);
    return *it;
}

std::vector<double> as_vector(const json& j, const std::string& context) {
    if (!j.is_array()) throw IoError(context + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

json caps_to_json(const std::vector<double>& caps) {
    json arr = json::array();
    for (double c : caps) {
        if (std::isfinite(c)) arr.push_back(c);
        else arr.push_back(nullptr);
    }
    return arr;
}

std::vector<double> caps_from_json(const json& j) {
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(v.is_null() ? kInfiniteCap : v.get<double>());
    return out;
}

json grid_to_json(const TimeGrid& g) {
    return json{{"interval_count", g.interval_count},
                {"dt_hours", g.dt_hours},
                {"start_label", g.start_label}};
}

TimeGrid grid_from_json(const json& j) {
    TimeGrid g;
    g.interval_count = require(j, "interval_count", "grid").get<int>();
    g.dt_hours = require(j, "dt_hours", "grid").get<double>();
    g.start_label = j.value("start_label", std::string("Sun 00:00"));
    return g;
}

json cap_policy_to_json(const CapPolicy& cp) {
    json j;
    switch (cp.scope) {
        case CapPolicy::Scope::None: j["scope"] = "none"; break;
        case CapPolicy::Scope::All: j["scope"] = "all"; break;
        case CapPolicy::Scope::Listed: j["scope"] = "listed"; break;
    }
    j["eta"] = cp.eta;
    if (!cp.zone_ids.empty()) j["zone_ids"] = cp.zone_ids;
    return j;
}

CapPolicy cap_policy_from_json(const json& j) {
    CapPolicy cp;
    std::string scope = j.value("scope", std::string("none"));
    if (scope == "none") cp.scope = CapPolicy::Scope::None;
    else if (scope == "all") cp.scope = CapPolicy::Scope::All;
    else if (scope == "listed") cp.scope = CapPolicy::Scope::Listed;
    else throw IoError("cap_policy.scope must be none/all/listed, got '" + scope + "'");
    cp.eta = j.value("eta", 0.0);
    if (j.contains("zone_ids"))
        cp.zone_ids = j.at("zone_ids").get<std::vector<std::string>>();
    return cp;
}

json prices_to_json(const PriceSchedule& p) {
    return json{{"kind", to_string(p.kind)},
                {"charge_price", p.charge_price},
                {"discharge_price", p.discharge_price}};
}

PriceSchedule prices_from_json(const json& j, const std::filesystem::path& base_dir,
                               const std::vector<std::string>& zone_ids) {
    PriceSchedule p;
    p.kind = price_profile_from_string(require(j, "kind", "prices").get<std::string>());
    if (j.contains("charge_csv")) {
        p.charge_price = read_zone_csv(base_dir / j.at("charge_csv").get<std::string>(), zone_ids);
    } else {
        p.charge_price =
            require(j, "charge_price", "prices").get<std::vector<std::vector<double>>>();
    }
    if (j.contains("discharge_csv")) {
        p.discharge_price =
            read_zone_csv(base_dir / j.at("discharge_csv").get<std::string>(), zone_ids);
    } else if (j.contains("discharge_price")) {
        p.discharge_price = j.at("discharge_price").get<std::vector<std::vector<double>>>();
    } else {
        p.discharge_price = p.charge_price;  // matched prices by default
    }
    return p;
}

json ev_to_json(const EvSpec& ev) {
    return json{{"id", ev.id},
                {"battery_capacity_kwh", ev.battery_capacity_kwh},
                {"initial_energy_kwh", ev.initial_energy_kwh},
                {"target_energy_kwh", ev.target_energy_kwh},
                {"max_charge_kw", ev.max_charge_kw},
                {"max_discharge_kw", ev.max_discharge_kw},
                {"user_type", to_string(ev.user_type)}};
}

EvSpec ev_from_json(const json& j) {
    EvSpec ev;
    ev.id = require(j, "id", "fleet entry").get<std::string>();
    ev.battery_capacity_kwh = j.value("battery_capacity_kwh", 60.0);
    ev.initial_energy_kwh = j.value("initial_energy_kwh", 24.0);
    ev.target_energy_kwh = j.value("target_energy_kwh", 48.0);
    ev.max_charge_kw = j.value("max_charge_kw", 7.4);
    ev.max_discharge_kw = j.value("max_discharge_kw", -7.4);
    ev.user_type = user_type_from_string(j.value("user_type", std::string("day_worker")));
    return ev;
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::vector<double>> read_zone_csv(const std::filesystem::path& path,
                                               const std::vector<std::string>& zone_ids) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV " + path.string());

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur.push_back(c);
            }
        }
        out.push_back(cur);
        return out;
    };

    auto header = split(line);
    std::vector<int> col_of_zone(zone_ids.size(), -1);
    for (std::size_t z = 0; z < zone_ids.size(); ++z) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == zone_ids[z]) col_of_zone[z] = static_cast<int>(c);
        if (col_of_zone[z] < 0)
            throw IoError("CSV " + path.string() + " missing column for zone '" +
                          zone_ids[z] + "'");
    }

    std::vector<std::vector<double>> out(zone_ids.size());
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split(line);
        for (std::size_t z = 0; z < zone_ids.size(); ++z) {
            if (col_of_zone[z] >= static_cast<int>(cells.size()))
                throw IoError("CSV " + path.string() + ": short row");
            out[z].push_back(std::stod(cells[col_of_zone[z]]));
        }
    }
    return out;
}

std::string scenario_to_json(const ScenarioConfig& config) {
    json j;
    j["grid"] = grid_to_json(config.grid);
    j["currency"] = config.currency;
    j["direction_mode"] = to_string(config.direction);
    j["cap_policy"] = cap_policy_to_json(config.cap_policy);

    j["zones"] = json::array();
    for (const auto& z : config.zones) {
        json zj{{"id", z.id}, {"name", z.name}, {"local_demand_kw", z.local_demand_kw}};
        if (z.is_constrained()) zj["power_cap_kw"] = caps_to_json(z.power_cap_kw);
        j["zones"].push_back(std::move(zj));
    }

    j["prices"] = prices_to_json(config.prices);
    if (!config.price_library.empty()) {
        j["price_library"] = json::array();
        for (const auto& p : config.price_library)
            j["price_library"].push_back(prices_to_json(p));
    }

    j["fleet"] = json::array();
    for (const auto& ev : config.fleet) j["fleet"].push_back(ev_to_json(ev));

    json per_ev = json::array();
    for (int i = 0; i < config.presence.ev_count; ++i) {
        json zones = json::array();
        for (int z = 0; z < config.presence.zone_count; ++z) {
            json row = json::array();
            for (int t = 0; t < config.presence.interval_count; ++t)
                row.push_back(config.presence.connected(i, z, t) ? 1 : 0);
            zones.push_back(std::move(row));
        }
        json driving = json::array();
        for (int t = 0; t < config.presence.interval_count; ++t)
            driving.push_back(config.presence.driving(i, t));
        per_ev.push_back(json{{"zones", std::move(zones)}, {"driving_kwh", std::move(driving)}});
    }
    j["presence"] = json{{"per_ev", std::move(per_ev)}};

    return j.dump(1);
}

ScenarioConfig scenario_from_json(const std::string& text,
                                  const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("scenario JSON parse error: ") + e.what());
    }

    ScenarioConfig sc;
    try {
        sc.grid = grid_from_json(require(j, "grid", "scenario"));
        sc.currency = j.value("currency", std::string("AUD"));
        sc.direction =
            direction_mode_from_string(j.value("direction_mode", std::string("uni")));
        if (j.contains("cap_policy")) sc.cap_policy = cap_policy_from_json(j.at("cap_policy"));

        std::vector<std::string> zone_ids;
        for (const auto& zj : require(j, "zones", "scenario")) {
            Zone z;
            z.id = require(zj, "id", "zone").get<std::string>();
            z.name = zj.value("name", z.id);
            if (zj.contains("local_demand_kw"))
                z.local_demand_kw = as_vector(zj.at("local_demand_kw"), "local_demand_kw");
            if (zj.contains("power_cap_kw")) z.power_cap_kw = caps_from_json(zj.at("power_cap_kw"));
            zone_ids.push_back(z.id);
            sc.zones.push_back(std::move(z));
        }
        if (j.contains("demand_csv")) {
            auto matrix = read_zone_csv(base_dir / j.at("demand_csv").get<std::string>(), zone_ids);
            for (std::size_t z = 0; z < sc.zones.size(); ++z)
                sc.zones[z].local_demand_kw = matrix[z];
        }
        for (auto& z : sc.zones) {
            if (z.local_demand_kw.empty())
                throw IoError("zone '" + z.id + "' has no local_demand_kw and no demand_csv");
            if (z.power_cap_kw.empty())
                z.power_cap_kw.assign(z.local_demand_kw.size(), kInfiniteCap);
        }

        sc.prices = prices_from_json(require(j, "prices", "scenario"), base_dir, zone_ids);
        if (j.contains("price_library"))
            for (const auto& pj : j.at("price_library"))
                sc.price_library.push_back(prices_from_json(pj, base_dir, zone_ids));

        for (const auto& ej : require(j, "fleet", "scenario"))
            sc.fleet.push_back(ev_from_json(ej));

        const auto& pres = require(j, "presence", "scenario");
        const auto& per_ev = require(pres, "per_ev", "presence");
        sc.presence = PresenceSchedule::zeros(static_cast<int>(per_ev.size()),
                                              static_cast<int>(sc.zones.size()),
                                              sc.grid.interval_count);
        for (int i = 0; i < static_cast<int>(per_ev.size()); ++i) {
            const auto& zones = require(per_ev[i], "zones", "presence.per_ev");
            for (int z = 0; z < static_cast<int>(zones.size()) &&
                            z < sc.presence.zone_count; ++z) {
                const auto& row = zones[z];
                for (int t = 0;
                     t < static_cast<int>(row.size()) && t < sc.presence.interval_count; ++t)
                    sc.presence.set_connected(i, z, t, row[t].get<int>() != 0);
            }
            const auto& driving = require(per_ev[i], "driving_kwh", "presence.per_ev");
            for (int t = 0;
                 t < static_cast<int>(driving.size()) && t < sc.presence.interval_count; ++t)
                sc.presence.set_driving(i, t, driving[t].get<double>());
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("scenario JSON malformed: ") + e.what());
    }
    return sc;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(read_file(path), path.parent_path());
}

void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path) {
    write_file(path, scenario_to_json(config));
}

std::string generator_config_to_json(const GeneratorConfig& config) {
    json j;
    j["fleet_size"] = config.fleet_size;
    j["rng_seed"] = config.rng_seed;
    j["grid"] = grid_to_json(config.grid);
    j["user_type_mix"] = json{{"day_worker", config.user_type_mix[0]},
                              {"logistics", config.user_type_mix[1]},
                              {"taxi", config.user_type_mix[2]}};
    j["zones"] = json::array();
    for (const auto& z : config.zones)
        j["zones"].push_back(json{{"id", z.id},
                                  {"name", z.name},
                                  {"demand_shape", to_string(z.shape)},
                                  {"demand_peak_kw", z.demand_peak_kw}});
    j["destination_distribution"] = json{{"residential", config.destination_distribution[0]},
                                         {"work", config.destination_distribution[1]},
                                         {"other", config.destination_distribution[2]}};
    j["consumption_matrix"] = config.consumption_matrix;
    j["price_profile"] = to_string(config.price_profile);
    j["direction_mode"] = to_string(config.direction);
    j["cap_policy"] = cap_policy_to_json(config.cap_policy);
    j["currency"] = config.currency;
    json ev = ev_to_json(config.ev_defaults);
    ev.erase("id");
    j["ev_defaults"] = ev;
    return j.dump(1);
}

GeneratorConfig generator_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("generator JSON parse error: ") + e.what());
    }
    GeneratorConfig cfg;
    try {
        cfg.fleet_size = require(j, "fleet_size", "generator config").get<int>();
        cfg.rng_seed = j.value("rng_seed", std::uint64_t{1});
        if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));
        if (j.contains("user_type_mix")) {
            const auto& m = j.at("user_type_mix");
            cfg.user_type_mix = {m.value("day_worker", 0.0), m.value("logistics", 0.0),
                                 m.value("taxi", 0.0)};
        }
        cfg.zones.clear();
        for (const auto& zj : require(j, "zones", "generator config")) {
            ZoneGenSpec z;
            z.id = require(zj, "id", "generator zone").get<std::string>();
            z.name = zj.value("name", z.id);
            z.shape = demand_shape_from_string(
                zj.value("demand_shape", std::string("rural_flat")));
            z.demand_peak_kw = zj.value("demand_peak_kw", 100.0);
            cfg.zones.push_back(std::move(z));
        }
        const auto& dd = require(j, "destination_distribution", "generator config");
        cfg.destination_distribution = {
            as_vector(require(dd, "residential", "destination_distribution"), "residential"),
            as_vector(require(dd, "work", "destination_distribution"), "work"),
            as_vector(require(dd, "other", "destination_distribution"), "other")};
        cfg.consumption_matrix = require(j, "consumption_matrix", "generator config")
                                     .get<std::vector<std::vector<double>>>();
        cfg.price_profile =
            price_profile_from_string(j.value("price_profile", std::string("rt")));
        cfg.direction =
            direction_mode_from_string(j.value("direction_mode", std::string("uni")));
        if (j.contains("cap_policy")) cfg.cap_policy = cap_policy_from_json(j.at("cap_policy"));
        cfg.currency = j.value("currency", std::string("AUD"));
        if (j.contains("ev_defaults")) {
            json ev = j.at("ev_defaults");
            ev["id"] = "defaults";
            cfg.ev_defaults = ev_from_json(ev);
            cfg.ev_defaults.id.clear();
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("generator JSON malformed: ") + e.what());
    }
    return cfg;
}

GeneratorConfig load_generator_config(const std::filesystem::path& path) {
    return generator_config_from_json(read_file(path));
}

void write_schedule_csv(const ChargeSchedule& schedule, const ScenarioConfig& config,
                        const std::filesystem::path& path) {
    std::ostringstream os;
    os << "ev_id,interval,power_kw,energy_kwh\n";
    for (std::size_t i = 0; i < schedule.power_kw.size(); ++i)
        for (std::size_t t = 0; t < schedule.power_kw[i].size(); ++t)
            os << config.fleet[i].id << ',' << t << ',' << format_number(schedule.power_kw[i][t])
               << ',' << format_number(schedule.energy_kwh[i][t]) << '\n';
    write_file(path, os.str());
}

void write_report_json(const ImpactReport& report, const ScenarioConfig& config,
                       const std::filesystem::path& path) {
    json j;
    j["currency"] = report.currency;
    j["total_cost"] = report.total_cost;
    j["zones"] = json::array();
    for (std::size_t z = 0; z < config.zones.size(); ++z) {
        j["zones"].push_back(json{{"id", config.zones[z].id},
                                  {"peak_ratio_pct", report.peak_ratio_pct[z]},
                                  {"energy_ratio_pct", report.energy_ratio_pct[z]},
                                  {"original_peak_kw", report.original_peak[z].kw},
                                  {"original_peak_interval", report.original_peak[z].interval},
                                  {"new_peak_kw", report.new_peak[z].kw},
                                  {"new_peak_interval", report.new_peak[z].interval}});
    }
    j["evs"] = json::array();
    for (std::size_t i = 0; i < config.fleet.size(); ++i) {
        j["evs"].push_back(json{{"id", config.fleet[i].id},
                                {"cost", report.per_ev_cost[i]},
                                {"discharged_charged_ratio",
                                 report.discharged_charged_ratio[i]}});
    }
    if (!report.exporting_zones.empty()) j["exporting_zones"] = report.exporting_zones;
    write_file(path, j.dump(1));
}

void write_report_zone_csv(const ImpactReport& report, const ScenarioConfig& config,
                           const std::filesystem::path& path) {
    std::ostringstream os;
    os << "zone_id,peak_ratio_pct,energy_ratio_pct,original_peak_kw,"
          "original_peak_interval,new_peak_kw,new_peak_interval\n";
    for (std::size_t z = 0; z < config.zones.size(); ++z) {
        os << config.zones[z].id << ',' << format_number(report.peak_ratio_pct[z]) << ','
           << format_number(report.energy_ratio_pct[z]) << ','
           << format_number(report.original_peak[z].kw) << ',' << report.original_peak[z].interval
           << ',' << format_number(report.new_peak[z].kw) << ',' << report.new_peak[z].interval
           << '\n';
    }
    write_file(path, os.str());
}

void write_report_ev_csv(const ImpactReport& report, const ScenarioConfig& config,
                         const std::filesystem::path& path) {
    std::ostringstream os;
    os << "ev_id,user_type,cost,discharged_charged_ratio\n";
    for (std::size_t i = 0; i < config.fleet.size(); ++i) {
        os << config.fleet[i].id << ',' << to_string(config.fleet[i].user_type) << ','
           << format_number(report.per_ev_cost[i]) << ','
           << format_number(report.discharged_charged_ratio[i]) << '\n';
    }
    write_file(path, os.str());
}

void write_plot_data_csv(const ImpactReport& report, const ScenarioConfig& config,
                         int zone, const std::filesystem::path& path) {
    std::ostringstream os;
    os << "interval,local_kw,total_kw,cap_kw,is_original_peak,is_new_peak\n";
    const auto& z = config.zones[zone];
    for (int t = 0; t < config.grid.interval_count; ++t) {
        os << t << ',' << format_number(z.local_demand_kw[t]) << ','
           << format_number(report.demand_profile_kw[zone][t]) << ',';
        if (std::isfinite(z.power_cap_kw[t])) os << format_number(z.power_cap_kw[t]);
        os << ',' << (report.original_peak[zone].interval == t ? 1 : 0) << ','
           << (report.new_peak[zone].interval == t ? 1 : 0) << '\n';
    }
    write_file(path, os.str());
}

void write_figure_manifest(const ScenarioConfig& config,
                           const std::filesystem::path& out_dir) {
    json j;
    j["figures"] = json::array();
    for (const auto& z : config.zones) {
        j["figures"].push_back(json{{"id", "demand_overlay_" + z.id},
                                    {"style", "line_with_peak_markers"},
                                    {"file", "plotdata_" + z.id + ".csv"},
                                    {"x", "interval"},
                                    {"y", json::array({"local_kw", "total_kw", "cap_kw"})},
                                    {"markers", json::array({"is_original_peak", "is_new_peak"})}});
    }
    j["figures"].push_back(json{{"id", "cost_distribution"},
                                {"style", "box"},
                                {"file", "report_evs.csv"},
                                {"column", "cost"}});
    j["figures"].push_back(json{{"id", "discharged_charged_distribution"},
                                {"style", "box"},
                                {"file", "report_evs.csv"},
                                {"column", "discharged_charged_ratio"}});
    write_file(out_dir / "figures.json", j.dump(1));
}

void dump_presence_csv(const ScenarioConfig& config, const std::filesystem::path& dir) {
    std::ostringstream os;
    os << "ev_id,interval,zone_id,driving_kwh\n";
    for (int i = 0; i < config.presence.ev_count; ++i) {
        for (int t = 0; t < config.presence.interval_count; ++t) {
            int z = config.presence.connected_zone(i, t);
            os << config.fleet[i].id << ',' << t << ','
               << (z >= 0 ? config.zones[z].id : std::string()) << ','
               << format_number(config.presence.driving(i, t)) << '\n';
        }
    }
    write_file(dir / "presence.csv", os.str());
}

}  // namespace gridsched
