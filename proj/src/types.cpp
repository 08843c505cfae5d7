#include "gridsched/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace gridsched {

namespace {

const std::array<std::string, 7> kWeekdays = {"Sun", "Mon", "Tue", "Wed",
                                              "Thu", "Fri", "Sat"};

}  // namespace

std::string to_string(PriceProfileKind k) {
    switch (k) {
        case PriceProfileKind::RealTime: return "rt";
        case PriceProfileKind::NormalizedDemand: return "nd";
        case PriceProfileKind::RetailToU: return "re";
    }
    return "rt";
}

std::string to_string(UserType u) {
    switch (u) {
        case UserType::DayWorker: return "day_worker";
        case UserType::Logistics: return "logistics";
        case UserType::Taxi: return "taxi";
    }
    return "day_worker";
}

std::string to_string(DirectionMode m) {
    return m == DirectionMode::UniDirectional ? "uni" : "v2g";
}

PriceProfileKind price_profile_from_string(const std::string& s) {
    if (s == "rt" || s == "real_time") return PriceProfileKind::RealTime;
    if (s == "nd" || s == "normalized_demand") return PriceProfileKind::NormalizedDemand;
    if (s == "re" || s == "retail_tou") return PriceProfileKind::RetailToU;
    throw InvalidParameterError("unknown price profile: " + s);
}

UserType user_type_from_string(const std::string& s) {
    if (s == "day_worker") return UserType::DayWorker;
    if (s == "logistics") return UserType::Logistics;
    if (s == "taxi") return UserType::Taxi;
    throw InvalidParameterError("unknown user type: " + s);
}

DirectionMode direction_mode_from_string(const std::string& s) {
    if (s == "uni" || s == "uni_directional") return DirectionMode::UniDirectional;
    if (s == "v2g" || s == "bidirectional") return DirectionMode::Bidirectional;
    throw InvalidParameterError("unknown direction mode: " + s);
}

int TimeGrid::start_weekday() const {
    for (int d = 0; d < 7; ++d) {
        if (start_label.rfind(kWeekdays[d], 0) == 0) return d;
    }
    return 0;
}

int TimeGrid::weekday_of(int t) const {
    int day = t / intervals_per_day();
    return (start_weekday() + day) % 7;
}

double TimeGrid::hour_of(int t) const {
    int within_day = t % intervals_per_day();
    return within_day * dt_hours;
}

double Zone::peak_demand_kw() const {
    double peak = 0.0;
    for (double v : local_demand_kw) peak = std::max(peak, v);
    return peak;
}

bool Zone::is_constrained() const {
    return std::any_of(power_cap_kw.begin(), power_cap_kw.end(),
                       [](double c) { return std::isfinite(c); });
}

double PriceSchedule::min_charge_price() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& row : charge_price)
        for (double v : row) m = std::min(m, v);
    return m;
}

double PriceSchedule::max_charge_price() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& row : charge_price)
        for (double v : row) m = std::max(m, v);
    return m;
}

PresenceSchedule PresenceSchedule::zeros(int evs, int zones, int intervals) {
    PresenceSchedule p;
    p.ev_count = evs;
    p.zone_count = zones;
    p.interval_count = intervals;
    p.presence.assign(static_cast<std::size_t>(evs) * zones * intervals, 0);
    p.driving_consumption_kwh.assign(static_cast<std::size_t>(evs) * intervals, 0.0);
    return p;
}

int PresenceSchedule::connected_zone(int ev, int t) const {
    for (int z = 0; z < zone_count; ++z) {
        if (connected(ev, z, t)) return z;
    }
    return -1;
}

int PresenceSchedule::zones_connected(int ev, int t) const {
    int n = 0;
    for (int z = 0; z < zone_count; ++z) n += connected(ev, z, t) ? 1 : 0;
    return n;
}

bool CapPolicy::applies_to(const std::string& zone_id) const {
    switch (scope) {
        case Scope::None: return false;
        case Scope::All: return true;
        case Scope::Listed:
            return std::find(zone_ids.begin(), zone_ids.end(), zone_id) != zone_ids.end();
    }
    return false;
}

int ScenarioConfig::zone_index(const std::string& id) const {
    for (std::size_t z = 0; z < zones.size(); ++z) {
        if (zones[z].id == id) return static_cast<int>(z);
    }
    return -1;
}

const PriceSchedule* ScenarioConfig::find_profile(PriceProfileKind kind) const {
    if (prices.kind == kind) return &prices;
    for (const auto& p : price_library) {
        if (p.kind == kind) return &p;
    }
    return nullptr;
}

namespace {

void check_matrix_shape(ValidationReport& report, const std::string& what,
                        const std::vector<std::vector<double>>& m,
                        std::size_t zones, std::size_t intervals) {
    if (m.size() != zones) {
        report.violations.push_back(what + ": expected " + std::to_string(zones) +
                                    " zone rows, got " + std::to_string(m.size()));
        return;
    }
    for (std::size_t z = 0; z < m.size(); ++z) {
        if (m[z].size() != intervals) {
            report.violations.push_back(what + "[" + std::to_string(z) + "]: expected " +
                                        std::to_string(intervals) + " entries, got " +
                                        std::to_string(m[z].size()));
        }
    }
}

}  // namespace

ValidationReport validate(const ScenarioConfig& config) {
    ValidationReport report;
    const auto& grid = config.grid;
    const std::size_t T = static_cast<std::size_t>(grid.interval_count);

    if (grid.interval_count < 1)
        report.violations.push_back("grid: interval_count must be >= 1");
    if (!(grid.dt_hours > 0.0))
        report.violations.push_back("grid: dt_hours must be > 0");
    if (config.zones.empty())
        report.violations.push_back("zones: at least one zone required");

    for (const auto& zone : config.zones) {
        if (zone.local_demand_kw.size() != T)
            report.violations.push_back("zone " + zone.id + ": local_demand length " +
                                        std::to_string(zone.local_demand_kw.size()) +
                                        " != interval_count " + std::to_string(T));
        if (zone.power_cap_kw.size() != T)
            report.violations.push_back("zone " + zone.id + ": power_cap length " +
                                        std::to_string(zone.power_cap_kw.size()) +
                                        " != interval_count " + std::to_string(T));
        for (std::size_t t = 0; t < zone.local_demand_kw.size(); ++t) {
            double l = zone.local_demand_kw[t];
            if (!(l >= 0.0) || !std::isfinite(l)) {
                report.violations.push_back("zone " + zone.id + ": local_demand[" +
                                            std::to_string(t) + "] must be finite and >= 0");
                break;
            }
        }
        std::size_t n = std::min(zone.local_demand_kw.size(), zone.power_cap_kw.size());
        for (std::size_t t = 0; t < n; ++t) {
            if (zone.power_cap_kw[t] < zone.local_demand_kw[t]) {
                report.warnings.push_back("zone " + zone.id + ": power_cap[" +
                                          std::to_string(t) +
                                          "] below local demand; scenario may be infeasible");
                break;
            }
        }
    }

    check_matrix_shape(report, "prices.charge_price", config.prices.charge_price,
                       config.zones.size(), T);
    check_matrix_shape(report, "prices.discharge_price", config.prices.discharge_price,
                       config.zones.size(), T);
    if (config.prices.charge_price.size() == config.prices.discharge_price.size()) {
        for (std::size_t z = 0; z < config.prices.charge_price.size(); ++z) {
            const auto& ch = config.prices.charge_price[z];
            const auto& di = config.prices.discharge_price[z];
            if (ch.size() != di.size()) continue;
            for (std::size_t t = 0; t < ch.size(); ++t) {
                if (!std::isfinite(ch[t]) || !std::isfinite(di[t])) {
                    report.violations.push_back("prices: non-finite entry at zone " +
                                                std::to_string(z) + ", t " + std::to_string(t));
                    break;
                }
                if (di[t] > ch[t] + 1e-12) {
                    report.violations.push_back(
                        "prices: discharge price exceeds charge price at zone " +
                        std::to_string(z) + ", t " + std::to_string(t));
                    break;
                }
            }
        }
    }

    for (const auto& ev : config.fleet) {
        if (ev.battery_capacity_kwh <= 0.0)
            report.violations.push_back("ev " + ev.id + ": battery capacity must be > 0");
        if (ev.initial_energy_kwh < 0.0 || ev.initial_energy_kwh > ev.battery_capacity_kwh)
            report.violations.push_back("ev " + ev.id + ": initial energy outside [0, capacity]");
        if (ev.target_energy_kwh < 0.0 || ev.target_energy_kwh > ev.battery_capacity_kwh)
            report.violations.push_back("ev " + ev.id + ": target exceeds capacity");
        if (!(ev.max_charge_kw > 0.0))
            report.violations.push_back("ev " + ev.id + ": max_charge_kw must be > 0");
        if (ev.max_discharge_kw > 0.0)
            report.violations.push_back("ev " + ev.id + ": max_discharge_kw must be <= 0");
    }

    const auto& pres = config.presence;
    if (pres.ev_count != static_cast<int>(config.fleet.size()) ||
        pres.zone_count != static_cast<int>(config.zones.size()) ||
        pres.interval_count != grid.interval_count) {
        report.violations.push_back(
            "presence: dimensions (" + std::to_string(pres.ev_count) + " evs, " +
            std::to_string(pres.zone_count) + " zones, " +
            std::to_string(pres.interval_count) + " intervals) do not match scenario");
    } else {
        for (int i = 0; i < pres.ev_count; ++i) {
            for (int t = 0; t < pres.interval_count; ++t) {
                int zc = pres.zones_connected(i, t);
                if (zc > 1) {
                    report.violations.push_back("EV " + config.fleet[i].id +
                                                " in two zones at once (t=" +
                                                std::to_string(t) + ")");
                    break;
                }
                double d = pres.driving(i, t);
                if (d < 0.0) {
                    report.violations.push_back("EV " + config.fleet[i].id +
                                                ": negative driving consumption at t=" +
                                                std::to_string(t));
                    break;
                }
                if (d > 0.0 && zc == 1) {
                    report.violations.push_back("EV " + config.fleet[i].id +
                                                ": drives while connected at t=" +
                                                std::to_string(t));
                    break;
                }
            }
        }
    }

    if (config.cap_policy.eta < -1.0)
        report.violations.push_back("cap_policy: eta must be >= -1");
    if (config.cap_policy.scope == CapPolicy::Scope::Listed) {
        for (const auto& id : config.cap_policy.zone_ids) {
            if (config.zone_index(id) < 0)
                report.violations.push_back("cap_policy: unknown zone id '" + id + "'");
        }
    }

    return report;
}

void materialize_caps(std::vector<Zone>& zones, double eta,
                      const std::vector<std::string>& which) {
    if (eta < -1.0)
        throw InvalidParameterError("materialize_caps: eta must be >= -1, got " +
                                    std::to_string(eta));
    for (auto& zone : zones) {
        bool constrained =
            std::find(which.begin(), which.end(), zone.id) != which.end();
        if (constrained) {
            double cap = (1.0 + eta) * zone.peak_demand_kw();
            zone.power_cap_kw.assign(zone.local_demand_kw.size(), cap);
        } else {
            zone.power_cap_kw.assign(zone.local_demand_kw.size(), kInfiniteCap);
        }
    }
}

void apply_cap_policy(ScenarioConfig& config) {
    std::vector<std::string> which;
    switch (config.cap_policy.scope) {
        case CapPolicy::Scope::None:
            break;
        case CapPolicy::Scope::All:
            for (const auto& z : config.zones) which.push_back(z.id);
            break;
        case CapPolicy::Scope::Listed:
            which = config.cap_policy.zone_ids;
            break;
    }
    materialize_caps(config.zones, config.cap_policy.eta, which);
}

}  // namespace gridsched
