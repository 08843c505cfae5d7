#pragma once

// Core domain types for zone-constrained EV charge scheduling.
// Units throughout: power in kW, energy in kWh, prices in currency/kWh,
// energy = power * dt_hours.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridsched {

inline constexpr double kInfiniteCap = std::numeric_limits<double>::infinity();

struct InvalidParameterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PriceProfileKind { RealTime, NormalizedDemand, RetailToU };
enum class UserType { DayWorker, Logistics, Taxi };
enum class DirectionMode { UniDirectional, Bidirectional };

std::string to_string(PriceProfileKind k);
std::string to_string(UserType u);
std::string to_string(DirectionMode m);
PriceProfileKind price_profile_from_string(const std::string& s);
UserType user_type_from_string(const std::string& s);
DirectionMode direction_mode_from_string(const std::string& s);

/// Uniform time discretization. The default is one week of half-hour
/// intervals starting on Sunday at midnight.
struct TimeGrid {
    int interval_count = 336;
    double dt_hours = 0.5;
    std::string start_label = "Sun 00:00";

    int intervals_per_day() const {
        return static_cast<int>(std::lround(24.0 / dt_hours));
    }
    int day_count() const {
        int per_day = intervals_per_day();
        return (interval_count + per_day - 1) / per_day;
    }
    /// Weekday of interval t, 0 = Sunday.
    int weekday_of(int t) const;
    /// Hour-of-day at the start of interval t, in [0, 24).
    double hour_of(int t) const;
    /// Weekday index encoded in start_label (0 = Sunday).
    int start_weekday() const;
};

struct Zone {
    std::string id;
    std::string name;
    std::vector<double> local_demand_kw;          // l(z,t)
    std::vector<double> power_cap_kw;             // c+(z,t); kInfiniteCap = no cap

    double peak_demand_kw() const;
    bool is_constrained() const;                  // any finite cap entry
};

/// Charge/discharge prices per (zone, interval). The discharge price must
/// never exceed the charge price: the scheduling model splits signed power
/// into nonnegative parts, and that split prices exactly only under this
/// ordering.
struct PriceSchedule {
    PriceProfileKind kind = PriceProfileKind::RealTime;
    std::vector<std::vector<double>> charge_price;     // [zone][t], lambda(z,t)
    std::vector<std::vector<double>> discharge_price;  // [zone][t], eta(z,t)

    double min_charge_price() const;
    double max_charge_price() const;
};

struct EvSpec {
    std::string id;
    double battery_capacity_kwh = 60.0;
    double initial_energy_kwh = 24.0;
    double target_energy_kwh = 48.0;
    double max_charge_kw = 7.4;
    double max_discharge_kw = -7.4;   // nonpositive; 0 disables discharge
    UserType user_type = UserType::DayWorker;
};

/// Connection matrix b(i,z,t) and per-interval driving consumption d(i,t).
/// Stored flat; an EV is connected in at most one zone per interval and
/// never consumes driving energy while connected.
struct PresenceSchedule {
    int ev_count = 0;
    int zone_count = 0;
    int interval_count = 0;
    std::vector<std::uint8_t> presence;           // [ev][zone][t]
    std::vector<double> driving_consumption_kwh;  // [ev][t]

    static PresenceSchedule zeros(int evs, int zones, int intervals);

    bool connected(int ev, int zone, int t) const {
        return presence[(static_cast<std::size_t>(ev) * zone_count + zone) * interval_count + t] != 0;
    }
    void set_connected(int ev, int zone, int t, bool on) {
        presence[(static_cast<std::size_t>(ev) * zone_count + zone) * interval_count + t] = on ? 1 : 0;
    }
    /// Zone the EV is connected in at t, or -1 if disconnected. If the
    /// schedule is malformed (connected in several zones) the lowest zone
    /// index is returned; validate() reports such schedules.
    int connected_zone(int ev, int t) const;
    int zones_connected(int ev, int t) const;

    double driving(int ev, int t) const {
        return driving_consumption_kwh[static_cast<std::size_t>(ev) * interval_count + t];
    }
    void set_driving(int ev, int t, double kwh) {
        driving_consumption_kwh[static_cast<std::size_t>(ev) * interval_count + t] = kwh;
    }
};

/// Zone power-cap construction policy: c+(z,t) = (1+eta) * max_t l(z,t) for
/// constrained zones, infinite elsewhere.
struct CapPolicy {
    enum class Scope { None, All, Listed };
    Scope scope = Scope::None;
    double eta = 0.0;
    std::vector<std::string> zone_ids;  // used when scope == Listed

    bool applies_to(const std::string& zone_id) const;
};

struct ScenarioConfig {
    TimeGrid grid;
    std::vector<Zone> zones;
    PriceSchedule prices;
    std::vector<EvSpec> fleet;
    PresenceSchedule presence;
    DirectionMode direction = DirectionMode::UniDirectional;
    CapPolicy cap_policy;
    std::string currency = "AUD";

    /// Alternate price schedules generated alongside `prices` so sweeps can
    /// switch profiles without regenerating the scenario.
    std::vector<PriceSchedule> price_library;

    int zone_index(const std::string& id) const;  // -1 if unknown
    const PriceSchedule* find_profile(PriceProfileKind kind) const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
};

/// Checks every structural invariant of a scenario. Report-style: never
/// throws, never mutates. An empty violation list means the scheduling model
/// can be built without failure.
ValidationReport validate(const ScenarioConfig& config);

/// Applies the (1+eta)-of-peak cap to the listed zones and clears caps on the
/// rest. Idempotent for a fixed (eta, which).
void materialize_caps(std::vector<Zone>& zones, double eta,
                      const std::vector<std::string>& which);

/// Materializes config.cap_policy onto config.zones.
void apply_cap_policy(ScenarioConfig& config);

}  // namespace gridsched
