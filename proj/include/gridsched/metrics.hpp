#pragma once

// The four impact metrics: per-zone peak ratio and energy ratio, total and
// per-EV cost, per-EV discharged/charged ratio, plus the combined demand
// profile they are derived from.

#include <stdexcept>
#include <string>
#include <vector>

#include "gridsched/schedule.hpp"
#include "gridsched/types.hpp"

namespace gridsched {

struct UndefinedMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZonePeak {
    double kw = 0.0;
    int interval = -1;
};

struct ImpactReport {
    std::vector<std::vector<double>> demand_profile_kw;  // m(z,t)
    std::vector<double> peak_ratio_pct;                  // mu_z
    std::vector<double> energy_ratio_pct;                // xi_z
    double total_cost = 0.0;
    std::vector<double> per_ev_cost;                     // kappa_i
    std::vector<double> discharged_charged_ratio;        // nu_i
    std::vector<ZonePeak> original_peak;                 // from l(z,.)
    std::vector<ZonePeak> new_peak;                      // from m(z,.)
    /// Zones whose net load goes negative somewhere (aggregate EV export).
    std::vector<std::string> exporting_zones;
    std::string currency = "AUD";
};

/// m(z,t) = local demand + net EV power connected in the zone.
std::vector<std::vector<double>> demand_profile(const ChargeSchedule& schedule,
                                                const ScenarioConfig& config);

/// mu_z = 100 * max_t m(z,t) / max_t l(z,t). Throws UndefinedMetricError when
/// a zone's original peak is zero.
std::vector<double> peak_ratio(const std::vector<std::vector<double>>& demand,
                               const ScenarioConfig& config);

/// xi_z = 100 * net EV energy in zone z / overall net EV energy. Signed net
/// accounting: exporting zones come out negative, and shares can exceed 100.
std::vector<double> energy_ratio(const ChargeSchedule& schedule,
                                 const ScenarioConfig& config);

/// nu_i = discharged / charged energy, from the post-cancellation split;
/// 0 by convention for EVs that never charge.
std::vector<double> discharged_charged_ratio(const ChargeSchedule& schedule);

ImpactReport build_report(const ChargeSchedule& schedule, const ScenarioConfig& config);

}  // namespace gridsched
