#include "gridsched/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace gridsched {

std::vector<std::vector<double>> demand_profile(const ChargeSchedule& schedule,
                                                const ScenarioConfig& config) {
    const int Z = static_cast<int>(config.zones.size());
    const int T = config.grid.interval_count;
    const int I = static_cast<int>(config.fleet.size());

    std::vector<std::vector<double>> m(Z);
    for (int z = 0; z < Z; ++z) m[z] = config.zones[z].local_demand_kw;
    for (int i = 0; i < I; ++i) {
        for (int t = 0; t < T; ++t) {
            int z = config.presence.connected_zone(i, t);
            if (z >= 0) m[z][t] += schedule.power_kw[i][t];
        }
    }
    return m;
}

std::vector<double> peak_ratio(const std::vector<std::vector<double>>& demand,
                               const ScenarioConfig& config) {
    std::vector<double> mu(config.zones.size());
    for (std::size_t z = 0; z < config.zones.size(); ++z) {
        double original = config.zones[z].peak_demand_kw();
        if (original <= 0.0)
            throw UndefinedMetricError("peak ratio undefined: zone " +
                                       config.zones[z].id + " has zero original peak");
        double with_evs = *std::max_element(demand[z].begin(), demand[z].end());
        mu[z] = 100.0 * with_evs / original;
    }
    return mu;
}

std::vector<double> energy_ratio(const ChargeSchedule& schedule,
                                 const ScenarioConfig& config) {
    const int Z = static_cast<int>(config.zones.size());
    const int T = config.grid.interval_count;
    const int I = static_cast<int>(config.fleet.size());
    const double dt = config.grid.dt_hours;

    std::vector<double> net(Z, 0.0);
    double total = 0.0;
    for (int i = 0; i < I; ++i) {
        for (int t = 0; t < T; ++t) {
            int z = config.presence.connected_zone(i, t);
            if (z < 0) continue;
            double e = schedule.power_kw[i][t] * dt;
            net[z] += e;
            total += e;
        }
    }
    if (std::abs(total) < 1e-9)
        throw UndefinedMetricError("energy ratio undefined: overall net EV energy is zero");
    std::vector<double> xi(Z);
    for (int z = 0; z < Z; ++z) xi[z] = 100.0 * net[z] / total;
    return xi;
}

std::vector<double> discharged_charged_ratio(const ChargeSchedule& schedule) {
    std::vector<double> nu(schedule.charge_kw.size(), 0.0);
    for (std::size_t i = 0; i < schedule.charge_kw.size(); ++i) {
        double charged = 0.0, discharged = 0.0;
        for (std::size_t t = 0; t < schedule.charge_kw[i].size(); ++t) {
            charged += schedule.charge_kw[i][t];
            discharged += schedule.discharge_kw[i][t];
        }
        nu[i] = charged > 1e-12 ? discharged / charged : 0.0;
    }
    return nu;
}

ImpactReport build_report(const ChargeSchedule& schedule, const ScenarioConfig& config) {
    ImpactReport report;
    report.currency = config.currency;
    report.demand_profile_kw = demand_profile(schedule, config);
    report.peak_ratio_pct = peak_ratio(report.demand_profile_kw, config);
    report.energy_ratio_pct = energy_ratio(schedule, config);
    report.per_ev_cost = schedule.per_ev_cost;
    report.total_cost = schedule.total_cost;
    report.discharged_charged_ratio = discharged_charged_ratio(schedule);

    for (std::size_t z = 0; z < config.zones.size(); ++z) {
        const auto& l = config.zones[z].local_demand_kw;
        const auto& m = report.demand_profile_kw[z];
        ZonePeak orig, fresh;
        for (int t = 0; t < config.grid.interval_count; ++t) {
            if (orig.interval < 0 || l[t] > orig.kw) orig = ZonePeak{l[t], t};
            if (fresh.interval < 0 || m[t] > fresh.kw) fresh = ZonePeak{m[t], t};
        }
        report.original_peak.push_back(orig);
        report.new_peak.push_back(fresh);
        if (std::any_of(m.begin(), m.end(), [](double v) { return v < 0.0; }))
            report.exporting_zones.push_back(config.zones[z].id);
    }
    return report;
}

}  // namespace gridsched
