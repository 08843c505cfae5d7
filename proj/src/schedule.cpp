#include "gridsched/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace gridsched {

BuildResult build_model(const ScenarioConfig& config) {
    const int I = static_cast<int>(config.fleet.size());
    const int T = config.grid.interval_count;
    const int Z = static_cast<int>(config.zones.size());
    const double dt = config.grid.dt_hours;

    for (int z = 0; z < Z; ++z) {
        for (int t = 0; t < T; ++t) {
            if (config.prices.discharge_price[z][t] >
                config.prices.charge_price[z][t] + 1e-12) {
                throw NonconvexPriceError(
                    "discharge price exceeds charge price in zone " +
                    config.zones[z].id + " at t=" + std::to_string(t) +
                    "; the split-variable model would mis-price this");
            }
        }
    }

    BuildResult out;
    out.map = VariableMap(I, T);
    LinearProgram& lp = out.lp;

    // Variables: p+ block, p- block, e block.
    for (int i = 0; i < I; ++i) {
        const auto& ev = config.fleet[i];
        for (int t = 0; t < T; ++t) {
            int z = config.presence.connected_zone(i, t);
            bool connected = z >= 0;
            double cost = connected ? config.prices.charge_price[z][t] * dt : 0.0;
            lp.add_variable(0.0, connected ? ev.max_charge_kw : 0.0, cost,
                            "pc[" + ev.id + "][t" + std::to_string(t) + "]");
        }
    }
    for (int i = 0; i < I; ++i) {
        const auto& ev = config.fleet[i];
        double discharge_limit =
            config.direction == DirectionMode::Bidirectional ? -ev.max_discharge_kw : 0.0;
        for (int t = 0; t < T; ++t) {
            int z = config.presence.connected_zone(i, t);
            bool connected = z >= 0;
            double cost = connected ? -config.prices.discharge_price[z][t] * dt : 0.0;
            lp.add_variable(0.0, connected ? discharge_limit : 0.0, cost,
                            "pd[" + ev.id + "][t" + std::to_string(t) + "]");
        }
    }
    for (int i = 0; i < I; ++i) {
        const auto& ev = config.fleet[i];
        for (int t = 0; t < T; ++t) {
            lp.add_variable(0.0, ev.battery_capacity_kwh, 0.0,
                            "e[" + ev.id + "][t" + std::to_string(t) + "]");
        }
    }

    // Battery recurrence: e(i,t) - e(i,t-1) - dt*p+(i,t) + dt*p-(i,t) = -d(i,t),
    // with e(i,-1) folded into the rhs as the initial energy.
    for (int i = 0; i < I; ++i) {
        const auto& ev = config.fleet[i];
        for (int t = 0; t < T; ++t) {
            double rhs = -config.presence.driving(i, t);
            if (t == 0) rhs += ev.initial_energy_kwh;
            int r = lp.add_row(RowSense::Equal, rhs,
                               "soc[" + ev.id + "][t" + std::to_string(t) + "]");
            lp.add_entry(r, out.map.energy(i, t), 1.0);
            if (t > 0) lp.add_entry(r, out.map.energy(i, t - 1), -1.0);
            lp.add_entry(r, out.map.charge(i, t), -dt);
            lp.add_entry(r, out.map.discharge(i, t), dt);
        }
    }

    // Zone power caps, finite entries only.
    for (int z = 0; z < Z; ++z) {
        const auto& zone = config.zones[z];
        for (int t = 0; t < T; ++t) {
            if (!std::isfinite(zone.power_cap_kw[t])) continue;
            double headroom = zone.power_cap_kw[t] - zone.local_demand_kw[t];
            int r = lp.add_row(RowSense::LessEqual, headroom,
                               "cap[" + zone.id + "][t" + std::to_string(t) + "]");
            for (int i = 0; i < I; ++i) {
                if (!config.presence.connected(i, z, t)) continue;
                lp.add_entry(r, out.map.charge(i, t), 1.0);
                lp.add_entry(r, out.map.discharge(i, t), -1.0);
            }
        }
    }

    // Target energy per EV over the whole horizon.
    for (int i = 0; i < I; ++i) {
        const auto& ev = config.fleet[i];
        double total_driving = 0.0;
        for (int t = 0; t < T; ++t) total_driving += config.presence.driving(i, t);
        double rhs = ev.target_energy_kwh - ev.initial_energy_kwh + total_driving;
        int r = lp.add_row(RowSense::GreaterEqual, rhs, "target[" + ev.id + "]");
        for (int t = 0; t < T; ++t) {
            lp.add_entry(r, out.map.charge(i, t), dt);
            lp.add_entry(r, out.map.discharge(i, t), -dt);
        }
    }

    // Crash basis: the energy columns cover the recurrence rows as triangular
    // chains; every inequality row keeps its slack.
    const int n = lp.num_variables();
    int soc_rows = I * T;
    for (int i = 0; i < I; ++i)
        for (int t = 0; t < T; ++t)
            out.crash_basis.basic_variables.push_back(out.map.energy(i, t));
    for (int r = soc_rows; r < lp.num_rows(); ++r)
        out.crash_basis.basic_variables.push_back(n + r);

    return out;
}

ChargeSchedule extract_schedule(const LpSolution& solution, const VariableMap& map,
                                const ScenarioConfig& config) {
    if (solution.status != LpStatus::Optimal)
        throw ExtractionError("cannot extract schedule from a " +
                                  to_string(solution.status) + " solution",
                              solution.status);

    const int I = map.ev_count();
    const int T = map.interval_count();
    const double dt = config.grid.dt_hours;
    constexpr double kTiny = 1e-9;

    ChargeSchedule s;
    s.power_kw.assign(I, std::vector<double>(T, 0.0));
    s.charge_kw.assign(I, std::vector<double>(T, 0.0));
    s.discharge_kw.assign(I, std::vector<double>(T, 0.0));
    s.energy_kwh.assign(I, std::vector<double>(T, 0.0));
    s.per_ev_cost.assign(I, 0.0);
    s.lp_iterations = solution.iterations;

    int strict_gap_overlaps = 0;
    for (int i = 0; i < I; ++i) {
        double energy = config.fleet[i].initial_energy_kwh;
        for (int t = 0; t < T; ++t) {
            double pc = std::max(0.0, solution.x[map.charge(i, t)]);
            double pd = std::max(0.0, solution.x[map.discharge(i, t)]);
            double overlap = std::min(pc, pd);
            if (overlap > kTiny) {
                int z = config.presence.connected_zone(i, t);
                if (z >= 0 && config.prices.discharge_price[z][t] <
                                  config.prices.charge_price[z][t] - 1e-9)
                    ++strict_gap_overlaps;
                pc -= overlap;
                pd -= overlap;
            }
            if (pc < kTiny) pc = 0.0;
            if (pd < kTiny) pd = 0.0;
            s.charge_kw[i][t] = pc;
            s.discharge_kw[i][t] = pd;
            s.power_kw[i][t] = pc - pd;

            energy += s.power_kw[i][t] * dt - config.presence.driving(i, t);
            s.energy_kwh[i][t] = energy;

            int z = config.presence.connected_zone(i, t);
            if (z >= 0) {
                s.per_ev_cost[i] += (config.prices.charge_price[z][t] * pc -
                                     config.prices.discharge_price[z][t] * pd) *
                                    dt;
            }
        }
        s.total_cost += s.per_ev_cost[i];
    }

    if (strict_gap_overlaps > 0)
        std::cerr << "gridsched: " << strict_gap_overlaps
                  << " simultaneous charge/discharge overlap(s) at strictly "
                     "separated prices; cancelled in the extracted schedule\n";
    double drift = std::abs(s.total_cost - solution.objective_value);
    if (drift > 1e-6 * std::max(1.0, std::abs(solution.objective_value)))
        std::cerr << "gridsched: extracted cost drifts from LP objective by "
                  << drift << "\n";
    return s;
}

ChargeSchedule solve_scenario(const ScenarioConfig& config, const SimplexOptions& options) {
    auto report = validate(config);
    if (!report.ok()) {
        std::string msg = "scenario failed validation:";
        for (const auto& v : report.violations) msg += "\n  " + v;
        throw InvalidParameterError(msg);
    }

    BuildResult built = build_model(config);
    LpSolution solution = warm_start_solve(built.lp, built.crash_basis, options);

    if (solution.status == LpStatus::Infeasible) {
        std::vector<std::string> binding;
        for (const auto& [row, viol] : solution.infeasible_rows) {
            std::ostringstream os;
            os << built.lp.row_name(row) << " violated by " << viol;
            binding.push_back(os.str());
        }
        for (const auto& [var, viol] : solution.infeasible_bounds) {
            std::ostringstream os;
            os << "bound of " << built.lp.variable_name(var) << " violated by " << viol;
            binding.push_back(os.str());
        }

        // Violated >= rows want more charging; name the tight cap rows and
        // saturated charger bounds obstructing their columns.
        const double tol = options.tol_feas;
        std::vector<double> activity(built.lp.num_rows(), 0.0);
        std::vector<std::vector<int>> cap_rows_of_col(built.lp.num_variables());
        for (int r = 0; r < built.lp.num_rows(); ++r) {
            for (const auto& e : built.lp.rows[r].entries) {
                activity[r] += e.value * solution.x[e.column];
                if (built.lp.rows[r].sense == RowSense::LessEqual && e.value > 0.0)
                    cap_rows_of_col[e.column].push_back(r);
            }
        }
        std::vector<std::string> blockers;
        for (const auto& [row, viol] : solution.infeasible_rows) {
            if (built.lp.rows[row].sense != RowSense::GreaterEqual) continue;
            int saturated_bounds = 0;
            for (const auto& e : built.lp.rows[row].entries) {
                if (e.value <= 0.0) continue;  // more charge helps; skip discharge
                int col = e.column;
                if (solution.x[col] >= built.lp.upper[col] - tol) {
                    ++saturated_bounds;
                    continue;
                }
                for (int r : cap_rows_of_col[col]) {
                    double scale = std::max(1.0, std::abs(built.lp.rows[r].rhs));
                    if (activity[r] < built.lp.rows[r].rhs - tol * scale) continue;
                    std::string name = built.lp.row_name(r) + " (tight)";
                    if (std::find(blockers.begin(), blockers.end(), name) == blockers.end())
                        blockers.push_back(name);
                }
            }
            if (saturated_bounds > 0)
                blockers.push_back(built.lp.row_name(row) + ": charger bound saturated at " +
                                   std::to_string(saturated_bounds) + " interval(s)");
        }
        binding.insert(binding.end(), blockers.begin(), blockers.end());

        std::string msg = "scheduling model infeasible";
        for (const auto& b : binding) msg += "; " + b;
        throw InfeasibleError(msg, std::move(binding));
    }
    if (solution.status == LpStatus::Unbounded)
        throw SolverFailureError(
            "scheduling model unbounded; prices admit infinite arbitrage",
            solution.iterations);

    return extract_schedule(solution, built.map, config);
}

std::vector<std::string> verify_schedule(const ChargeSchedule& schedule,
                                         const ScenarioConfig& config, double tol) {
    std::vector<std::string> out;
    const int I = static_cast<int>(config.fleet.size());
    const int T = config.grid.interval_count;
    const int Z = static_cast<int>(config.zones.size());
    const double dt = config.grid.dt_hours;

    auto complain = [&out](const std::string& msg) {
        if (out.size() < 200) out.push_back(msg);
    };

    for (int i = 0; i < I; ++i) {
        const auto& ev = config.fleet[i];
        double lower = config.direction == DirectionMode::Bidirectional
                           ? ev.max_discharge_kw
                           : 0.0;
        double energy = ev.initial_energy_kwh;
        for (int t = 0; t < T; ++t) {
            double p = schedule.power_kw[i][t];
            bool connected = config.presence.connected_zone(i, t) >= 0;
            if (!connected && std::abs(p) > tol)
                complain("EV " + ev.id + " t=" + std::to_string(t) +
                         ": nonzero power while disconnected");
            if (connected && (p < lower - tol || p > ev.max_charge_kw + tol))
                complain("EV " + ev.id + " t=" + std::to_string(t) +
                         ": power outside charger limits");

            energy += p * dt - config.presence.driving(i, t);
            if (std::abs(energy - schedule.energy_kwh[i][t]) > tol)
                complain("EV " + ev.id + " t=" + std::to_string(t) +
                         ": battery recurrence violated");
            if (energy < -tol || energy > ev.battery_capacity_kwh + tol)
                complain("EV " + ev.id + " t=" + std::to_string(t) +
                         ": stored energy outside [0, capacity]");
        }
        if (energy < ev.target_energy_kwh - tol)
            complain("EV " + ev.id + ": final energy " + std::to_string(energy) +
                     " below target " + std::to_string(ev.target_energy_kwh));
    }

    for (int z = 0; z < Z; ++z) {
        const auto& zone = config.zones[z];
        for (int t = 0; t < T; ++t) {
            if (!std::isfinite(zone.power_cap_kw[t])) continue;
            double net = zone.local_demand_kw[t];
            for (int i = 0; i < I; ++i)
                if (config.presence.connected(i, z, t)) net += schedule.power_kw[i][t];
            double scale = std::max(1.0, std::abs(zone.power_cap_kw[t]));
            if (net > zone.power_cap_kw[t] + tol * scale)
                complain("zone " + zone.id + " t=" + std::to_string(t) +
                         ": cap exceeded (" + std::to_string(net) + " > " +
                         std::to_string(zone.power_cap_kw[t]) + ")");
        }
    }
    return out;
}

}  // namespace gridsched
