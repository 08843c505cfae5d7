#pragma once

// Scheduling model: scenario -> LP -> per-EV charge schedule. Signed power
// is split into nonnegative charge/discharge parts so the piecewise price is
// exactly linear whenever discharge price <= charge price; scenarios
// violating that ordering are rejected.

#include <string>
#include <vector>

#include "gridsched/lp.hpp"
#include "gridsched/simplex.hpp"
#include "gridsched/types.hpp"

namespace gridsched {

struct NonconvexPriceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
    InfeasibleError(const std::string& what, std::vector<std::string> rows)
        : std::runtime_error(what), binding(std::move(rows)) {}
    std::vector<std::string> binding;
};

struct ExtractionError : std::runtime_error {
    ExtractionError(const std::string& what, LpStatus s)
        : std::runtime_error(what), status(s) {}
    LpStatus status;
};

/// Bijection between (ev, interval) pairs and LP column indices.
class VariableMap {
public:
    VariableMap() = default;
    VariableMap(int ev_count, int interval_count)
        : evs_(ev_count), intervals_(interval_count) {}

    int charge(int ev, int t) const { return ev * intervals_ + t; }
    int discharge(int ev, int t) const { return evs_ * intervals_ + ev * intervals_ + t; }
    int energy(int ev, int t) const { return 2 * evs_ * intervals_ + ev * intervals_ + t; }
    int num_variables() const { return 3 * evs_ * intervals_; }
    int ev_count() const { return evs_; }
    int interval_count() const { return intervals_; }

private:
    int evs_ = 0;
    int intervals_ = 0;
};

struct ChargeSchedule {
    std::vector<std::vector<double>> power_kw;      // p*(i,t) = charge - discharge
    std::vector<std::vector<double>> charge_kw;     // p+(i,t), post-cancellation
    std::vector<std::vector<double>> discharge_kw;  // p-(i,t) magnitude, post-cancellation
    std::vector<std::vector<double>> energy_kwh;    // e(i,t), end of interval t
    std::vector<double> per_ev_cost;                // kappa_i
    double total_cost = 0.0;
    long lp_iterations = 0;
};

struct BuildResult {
    LinearProgram lp;
    VariableMap map;
    /// Triangular starting basis: energy chains plus inequality slacks.
    BasisHint crash_basis;
};

/// Builds the scheduling LP for a validated scenario.
BuildResult build_model(const ScenarioConfig& config);

/// Maps an Optimal LP solution back to a charge schedule. Overlapping
/// charge/discharge mass at one (ev, interval) is cancelled; at matched
/// prices this changes neither net power nor cost.
ChargeSchedule extract_schedule(const LpSolution& solution, const VariableMap& map,
                                const ScenarioConfig& config);

/// validate -> build -> solve -> extract. Throws InvalidParameterError on a
/// config that fails validation, InfeasibleError with the binding rows on an
/// infeasible model, SolverFailureError on numerical breakdown.
ChargeSchedule solve_scenario(const ScenarioConfig& config,
                              const SimplexOptions& options = {});

/// Re-evaluates every model constraint from the schedule and config alone
/// (no LP involved): power bounds, disconnection zeros, battery recurrence,
/// capacity box, zone caps, target energy. Returns human-readable
/// violations; empty means the schedule satisfies the formulation.
std::vector<std::string> verify_schedule(const ChargeSchedule& schedule,
                                         const ScenarioConfig& config,
                                         double tol = 1e-6);

}  // namespace gridsched
