#pragma once

// Scenario sweep harness: cross-product of parameter axes over a base
// scenario (or generator config), independent runs executed on a small
// thread pool, one master CSV plus per-run artifact directories keyed by a
// content hash of the resolved configuration.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridsched/generator.hpp"
#include "gridsched/types.hpp"

namespace gridsched {

struct SweepAxis {
    std::string parameter;  // eta | constrained_zones | price_profile |
                            // direction_mode | fleet_size | rng_seed
    std::vector<std::string> values;  // textual; "inf" on the eta axis = no caps
};

struct SweepSpec {
    std::filesystem::path base_scenario;
    std::vector<SweepAxis> axes;
    std::filesystem::path output_dir;
    int jobs = 0;          // 0 = hardware concurrency
    int run_limit = 500;

    static SweepSpec load(const std::filesystem::path& path);
};

struct RunParams {
    std::optional<double> eta;                       // nullopt = leave base policy
    bool drop_caps = false;                          // eta axis value "inf"
    std::optional<std::string> constrained_zones;    // "all" | "none" | id list
    std::optional<PriceProfileKind> price_profile;
    std::optional<DirectionMode> direction;
    std::optional<int> fleet_size;
    std::optional<std::uint64_t> rng_seed;

    std::string label() const;
};

struct RunOutcome {
    std::string run_id;
    RunParams params;
    std::string status;  // ok | infeasible | error:<what>
    double total_cost = 0.0;
    std::vector<double> mu;
    std::vector<double> xi;
    double seconds = 0.0;
};

struct SweepResult {
    std::vector<RunOutcome> runs;
    std::vector<std::string> zone_ids;
    std::filesystem::path master_csv;
};

/// Applies run parameters to a copy of the base scenario (re-generating from
/// the generator config when fleet_size or rng_seed change).
ScenarioConfig resolve_run(const ScenarioConfig* base_scenario,
                           const GeneratorConfig* base_generator,
                           const RunParams& params);

/// FNV-1a content hash of the resolved scenario plus parameters; stable
/// across runs, used as the run directory name.
std::string run_content_id(const ScenarioConfig& resolved, const RunParams& params);

SweepResult run_sweep(const SweepSpec& spec);

}  // namespace gridsched
