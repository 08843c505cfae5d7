#pragma once

// File formats: scenario and generator configs as JSON (demand/price
// matrices optionally referenced as CSV), schedule/report/plot-data CSV
// emission. All writers are deterministic byte-for-byte for identical
// inputs; generated-at timestamps only ever appear in the sweep master CSV
// header, marked as such.

#include <filesystem>
#include <string>
#include <vector>

#include "gridsched/generator.hpp"
#include "gridsched/metrics.hpp"
#include "gridsched/schedule.hpp"
#include "gridsched/types.hpp"

namespace gridsched {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- scenario documents ----------------------------------------------------

ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path);

std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const std::string& text,
                                  const std::filesystem::path& base_dir = {});

// --- generator documents ---------------------------------------------------

GeneratorConfig load_generator_config(const std::filesystem::path& path);
std::string generator_config_to_json(const GeneratorConfig& config);
GeneratorConfig generator_config_from_json(const std::string& text);

// --- CSV data ---------------------------------------------------------------

/// Zone-column CSV: header row of zone ids, one row per interval.
std::vector<std::vector<double>> read_zone_csv(const std::filesystem::path& path,
                                               const std::vector<std::string>& zone_ids);

void write_schedule_csv(const ChargeSchedule& schedule, const ScenarioConfig& config,
                        const std::filesystem::path& path);

void write_report_json(const ImpactReport& report, const ScenarioConfig& config,
                       const std::filesystem::path& path);
void write_report_zone_csv(const ImpactReport& report, const ScenarioConfig& config,
                           const std::filesystem::path& path);
void write_report_ev_csv(const ImpactReport& report, const ScenarioConfig& config,
                         const std::filesystem::path& path);

/// Per-zone overlay data: interval, local_kw, total_kw, cap_kw,
/// is_original_peak, is_new_peak.
void write_plot_data_csv(const ImpactReport& report, const ScenarioConfig& config,
                         int zone, const std::filesystem::path& path);

/// Names which emitted file reproduces which figure style.
void write_figure_manifest(const ScenarioConfig& config,
                           const std::filesystem::path& out_dir);

/// Presence/driving dump, one row per (ev, interval).
void dump_presence_csv(const ScenarioConfig& config, const std::filesystem::path& dir);

/// Shared float formatting for CSV output.
std::string format_number(double v);

}  // namespace gridsched
