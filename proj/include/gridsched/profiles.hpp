#pragma once

// Bundled synthetic weekly profiles: zone demand shapes (CBD daytime peak,
// suburb evening peak, rural flat) and the three price profiles. The demand
// and retail numbers are artifact defaults with the right qualitative shape,
// not measured data.

#include <string>
#include <vector>

#include "gridsched/types.hpp"

namespace gridsched {

enum class DemandShape { CbdDaytime, SuburbEvening, RuralFlat };

DemandShape demand_shape_from_string(const std::string& s);
std::string to_string(DemandShape s);

/// Weekly demand profile rescaled so its maximum equals peak_kw.
std::vector<double> synthetic_demand(const TimeGrid& grid, DemandShape shape,
                                     double peak_kw);

/// Real-time profile: one wholesale curve (overnight trough, morning and
/// evening peaks, midday solar dip as the global minimum) plus a per-zone
/// network adder.
PriceSchedule real_time_prices(const TimeGrid& grid, int zone_count);

/// Retail time-of-use blocks, different levels per zone.
PriceSchedule retail_tou_prices(const TimeGrid& grid, int zone_count);

/// Affine rescaling of total demand into the anchor price range:
/// lambda(t) = min + (L(t)-Lmin)*(max-min)/(Lmax-Lmin), equal across zones,
/// discharge price matching. Throws InvalidParameterError when the demand
/// range is degenerate.
PriceSchedule normalized_demand_price(const std::vector<double>& total_demand,
                                      const PriceSchedule& ref_prices,
                                      int zone_count);

}  // namespace gridsched
