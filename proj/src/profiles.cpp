#include "gridsched/profiles.hpp"

#include <algorithm>
#include <cmath>

namespace gridsched {

namespace {

double bump(double hour, double center, double width) {
    double d = hour - center;
    return std::exp(-0.5 * d * d / (width * width));
}

bool is_weekend(int weekday) { return weekday == 0 || weekday == 6; }

double demand_fraction(DemandShape shape, double hour, int weekday) {
    switch (shape) {
        case DemandShape::CbdDaytime:
            if (is_weekend(weekday))
                return 0.34 + 0.28 * bump(hour, 13.0, 4.0);
            return 0.34 + 0.66 * bump(hour, 13.0, 3.2);
        case DemandShape::SuburbEvening: {
            double base = 0.34 + 0.18 * bump(hour, 7.5, 1.6) +
                          0.66 * bump(hour, 18.5, 2.2);
            if (is_weekend(weekday)) base += 0.12 * bump(hour, 13.0, 3.0);
            return base;
        }
        case DemandShape::RuralFlat:
            return 0.68 + 0.32 * bump(hour, 19.0, 3.0);
    }
    return 1.0;
}

}  // namespace

DemandShape demand_shape_from_string(const std::string& s) {
    if (s == "cbd_daytime") return DemandShape::CbdDaytime;
    if (s == "suburb_evening") return DemandShape::SuburbEvening;
    if (s == "rural_flat") return DemandShape::RuralFlat;
    throw InvalidParameterError("unknown demand shape: " + s);
}

std::string to_string(DemandShape s) {
    switch (s) {
        case DemandShape::CbdDaytime: return "cbd_daytime";
        case DemandShape::SuburbEvening: return "suburb_evening";
        case DemandShape::RuralFlat: return "rural_flat";
    }
    return "rural_flat";
}

std::vector<double> synthetic_demand(const TimeGrid& grid, DemandShape shape,
                                     double peak_kw) {
    std::vector<double> out(grid.interval_count);
    double raw_max = 0.0;
    for (int t = 0; t < grid.interval_count; ++t) {
        out[t] = demand_fraction(shape, grid.hour_of(t), grid.weekday_of(t));
        raw_max = std::max(raw_max, out[t]);
    }
    for (double& v : out) v *= peak_kw / raw_max;
    return out;
}

PriceSchedule real_time_prices(const TimeGrid& grid, int zone_count) {
    // Wholesale curve in currency/kWh; the midday dip is the global minimum.
    std::vector<double> wholesale(grid.interval_count);
    for (int t = 0; t < grid.interval_count; ++t) {
        double h = grid.hour_of(t);
        int wd = grid.weekday_of(t);
        double evening = is_weekend(wd) ? 0.22 : 0.28;
        double v = 0.09 + 0.15 * bump(h, 8.0, 1.3) + evening * bump(h, 18.5, 1.8) -
                   0.07 * bump(h, 12.5, 2.0);
        wholesale[t] = std::max(v, 0.02);
    }

    // Network adder per zone, cycled past three zones.
    const double adders[] = {0.10, 0.08, 0.12};
    PriceSchedule p;
    p.kind = PriceProfileKind::RealTime;
    p.charge_price.assign(zone_count, {});
    for (int z = 0; z < zone_count; ++z) {
        p.charge_price[z].resize(grid.interval_count);
        for (int t = 0; t < grid.interval_count; ++t)
            p.charge_price[z][t] = wholesale[t] + adders[z % 3];
    }
    p.discharge_price = p.charge_price;
    return p;
}

PriceSchedule retail_tou_prices(const TimeGrid& grid, int zone_count) {
    // Blocks: off-peak 22:00-07:00, peak 15:00-21:00, shoulder otherwise.
    struct Level {
        double off, shoulder, peak;
    };
    const Level levels[] = {{0.26, 0.32, 0.42}, {0.22, 0.30, 0.40}, {0.24, 0.28, 0.36}};

    PriceSchedule p;
    p.kind = PriceProfileKind::RetailToU;
    p.charge_price.assign(zone_count, {});
    for (int z = 0; z < zone_count; ++z) {
        const Level& lv = levels[z % 3];
        p.charge_price[z].resize(grid.interval_count);
        for (int t = 0; t < grid.interval_count; ++t) {
            double h = grid.hour_of(t);
            double v;
            if (h >= 22.0 || h < 7.0) v = lv.off;
            else if (h >= 15.0 && h < 21.0) v = lv.peak;
            else v = lv.shoulder;
            p.charge_price[z][t] = v;
        }
    }
    p.discharge_price = p.charge_price;
    return p;
}

PriceSchedule normalized_demand_price(const std::vector<double>& total_demand,
                                      const PriceSchedule& ref_prices,
                                      int zone_count) {
    auto [lo_it, hi_it] = std::minmax_element(total_demand.begin(), total_demand.end());
    double l_min = *lo_it, l_max = *hi_it;
    if (!(l_max - l_min > 1e-9))
        throw InvalidParameterError(
            "normalized demand price: demand range is degenerate (constant profile)");

    double p_min = ref_prices.min_charge_price();
    double p_max = ref_prices.max_charge_price();

    PriceSchedule p;
    p.kind = PriceProfileKind::NormalizedDemand;
    std::vector<double> row(total_demand.size());
    for (std::size_t t = 0; t < total_demand.size(); ++t)
        row[t] = p_min + (total_demand[t] - l_min) * (p_max - p_min) / (l_max - l_min);
    p.charge_price.assign(zone_count, row);
    p.discharge_price = p.charge_price;
    return p;
}

}  // namespace gridsched
