#include "gridsched/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gridsched {

namespace {

int categorical(SplitMix64& rng, const std::vector<double>& weights) {
    double u = rng.next_double();
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        acc += weights[k];
        if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(weights.size()) - 1;
}

// One trip away from home: travel/stay pairs, then travel back home.
struct Stop {
    int travel_len;
    int zone;
    DestinationKind kind;
    int stay_len;
};
struct Excursion {
    int depart = 0;  // absolute interval the EV leaves home
    std::vector<Stop> stops;
    int return_travel = 1;

    int total_length() const {
        int len = return_travel;
        for (const auto& s : stops) len += s.travel_len + s.stay_len;
        return len;
    }
};

// Interval index of clock `hours` on day `day`, clamped into the day.
int at_hour(const TimeGrid& grid, int day, double hours) {
    int ipd = grid.intervals_per_day();
    int off = static_cast<int>(std::lround(hours / grid.dt_hours));
    return day * ipd + std::min(off, ipd - 1);
}

int span(const TimeGrid& grid, double hours) {
    return std::max(1, static_cast<int>(std::lround(hours / grid.dt_hours)));
}

void day_worker_day(const TimeGrid& grid, int day, const LocationAssignment& loc,
                    SplitMix64& rng, std::vector<Excursion>& out) {
    int weekday = grid.weekday_of(day * grid.intervals_per_day());
    int day_end = (day + 1) * grid.intervals_per_day();

    if (weekday == 0 || weekday == 6) {
        // Weekend: home, with an optional midday errand.
        if (!rng.next_bool(0.5)) return;
        Excursion e;
        e.depart = at_hour(grid, day, 10.0) + rng.next_int(0, span(grid, 4.0) - 1);
        int travel = rng.next_int(1, span(grid, 1.5));
        int stay = rng.next_int(span(grid, 1.0), span(grid, 3.0));
        e.stops.push_back(Stop{travel, loc.other, DestinationKind::Other, stay});
        e.return_travel = rng.next_int(1, span(grid, 1.5));
        if (e.depart + e.total_length() <= day_end) out.push_back(e);
        return;
    }

    // Office day: depart 08:00-10:00, work 7-9 h, errand, commutes 0.5-1.5 h.
    int dep_lo = at_hour(grid, day, 8.0);
    int dep_hi = at_hour(grid, day, 10.0) - 1;
    for (int attempt = 0; attempt < 100; ++attempt) {
        Excursion e;
        e.depart = rng.next_int(dep_lo, dep_hi);
        int c1 = rng.next_int(1, span(grid, 1.5));
        int work = rng.next_int(span(grid, 7.0), span(grid, 9.0));
        int c2 = rng.next_int(1, span(grid, 1.5));
        int errand = rng.next_int(1, span(grid, 2.0));
        e.stops.push_back(Stop{c1, loc.work, DestinationKind::Work, work});
        e.stops.push_back(Stop{c2, loc.other, DestinationKind::Other, errand});
        e.return_travel = rng.next_int(1, span(grid, 1.5));
        if (e.depart + e.total_length() <= day_end) {
            out.push_back(e);
            return;
        }
    }
    // Tightest variant; if even this overflows the day, the grid is too short.
    Excursion e;
    e.depart = dep_lo;
    e.stops.push_back(Stop{1, loc.work, DestinationKind::Work, span(grid, 7.0)});
    e.stops.push_back(Stop{1, loc.other, DestinationKind::Other, 1});
    e.return_travel = 1;
    if (e.depart + e.total_length() > day_end)
        throw GenerationError("day-worker template does not fit a " +
                              std::to_string(grid.intervals_per_day()) +
                              "-interval day");
    out.push_back(e);
}

void logistics_day(const TimeGrid& grid, int day, const LocationAssignment& loc,
                   int zone_count, SplitMix64& rng, std::vector<Excursion>& out) {
    // Two delivery loops from 06:00, visiting every zone once in random
    // order with one-interval stops.
    int cursor = at_hour(grid, day, 6.0);
    int day_end = (day + 1) * grid.intervals_per_day();
    for (int loop = 0; loop < 2; ++loop) {
        std::vector<int> order(zone_count);
        std::iota(order.begin(), order.end(), 0);
        for (int k = zone_count - 1; k > 0; --k)
            std::swap(order[k], order[rng.next_int(0, k)]);

        Excursion e;
        e.depart = cursor;
        for (int z : order) {
            int travel = rng.next_int(1, span(grid, 1.0));
            DestinationKind kind =
                z == loc.work ? DestinationKind::Work : DestinationKind::Other;
            e.stops.push_back(Stop{travel, z, kind, 1});
        }
        e.return_travel = rng.next_int(1, span(grid, 1.0));
        if (e.depart + e.total_length() > day_end) {
            if (out.empty() && loop == 0)
                throw GenerationError("logistics template does not fit a " +
                                      std::to_string(grid.intervals_per_day()) +
                                      "-interval day");
            return;  // second loop does not fit; skip it
        }
        out.push_back(e);
        cursor = e.depart + e.total_length() + rng.next_int(1, span(grid, 2.0));
    }
}

void taxi_day(const TimeGrid& grid, int day, const LocationAssignment& loc,
              SplitMix64& rng, std::vector<Excursion>& out) {
    // On the road roughly 07:00-22:00 with 1-2 h depot breaks.
    int day_end = (day + 1) * grid.intervals_per_day();
    int last_leave = at_hour(grid, day, 21.5);

    Excursion e;
    e.depart = at_hour(grid, day, 6.5) + rng.next_int(0, span(grid, 1.0));
    int pos = e.depart;
    int travel = rng.next_int(1, span(grid, 1.0));
    bool first = true;
    while (true) {
        int block = first ? travel : rng.next_int(span(grid, 2.0), span(grid, 4.0));
        int rest = rng.next_int(span(grid, 1.0), span(grid, 2.0));
        if (pos + block + rest + 1 > last_leave) break;
        e.stops.push_back(Stop{block, loc.work, DestinationKind::Work, rest});
        pos += block + rest;
        first = false;
    }
    if (e.stops.empty())
        throw GenerationError("taxi template does not fit a " +
                              std::to_string(grid.intervals_per_day()) +
                              "-interval day");
    e.return_travel = rng.next_int(1, span(grid, 1.0));
    if (e.depart + e.total_length() <= day_end) out.push_back(e);
}

}  // namespace

GeneratorConfig GeneratorConfig::example(int fleet_size, std::uint64_t seed) {
    GeneratorConfig cfg;
    cfg.fleet_size = fleet_size;
    cfg.rng_seed = seed;
    cfg.zones = {
        {"cbd", "CBD", DemandShape::CbdDaytime, 120.0},
        {"suburb", "Suburb", DemandShape::SuburbEvening, 100.0},
        {"rural", "Rural", DemandShape::RuralFlat, 60.0},
    };
    cfg.destination_distribution = {
        {0.10, 0.80, 0.10},  // residential
        {0.70, 0.10, 0.20},  // work
        {0.30, 0.40, 0.30},  // other
    };
    cfg.consumption_matrix = {
        {1.0, 2.5, 4.0},
        {2.5, 1.0, 3.0},
        {4.0, 3.0, 1.0},
    };
    return cfg;
}

std::vector<std::string> check_generator_config(const GeneratorConfig& cfg) {
    std::vector<std::string> out;
    if (cfg.fleet_size < 1) out.push_back("fleet_size must be >= 1");
    if (cfg.grid.interval_count < 1 || !(cfg.grid.dt_hours > 0))
        out.push_back("grid must have positive interval count and dt");
    double mix = cfg.user_type_mix[0] + cfg.user_type_mix[1] + cfg.user_type_mix[2];
    if (std::abs(mix - 1.0) > 1e-9) out.push_back("user_type_mix must sum to 1");
    for (double f : cfg.user_type_mix)
        if (f < 0.0) out.push_back("user_type_mix fractions must be >= 0");
    if (cfg.zones.empty()) out.push_back("at least one zone required");

    const std::size_t Z = cfg.zones.size();
    if (cfg.destination_distribution.size() != 3) {
        out.push_back("destination_distribution needs rows residential/work/other");
    } else {
        for (std::size_t k = 0; k < 3; ++k) {
            const auto& row = cfg.destination_distribution[k];
            if (row.size() != Z) {
                out.push_back("destination_distribution row " + std::to_string(k) +
                              " length != zone count");
                continue;
            }
            double sum = 0.0;
            for (double v : row) {
                if (v < 0.0) out.push_back("destination_distribution entries must be >= 0");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                out.push_back("destination_distribution row " + std::to_string(k) +
                              " must sum to 1");
        }
    }
    if (cfg.consumption_matrix.size() != Z) {
        out.push_back("consumption_matrix must be zone x zone");
    } else {
        for (std::size_t a = 0; a < Z; ++a) {
            if (cfg.consumption_matrix[a].size() != Z) {
                out.push_back("consumption_matrix must be square");
                break;
            }
            for (std::size_t b = 0; b < Z; ++b) {
                if (cfg.consumption_matrix[a][b] < 0.0)
                    out.push_back("consumption_matrix entries must be >= 0");
                if (std::abs(cfg.consumption_matrix[a][b] - cfg.consumption_matrix[b][a]) > 1e-9) {
                    out.push_back("consumption_matrix must be symmetric");
                    a = Z;
                    break;
                }
            }
        }
    }
    return out;
}

std::vector<LocationAssignment> assign_locations(const GeneratorConfig& config) {
    auto violations = check_generator_config(config);
    if (!violations.empty())
        throw InvalidParameterError("generator config invalid: " + violations.front());

    std::vector<LocationAssignment> out(config.fleet_size);
    for (int i = 0; i < config.fleet_size; ++i) {
        auto rng = SplitMix64::substream(config.rng_seed, static_cast<std::uint64_t>(i));
        rng.next_double();  // user-type draw, consumed by the fleet pipeline
        out[i].residential = categorical(rng, config.destination_distribution[0]);
        out[i].work = categorical(rng, config.destination_distribution[1]);
        out[i].other = categorical(rng, config.destination_distribution[2]);
    }
    return out;
}

Itinerary generate_itinerary(UserType type, const LocationAssignment& locations,
                             const TimeGrid& grid, int zone_count, SplitMix64& rng) {
    const int ipd = grid.intervals_per_day();
    const int T = grid.interval_count;
    if (T < ipd)
        throw GenerationError("grid of " + std::to_string(T) +
                              " intervals does not cover one day");

    std::vector<Excursion> excursions;
    int full_days = T / ipd;
    for (int day = 0; day < full_days; ++day) {
        switch (type) {
            case UserType::DayWorker:
                day_worker_day(grid, day, locations, rng, excursions);
                break;
            case UserType::Logistics:
                logistics_day(grid, day, locations, zone_count, rng, excursions);
                break;
            case UserType::Taxi:
                taxi_day(grid, day, locations, rng, excursions);
                break;
        }
    }

    // Roll excursions into parked legs separated by travel.
    Itinerary it;
    int cursor = 0;
    for (const auto& e : excursions) {
        if (e.depart + e.total_length() > T) continue;
        if (e.depart < cursor) continue;  // overlapping plan; keep the earlier one
        if (e.depart > cursor)
            it.legs.push_back(ItineraryLeg{DestinationKind::Residential,
                                           locations.residential, cursor, e.depart});
        int pos = e.depart;
        for (const auto& s : e.stops) {
            pos += s.travel_len;
            it.legs.push_back(ItineraryLeg{s.kind, s.zone, pos, pos + s.stay_len});
            pos += s.stay_len;
        }
        cursor = pos + e.return_travel;
    }
    if (cursor < T)
        it.legs.push_back(ItineraryLeg{DestinationKind::Residential,
                                       locations.residential, cursor, T});
    return it;
}

PresenceSchedule itinerary_to_presence(const std::vector<Itinerary>& itineraries,
                                       const std::vector<std::vector<double>>& consumption,
                                       int zone_count, const TimeGrid& grid) {
    PresenceSchedule p = PresenceSchedule::zeros(static_cast<int>(itineraries.size()),
                                                 zone_count, grid.interval_count);
    for (std::size_t i = 0; i < itineraries.size(); ++i) {
        const auto& legs = itineraries[i].legs;
        for (const auto& leg : legs)
            for (int t = leg.arrive; t < leg.depart; ++t)
                p.set_connected(static_cast<int>(i), leg.zone, t, true);
        for (std::size_t k = 0; k + 1 < legs.size(); ++k) {
            double rate = consumption[legs[k].zone][legs[k + 1].zone];
            for (int t = legs[k].depart; t < legs[k + 1].arrive; ++t)
                p.set_driving(static_cast<int>(i), t, rate);
        }
    }
    return p;
}

ScenarioConfig generate_scenario(const GeneratorConfig& config) {
    auto violations = check_generator_config(config);
    if (!violations.empty()) {
        std::string msg = "generator config invalid:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw InvalidParameterError(msg);
    }

    ScenarioConfig sc;
    sc.grid = config.grid;
    sc.direction = config.direction;
    sc.cap_policy = config.cap_policy;
    sc.currency = config.currency;

    const int Z = static_cast<int>(config.zones.size());
    for (const auto& zg : config.zones) {
        Zone z;
        z.id = zg.id;
        z.name = zg.name;
        z.local_demand_kw = synthetic_demand(config.grid, zg.shape, zg.demand_peak_kw);
        z.power_cap_kw.assign(config.grid.interval_count, kInfiniteCap);
        sc.zones.push_back(std::move(z));
    }

    // Fleet: user type, locations and itinerary all drawn from the EV's
    // substream, in that order.
    std::vector<double> mix(config.user_type_mix.begin(), config.user_type_mix.end());
    std::vector<Itinerary> itineraries;
    for (int i = 0; i < config.fleet_size; ++i) {
        auto rng = SplitMix64::substream(config.rng_seed, static_cast<std::uint64_t>(i));
        UserType type = static_cast<UserType>(categorical(rng, mix));
        LocationAssignment loc;
        loc.residential = categorical(rng, config.destination_distribution[0]);
        loc.work = categorical(rng, config.destination_distribution[1]);
        loc.other = categorical(rng, config.destination_distribution[2]);

        EvSpec ev = config.ev_defaults;
        ev.id = "ev" + std::to_string(i);
        ev.user_type = type;
        if (config.direction == DirectionMode::UniDirectional) ev.max_discharge_kw = 0.0;
        sc.fleet.push_back(ev);

        Itinerary it = generate_itinerary(type, loc, config.grid, Z, rng);
        it.ev_index = i;
        itineraries.push_back(std::move(it));
    }
    sc.presence = itinerary_to_presence(itineraries, config.consumption_matrix, Z, config.grid);

    // Price profiles: RT anchors ND's range; all three are kept for sweeps.
    PriceSchedule rt = real_time_prices(config.grid, Z);
    std::vector<double> total_demand(config.grid.interval_count, 0.0);
    for (const auto& z : sc.zones)
        for (int t = 0; t < config.grid.interval_count; ++t)
            total_demand[t] += z.local_demand_kw[t];
    PriceSchedule nd = normalized_demand_price(total_demand, rt, Z);
    PriceSchedule re = retail_tou_prices(config.grid, Z);
    sc.price_library = {rt, nd, re};
    for (const auto& p : sc.price_library)
        if (p.kind == config.price_profile) sc.prices = p;

    apply_cap_policy(sc);
    return sc;
}

}  // namespace gridsched
