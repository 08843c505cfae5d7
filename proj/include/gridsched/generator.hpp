#pragma once

// Fleet and itinerary synthesis. Every EV draws from its own RNG substream,
// so generated schedules are reproducible and stable under fleet growth.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gridsched/profiles.hpp"
#include "gridsched/rng.hpp"
#include "gridsched/types.hpp"

namespace gridsched {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DestinationKind { Residential = 0, Work = 1, Other = 2 };

struct ZoneGenSpec {
    std::string id;
    std::string name;
    DemandShape shape = DemandShape::RuralFlat;
    double demand_peak_kw = 100.0;
};

struct GeneratorConfig {
    TimeGrid grid;
    int fleet_size = 10;
    /// Fractions per {DayWorker, Logistics, Taxi}; must sum to 1.
    std::array<double, 3> user_type_mix = {0.7, 0.2, 0.1};
    std::vector<ZoneGenSpec> zones;
    /// Rows: residential, work, other. Columns: zones. Rows sum to 1.
    std::vector<std::vector<double>> destination_distribution;
    /// kWh consumed per travel interval between (and within) zones; symmetric.
    std::vector<std::vector<double>> consumption_matrix;
    std::uint64_t rng_seed = 1;
    PriceProfileKind price_profile = PriceProfileKind::RealTime;
    DirectionMode direction = DirectionMode::UniDirectional;
    CapPolicy cap_policy;
    EvSpec ev_defaults;
    std::string currency = "AUD";

    /// Default three-zone setup mirroring the experiment layout.
    static GeneratorConfig example(int fleet_size, std::uint64_t seed);
};

/// Structural and stochastic-parameter checks; returns violations.
std::vector<std::string> check_generator_config(const GeneratorConfig& config);

struct LocationAssignment {
    int residential = 0;
    int work = 0;
    int other = 0;

    int zone_of(DestinationKind kind) const {
        switch (kind) {
            case DestinationKind::Residential: return residential;
            case DestinationKind::Work: return work;
            case DestinationKind::Other: return other;
        }
        return residential;
    }
};

/// Per-EV destination zones drawn from the destination distribution.
/// Deterministic in (config.rng_seed, ev index).
std::vector<LocationAssignment> assign_locations(const GeneratorConfig& config);

struct ItineraryLeg {
    DestinationKind kind = DestinationKind::Residential;
    int zone = 0;
    int arrive = 0;  // parked during [arrive, depart)
    int depart = 0;
};

struct Itinerary {
    int ev_index = 0;
    std::vector<ItineraryLeg> legs;
};

/// One EV's weekly plan following its user-type template. Throws
/// GenerationError when the grid cannot fit the template.
Itinerary generate_itinerary(UserType type, const LocationAssignment& locations,
                             const TimeGrid& grid, int zone_count, SplitMix64& rng);

/// Presence matrix and driving consumption implied by the itineraries:
/// parked legs connect the EV in the leg's zone; every interval between legs
/// consumes the zone-pair rate.
PresenceSchedule itinerary_to_presence(const std::vector<Itinerary>& itineraries,
                                       const std::vector<std::vector<double>>& consumption,
                                       int zone_count, const TimeGrid& grid);

/// Full pipeline: demand profiles, all three price profiles, fleet,
/// itineraries, presence, caps.
ScenarioConfig generate_scenario(const GeneratorConfig& config);

}  // namespace gridsched
