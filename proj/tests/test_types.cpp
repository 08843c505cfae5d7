#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gridsched/generator.hpp"
#include "gridsched/types.hpp"

using namespace gridsched;

namespace {

ScenarioConfig small_valid_scenario() {
    ScenarioConfig sc;
    sc.grid = TimeGrid{4, 0.5, "Mon 00:00"};
    for (std::string id : {"a", "b", "c"}) {
        Zone z;
        z.id = id;
        z.name = id;
        z.local_demand_kw = {10.0, 20.0, 15.0, 12.0};
        z.power_cap_kw.assign(4, kInfiniteCap);
        sc.zones.push_back(z);
    }
    sc.prices.charge_price.assign(3, {1.0, 1.0, 1.0, 1.0});
    sc.prices.discharge_price = sc.prices.charge_price;

    EvSpec ev;
    ev.id = "ev0";
    sc.fleet.push_back(ev);
    sc.presence = PresenceSchedule::zeros(1, 3, 4);
    for (int t = 0; t < 4; ++t) sc.presence.set_connected(0, 0, t, true);
    return sc;
}

}  // namespace

TEST_CASE("validate: well-formed scenario passes") {
    auto sc = small_valid_scenario();
    auto report = validate(sc);
    CHECK(report.ok());
}

TEST_CASE("validate: EV in two zones at once is a violation") {
    auto sc = small_valid_scenario();
    sc.presence.set_connected(0, 1, 2, true);  // also zone b at t=2
    auto report = validate(sc);
    REQUIRE(!report.ok());
    bool found = false;
    for (const auto& v : report.violations)
        if (v.find("two zones at once") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("validate: target above capacity is a violation") {
    auto sc = small_valid_scenario();
    sc.fleet[0].target_energy_kwh = sc.fleet[0].battery_capacity_kwh + 5.0;
    auto report = validate(sc);
    REQUIRE(!report.ok());
    bool found = false;
    for (const auto& v : report.violations)
        if (v.find("target exceeds capacity") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("validate: driving while connected is a violation") {
    auto sc = small_valid_scenario();
    sc.presence.set_driving(0, 1, 2.0);
    auto report = validate(sc);
    CHECK(!report.ok());
}

TEST_CASE("validate: discharge price above charge price is a violation") {
    auto sc = small_valid_scenario();
    sc.prices.discharge_price[1][2] = 2.0;
    auto report = validate(sc);
    CHECK(!report.ok());
}

TEST_CASE("validate: cap below demand warns but does not fail") {
    auto sc = small_valid_scenario();
    sc.zones[0].power_cap_kw.assign(4, 5.0);  // below the 20 kW peak
    auto report = validate(sc);
    CHECK(report.ok());
    CHECK(!report.warnings.empty());
}

TEST_CASE("materialize_caps: scales the peak by 1+eta") {
    std::vector<Zone> zones(1);
    zones[0].id = "z";
    zones[0].local_demand_kw = {60.0, 100.0, 80.0};
    materialize_caps(zones, 0.10, {"z"});
    for (double c : zones[0].power_cap_kw) CHECK(c == doctest::Approx(110.0));

    materialize_caps(zones, 0.0, {"z"});
    for (double c : zones[0].power_cap_kw) CHECK(c == doctest::Approx(100.0));
}

TEST_CASE("materialize_caps: direct arithmetic on a 30 percent bump") {
    std::vector<Zone> zones(1);
    zones[0].id = "z";
    zones[0].local_demand_kw = {50.0, 80.0, 100.0};
    materialize_caps(zones, 0.30, {"z"});
    for (double c : zones[0].power_cap_kw) CHECK(c == doctest::Approx(130.0));
}

TEST_CASE("materialize_caps: unlisted zones become unconstrained") {
    std::vector<Zone> zones(2);
    zones[0].id = "a";
    zones[0].local_demand_kw = {10.0, 20.0};
    zones[1].id = "b";
    zones[1].local_demand_kw = {30.0, 40.0};
    materialize_caps(zones, 0.5, {"a"});
    CHECK(zones[0].power_cap_kw[0] == doctest::Approx(30.0));
    CHECK(!zones[1].is_constrained());
}

TEST_CASE("materialize_caps: idempotent for fixed parameters") {
    std::vector<Zone> zones(1);
    zones[0].id = "z";
    zones[0].local_demand_kw = {50.0, 80.0, 100.0};
    materialize_caps(zones, 0.3, {"z"});
    auto first = zones[0].power_cap_kw;
    materialize_caps(zones, 0.3, {"z"});
    CHECK(zones[0].power_cap_kw == first);
}

TEST_CASE("materialize_caps: rejects eta below -1") {
    std::vector<Zone> zones(1);
    zones[0].id = "z";
    zones[0].local_demand_kw = {1.0};
    CHECK_THROWS_AS(materialize_caps(zones, -1.5, {"z"}), InvalidParameterError);
}

TEST_CASE("time grid: weekday and hour bookkeeping") {
    TimeGrid g{336, 0.5, "Sun 00:00"};
    CHECK(g.intervals_per_day() == 48);
    CHECK(g.day_count() == 7);
    CHECK(g.weekday_of(0) == 0);    // Sunday
    CHECK(g.weekday_of(48) == 1);   // Monday
    CHECK(g.weekday_of(335) == 6);  // Saturday
    CHECK(g.hour_of(16) == doctest::Approx(8.0));
    CHECK(g.hour_of(48) == doctest::Approx(0.0));

    TimeGrid mon{48, 0.5, "Mon 00:00"};
    CHECK(mon.weekday_of(0) == 1);
}
