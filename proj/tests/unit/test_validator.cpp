#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "tdppt/models/full.hpp"
#include "tdppt/validator.hpp"

using namespace tdppt;

namespace {

bool has_code(const std::vector<Violation>& v, const std::string& code) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == code; });
}

// Hand-built optimal MICRO-1 plan.
Plan micro_plan(const Instance& in) {
    Plan p;
    p.instance_id = in.id;
    p.method = "manual";
    p.itineraries = {Itinerary{"c1", "d1", "A", 0, "p1", "B", 158, "k1", 0}};
    p.truck_routes = {TruckRoute{"d1", {TruckVisit{"A", 0}}}};
    p.freighter_routes = {FreighterRoute{"k1", 0, {FreighterVisit{"c1", 0}}}};
    assign_earliest_times(in, p);
    return p;
}

}  // namespace

TEST_CASE("a correct plan passes") {
    Instance in = fixtures::micro1();
    Plan p = micro_plan(in);
    CHECK(validate_plan(in, p).empty());
    CHECK(p.itineraries[0].delivery_time == doctest::Approx(200));
    CHECK(p.truck_routes[0].visits[0].time == doctest::Approx(2 + 10));

    auto backend = milp::make_backend("cbc");
    Compatibility cp(in);
    auto full = models::build_full(in, cp);
    Plan solved = models::decode_full(in, full, milp::solve(full.model, *backend, {}));
    CHECK(validate_plan(in, solved).empty());
}

TEST_CASE("costs recomputed from routes") {
    Instance in = fixtures::micro1();
    Plan p = micro_plan(in);
    CostBreakdown c = recompute_costs(in, p);
    CHECK(c.t1_cost == doctest::Approx(20));
    CHECK(c.t3_cost == doctest::Approx(std::sqrt(8.0)));
    CHECK(c.total == doctest::Approx(22.83).epsilon(1e-3));

    Plan idle;
    idle.instance_id = in.id;
    CHECK(recompute_costs(in, idle) == CostBreakdown{});

    in.cost_params.freighter_cost_scale = 1.0;
    CHECK(recompute_costs(in, p).t3_cost == doctest::Approx(2 * c.t3_cost));
    CHECK(recompute_costs(in, p).t1_cost == doctest::Approx(c.t1_cost));

    p.service = ServiceCosts{3, 2};
    CHECK(recompute_costs(in, p).service_cost == doctest::Approx(5));
}

TEST_CASE("truck overload") {
    Instance in = fixtures::micro1();
    in.customers.clear();
    in.trips[0].capacity = 400;
    in.freighters[0].capacity = 400;
    Plan p;
    p.instance_id = in.id;
    p.truck_routes = {TruckRoute{"d1", {TruckVisit{"A", 0}}}};
    p.freighter_routes = {FreighterRoute{"k1", 0, {}}};
    for (int k = 0; k < 17; ++k) {
        std::string id = fmt::format("c{}", k);
        in.customers.push_back(Customer{id, {52, 2.0 + k}, 10, 200, 800, 0, {"B"}});
        p.itineraries.push_back(Itinerary{id, "d1", "A", 0, "p1", "B", 158, "k1", 0});
        p.freighter_routes[0].visits.push_back(FreighterVisit{id, 0});
    }
    assign_earliest_times(in, p);
    auto v = validate_plan(in, p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == "TRUCK_CAPACITY");
    CHECK(v[0].measured == doctest::Approx(170));
    CHECK(v[0].bound == doctest::Approx(160));
    auto doc = nlohmann::json::parse(violations_to_json(v));
    CHECK(doc.at("violations").at(0).at("code") == "TRUCK_CAPACITY");
    CHECK(doc.at("valid") == false);
}

TEST_CASE("single-rule breaches") {
    Instance in = fixtures::micro1();
    Plan p = micro_plan(in);

    SUBCASE("same drop-in and drop-out") {
        p.itineraries[0].drop_out_stop = "A";
        CHECK(has_code(validate_plan(in, p), "STOP_DISTINCT"));
    }
    SUBCASE("missing itinerary") {
        p.itineraries.clear();
        CHECK(has_code(validate_plan(in, p), "COVERAGE"));
    }
    SUBCASE("late delivery") {
        p.freighter_routes[0].visits[0].time = 801;
        p.itineraries[0].delivery_time = 801;
        CHECK(has_code(validate_plan(in, p), "WINDOW"));
    }
    SUBCASE("trip time mismatch") {
        p.itineraries[0].drop_out_time = 188;
        CHECK(has_code(validate_plan(in, p), "TIMETABLE"));
    }
    SUBCASE("truck after the trip") {
        p.truck_routes[0].visits[0].time = 151;
        p.itineraries[0].drop_in_time = 151;
        CHECK(has_code(validate_plan(in, p), "ORDER"));
    }
    SUBCASE("package waits too long at the drop-in") {
        p.truck_routes[0].visits[0].time = 2;
        p.itineraries[0].trip = "p2";
        p.itineraries[0].drop_out_time = 188;
        in.stops[0].max_dwell = 100;
        CHECK(has_code(validate_plan(in, p), "DWELL_IN"));
    }
    SUBCASE("freighter leaves too late") {
        in.stops[1].max_dwell = 5;
        CHECK(has_code(validate_plan(in, p), "DWELL_OUT"));
    }
    SUBCASE("overstated total") {
        p.cost.total += 1;
        CHECK(has_code(validate_plan(in, p), "COST"));
    }
    SUBCASE("unknown truck") {
        p.itineraries[0].truck = "zz";
        CHECK_THROWS_AS(validate_plan(in, p), InstanceError);
    }
}

TEST_CASE("baseline plans") {
    Instance in = fixtures::micro1();
    VrptwPlan v;
    v.instance_id = in.id;
    v.routes = {VrptwRoute{"d1", {VrptwVisit{"c1", 0}}}};
    assign_earliest_times(in, v);
    CHECK(v.total_cost == doctest::Approx(104.0769).epsilon(1e-5));
    CHECK(validate_vrptw_plan(in, v).empty());
    v.routes[0].visits[0].time = 100;
    CHECK(has_code(validate_vrptw_plan(in, v), "WINDOW"));
    v.routes.clear();
    CHECK(has_code(validate_vrptw_plan(in, v), "COVERAGE"));
}

TEST_CASE("exhaustive oracle") {
    Instance in = fixtures::micro1();
    BruteForceResult r = brute_force_optimum(in);
    REQUIRE(r.feasible);
    CHECK(r.cost == doctest::Approx(20 + std::sqrt(8.0)));
    CHECK(validate_plan(in, r.plan).empty());
    CHECK(r.itineraries_checked > 0);

    SUBCASE("infeasible window") {
        in.customers[0].window_lo = 150;
        in.customers[0].window_hi = 160;
        CHECK_FALSE(brute_force_optimum(in).feasible);
    }
    SUBCASE("mirror-image customers tie") {
        in.customers = {Customer{"c1", {52, 2}, 10, 200, 800, 0, {"B"}},
                        Customer{"c2", {52, -2}, 10, 200, 800, 0, {"B"}}};
        in.freighters.push_back(Freighter{"k2", "B", 20});
        BruteForceResult two = brute_force_optimum(in);
        REQUIRE(two.feasible);
        // one freighter tour B -> c1 -> c2 -> B beats two out-and-back tours
        double tour = std::sqrt(8.0) + 4 + std::sqrt(8.0);
        CHECK(two.cost == doctest::Approx(20 + 0.5 * tour));
    }
    SUBCASE("guard") {
        for (int k = 0; k < 5; ++k)
            in.customers.push_back(Customer{fmt::format("x{}", k), {52, 3.0 + k}, 1, 200, 800, 0, {"B"}});
        CHECK_THROWS_AS(brute_force_optimum(in), Error);
    }
    SUBCASE("service prices") {
        BruteForceResult s = brute_force_optimum(in, ServiceCosts{5, 1});
        CHECK(s.cost == doctest::Approx(20 + std::sqrt(8.0) + 6));
    }
}
