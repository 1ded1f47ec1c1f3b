#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "tdppt/models/tiers.hpp"

using namespace tdppt;
using namespace tdppt::models;

namespace {

const milp::Backend& cbc() {
    static auto b = milp::make_backend("cbc");
    return *b;
}

milp::SolveResult run(const TierModel& tm) { return milp::solve(tm.model, cbc(), {}); }

double value(const TierModel& tm, const milp::SolveResult& res, const std::string& name) {
    return res.value(tm.model.at(name));
}

TierHandoff micro_handoff() {
    TierHandoff h;
    h.b_in["c1"] = "A";
    h.t_in["c1"] = 150;
    h.b_out["c1"] = "B";
    h.t_out["c1"] = 158;
    h.trip["c1"] = "p1";
    return h;
}

}  // namespace

TEST_CASE("tier-2-first T2 objectives on MICRO-1") {
    Instance in = fixtures::micro1();
    Compatibility cp(in);

    SUBCASE("obj2 is CDC->A plus c1->B") {
        auto tm = build_d2_t2(in, cp, T2Objective::from(in, T2Tag::Obj2));
        auto res = run(tm);
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(10 + std::sqrt(8.0)));
        auto h = decode_t2(in, cp, tm, res, {});
        CHECK(h.b_in.at("c1") == "A");
        CHECK(h.b_out.at("c1") == "B");
        CHECK((h.trip.at("c1") == "p1" || h.trip.at("c1") == "p2"));
        double t_a = h.trip.at("c1") == "p1" ? 150 : 180;
        CHECK(h.t_in.at("c1") == doctest::Approx(t_a));
        CHECK(h.t_out.at("c1") == doctest::Approx(t_a + 8));
    }
    SUBCASE("obj1 counts one drop-in and one drop-out") {
        auto tm = build_d2_t2(in, cp, T2Objective::from(in, T2Tag::Obj1));
        auto res = run(tm);
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(2.0));
        CHECK(value(tm, res, "phi1[A]") == doctest::Approx(1.0));
        CHECK(value(tm, res, "phi2[B]") == doctest::Approx(1.0));
    }
    SUBCASE("obj3 needs one freighter") {
        auto tm = build_d2_t2(in, cp, T2Objective::from(in, T2Tag::Obj3));
        auto res = run(tm);
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(1.0));
        CHECK(tm.model.count_prefix("h") >= 1);
    }
    SUBCASE("trip capacity below demand makes the stage infeasible") {
        for (auto& t : in.trips) t.capacity = 5;
        Compatibility cp2(in);
        auto res = run(build_d2_t2(in, cp2, T2Objective::from(in, T2Tag::Obj2)));
        CHECK(res.status == milp::SolveStatus::Infeasible);
    }
}

TEST_CASE("tier-1 model from a handoff") {
    Instance in = fixtures::micro1();
    Compatibility cp(in);

    SUBCASE("single stop route costs 20") {
        auto tm = build_t1_from_handoff(in, cp, micro_handoff());
        auto res = run(tm);
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(20.0));
        auto sol = decode_t1(in, cp, tm, res);
        REQUIRE(sol.routes.size() == 1);
        CHECK(sol.truck_of.at("c1") == "d1");
        REQUIRE(sol.routes[0].visits.size() == 1);
        CHECK(sol.routes[0].visits[0].stop == "A");
        CHECK(sol.routes[0].visits[0].time <= 150 - 10 + 1e-6);
    }
    SUBCASE("hand-over earlier than the drive from the CDC") {
        auto h = micro_handoff();
        h.t_in["c1"] = 1;
        CHECK_THROWS_AS(build_t1_from_handoff(in, cp, h), StageInfeasible);
    }
    SUBCASE("two stops share one truck when capacity allows") {
        in.stops.push_back(Stop{"A2", {10, 10}, true, false, 10, 300});
        in.lines[0].ordered_stops = {"A", "A2", "B"};
        for (auto& t : in.trips) t.stop_times["A2"] = t.stop_times["A"] + 4;
        in.customers.push_back(Customer{"c2", {52, -2}, 10, 200, 800, 0, {"B"}});
        in.trucks.push_back(Truck{"d2", 160});
        Compatibility cp2(in);
        auto h = micro_handoff();
        h.b_in["c2"] = "A2";
        h.t_in["c2"] = 154;
        h.b_out["c2"] = "B";
        h.t_out["c2"] = 158;
        h.trip["c2"] = "p1";

        auto tm = build_t1_from_handoff(in, cp2, h);
        auto res = run(tm);
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(10 + 10 + std::sqrt(200.0)));
        CHECK(decode_t1(in, cp2, tm, res).routes.size() == 1);

        in.trucks[0].capacity = in.trucks[1].capacity = 15;
        auto tm2 = build_t1_from_handoff(in, cp2, h);
        auto res2 = run(tm2);
        REQUIRE(res2.status == milp::SolveStatus::Optimal);
        CHECK(res2.objective == doctest::Approx(20 + 2 * std::sqrt(200.0)));
        CHECK(decode_t1(in, cp2, tm2, res2).routes.size() == 2);
    }
}

TEST_CASE("stop-wise tier-3 model") {
    Instance in = fixtures::micro1();
    Compatibility cp(in);

    SUBCASE("single customer tour") {
        auto tm = build_t3_stopwise(in, cp, "B", {"c1"}, micro_handoff());
        auto res = run(tm);
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(std::sqrt(8.0)));
        auto sol = decode_t3(in, tm, res);
        CHECK(sol.freighter_of.at("c1") == "k1");
        REQUIRE(sol.routes.size() == 1);
        CHECK(value(tm, res, "t3[c1,k1]") >= 200 - 1e-6);
    }
    SUBCASE("two customers fit one freighter") {
        in.customers.push_back(Customer{"c2", {52, -2}, 10, 200, 800, 0, {"B"}});
        in.freighters.push_back(Freighter{"k2", "B", 20});
        Compatibility cp2(in);
        auto h = micro_handoff();
        h.b_out["c2"] = "B";
        h.t_out["c2"] = 158;
        auto tm = build_t3_stopwise(in, cp2, "B", {"c1", "c2"}, h);
        auto res = run(tm);
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        auto sol = decode_t3(in, tm, res);
        CHECK(sol.routes.size() == 1);
        CHECK(res.objective == doctest::Approx(0.5 * (2 * std::sqrt(8.0) + 4)));
    }
    SUBCASE("window closing before the package arrives") {
        auto h = micro_handoff();
        h.t_out["c1"] = 158;
        in.customers[0].window_lo = 100;
        in.customers[0].window_hi = 160;
        CHECK_THROWS_AS(build_t3_stopwise(in, cp, "B", {"c1"}, h), StageInfeasible);
    }
}

TEST_CASE("mid-day split") {
    Instance in = fixtures::micro1();
    // Place c1 so that travel(A, c1) = 50 minutes: 250 distance units from A.
    in.customers[0].location = {260, 0};
    in.customers[0].window_hi = 800;
    Compatibility cp(in);
    CHECK(preprocess_midday(in, cp).at("c1").at("A") == 2);  // 800-300-65 = 435

    in.customers[0].window_hi = 600;
    CHECK(preprocess_midday(in, Compatibility(in)).at("c1").at("A") == 1);  // 235

    in.customers[0].window_hi = 765;  // exactly 400
    CHECK(preprocess_midday(in, Compatibility(in)).at("c1").at("A") == 1);
}

TEST_CASE("tier-1-first T1 model") {
    Instance in = fixtures::micro1();
    Compatibility cp(in);
    const double early = 500 - 1.3 * travel_time(euclidean_distance({10, 0}, {52, 2}), in.cost_params);

    auto solve_with = [&](int half) {
        std::map<std::string, std::map<std::string, int>> tau{{"c1", {{"A", half}}}};
        auto tm = build_d1_t1(in, cp, tau);
        auto res = run(tm);
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(20.0));
        auto sol = decode_t1(in, cp, tm, res);
        CHECK(sol.stop_of.at("c1") == "A");
        REQUIRE(sol.routes.size() == 1);
        return sol.routes[0].visits[0].time;
    };
    double first = solve_with(1);
    CHECK(first <= 400 + 1e-6);
    CHECK(first <= early + 1e-6);
    double second = solve_with(2);
    CHECK(second >= 400 - 1e-6);
    CHECK(second <= early + 1e-6);
    CHECK(preprocess_midday(in, cp).at("c1").at("A") == 2);
}

TEST_CASE("tier-1-first T2 model") {
    Instance in = fixtures::micro1();
    TierHandoff h;
    h.b_in["c1"] = "A";
    h.t_in["c1"] = 12;

    SUBCASE("dwell 138 fits") {
        Compatibility cp(in);
        auto tm = build_d1_t2(in, cp, h, T2Objective::from(in, T2Tag::Obj2));
        auto res = run(tm);
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        auto out = decode_t2(in, cp, tm, res, h);
        CHECK((out.trip.at("c1") == "p1" || out.trip.at("c1") == "p2"));
        CHECK(out.b_out.at("c1") == "B");
        CHECK(out.t_in.at("c1") == doctest::Approx(12));
        // only drop-out distance counts
        CHECK(res.objective == doctest::Approx(std::sqrt(8.0)));
    }
    SUBCASE("dwell limit 100 strands the package") {
        in.stops[0].max_dwell = 100;
        Compatibility cp(in);
        CHECK_THROWS_AS(build_d1_t2(in, cp, h, T2Objective::from(in, T2Tag::Obj2)), StageInfeasible);
    }
    SUBCASE("truck arriving after every trip") {
        h.t_in["c1"] = 400;
        Compatibility cp(in);
        CHECK_THROWS_AS(build_d1_t2(in, cp, h, T2Objective::from(in, T2Tag::Obj2)), StageInfeasible);
    }
}

TEST_CASE("tier-3-first T3 model") {
    Instance in = fixtures::micro1();
    Compatibility cp(in);
    auto first = first_arrivals(in, cp);
    CHECK(first.at("B") == doctest::Approx(158));
    auto tm = build_d3_t3(in, cp, first);
    auto res = run(tm);
    REQUIRE(res.status == milp::SolveStatus::Optimal);
    CHECK(res.objective == doctest::Approx(std::sqrt(8.0)));
    CHECK(value(tm, res, "t3[B,k1]") >= 168 - 1e-6);
    auto sol = decode_t3(in, tm, res);
    CHECK(sol.stop_of.at("c1") == "B");
}

TEST_CASE("delivery time repair") {
    Instance in = fixtures::micro1();
    in.customers.push_back(Customer{"c2", {72, 2}, 5, 200, 700, 0, {"B"}});  // 20 units east of c1
    FreighterRoute r{"k1", 0, {{"c1", 0}, {"c2", 0}}};

    SUBCASE("back-propagation") {
        auto rep = repair_d3_times(in, {r});
        REQUIRE(rep.routes.size() == 1);
        const auto& v = rep.routes[0].visits;
        CHECK(v[1].time == doctest::Approx(700));
        CHECK(v[0].time == doctest::Approx(700 - travel_time(20, in.cost_params)));
        CHECK(v[0].customer == "c1");
        CHECK(v[1].customer == "c2");
        double dep = v[0].time - travel_time(std::sqrt(8.0), in.cost_params);
        CHECK(rep.routes[0].departure == doctest::Approx(dep));
        CHECK(rep.t_out.at("c1") == doctest::Approx(dep));
        CHECK(rep.t_out.at("c2") == doctest::Approx(dep));
    }
    SUBCASE("window close wins") {
        in.customers[0].window_hi = 650;
        auto rep = repair_d3_times(in, {r});
        CHECK(rep.routes[0].visits[0].time == doctest::Approx(650));
    }
    SUBCASE("single customer") {
        FreighterRoute one{"k1", 0, {{"c1", 0}}};
        CHECK(repair_d3_times(in, {one}).routes[0].visits[0].time == doctest::Approx(800));
    }
    SUBCASE("warning below the window start") {
        in.customers[0].window_lo = 699;
        auto rep = repair_d3_times(in, {r});
        CHECK(rep.warnings.size() == 1);
    }
}

TEST_CASE("tier-3-first T2 model") {
    Instance in = fixtures::micro1();
    TierHandoff h;
    h.b_out["c1"] = "B";
    h.t_out["c1"] = 800;
    auto obj = T2Objective::from(in, T2Tag::Obj2);

    SUBCASE("late departure leaves no trip within the dwell bound") {
        Compatibility cp(in);
        CHECK(run(build_d3_t2(in, cp, h, obj)).status == milp::SolveStatus::Infeasible);
    }
    SUBCASE("a later trip rescues it") {
        in.trips.push_back(Trip{"p3", "L1", {{"A", 542}, {"B", 550}}, 60});
        Compatibility cp(in);
        auto tm = build_d3_t2(in, cp, h, obj);
        auto res = run(tm);
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        auto out = decode_t2(in, cp, tm, res, h);
        CHECK(out.trip.at("c1") == "p3");
        CHECK(out.t_in.at("c1") == doctest::Approx(542));
        CHECK(res.objective == doctest::Approx(10.0));  // pickup distance only
    }
    SUBCASE("departure at 480 allows p2 only") {
        h.t_out["c1"] = 480;
        Compatibility cp(in);
        auto tm = build_d3_t2(in, cp, h, obj);
        auto res = run(tm);
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        CHECK(decode_t2(in, cp, tm, res, h).trip.at("c1") == "p2");
    }
    SUBCASE("obj3 is refused") {
        Compatibility cp(in);
        CHECK_THROWS_AS(build_d3_t2(in, cp, h, T2Objective::from(in, T2Tag::Obj3)), Error);
    }
}

TEST_CASE("handoff document round trip") {
    TierHandoff h = micro_handoff();
    h.tau["c1"]["A"] = 2;
    h.t_first["B"] = 158;
    CHECK(parse_handoff(serialize_handoff(h)) == h);
    CHECK(serialize_handoff(h).find("3tdppt-handoff/1") != std::string::npos);
}
