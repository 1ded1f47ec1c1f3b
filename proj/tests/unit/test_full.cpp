#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "tdppt/models/full.hpp"
#include "tdppt/models/vrptw.hpp"

using namespace tdppt;

TEST_CASE("FULL on MICRO-1") {
    Instance in = fixtures::micro1();
    Compatibility cp(in);
    auto full = models::build_full(in, cp);
    auto backend = milp::make_backend("cbc");
    auto res = milp::solve(full.model, *backend, {});
    REQUIRE(res.status == milp::SolveStatus::Optimal);
    CHECK(res.objective == doctest::Approx(20 + 2 * std::sqrt(8.0) * 0.5).epsilon(1e-9));
    Plan plan = models::decode_full(in, full, res);
    CHECK(plan.cost.t1_cost == doctest::Approx(20.0));
    CHECK(plan.cost.total == doctest::Approx(res.objective));
}

TEST_CASE("FULL model variants") {
    auto backend = milp::make_backend("cbc");
    Instance in = fixtures::micro1();

    SUBCASE("window closing before any package can arrive") {
        in.customers[0].window_lo = 150;
        in.customers[0].window_hi = 160;
        Compatibility cp(in);
        auto res = milp::solve(models::build_full(in, cp).model, *backend, {});
        CHECK(res.status == milp::SolveStatus::Infeasible);
    }
    SUBCASE("plan shape") {
        Compatibility cp(in);
        auto full = models::build_full(in, cp);
        auto res = milp::solve(full.model, *backend, {});
        Plan plan = models::decode_full(in, full, res);
        REQUIRE(plan.itineraries.size() == 1);
        const auto& it = plan.itineraries[0];
        CHECK(it.truck == "d1");
        CHECK(it.drop_in_stop == "A");
        CHECK(it.drop_in_time <= 150 + 1e-6);
        CHECK((it.trip == "p1" || it.trip == "p2"));
        CHECK(it.drop_out_stop == "B");
        CHECK(it.freighter == "k1");
        CHECK(it.delivery_time == doctest::Approx(200));
        CHECK(plan.truck_routes.size() == 1);
        CHECK(plan.freighter_routes.size() == 1);
    }
    SUBCASE("idle freighters stay out of the plan") {
        in.freighters.push_back(Freighter{"k2", "B", 20});
        Compatibility cp(in);
        auto full = models::build_full(in, cp);
        auto res = milp::solve(full.model, *backend, {});
        Plan plan = models::decode_full(in, full, res);
        CHECK(plan.freighter_routes.size() == 1);
        CHECK(plan.cost.total == doctest::Approx(20 + std::sqrt(8.0)));
    }
    SUBCASE("symmetry rows do not change the optimum") {
        in.trucks.push_back(Truck{"d2", 160});
        in.freighters.push_back(Freighter{"k2", "B", 20});
        in.customers.push_back(Customer{"c2", {48, -3}, 15, 300, 700, 0, {"B"}});
        Compatibility cp(in);
        auto on = models::build_full(in, cp, {true, {}});
        auto off = models::build_full(in, cp, {false, {}});
        CHECK(on.model.constraints().size() > off.model.constraints().size());
        auto a = milp::solve(on.model, *backend, {});
        auto b = milp::solve(off.model, *backend, {});
        REQUIRE(a.status == milp::SolveStatus::Optimal);
        REQUIRE(b.status == milp::SolveStatus::Optimal);
        CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
    }
    SUBCASE("service prices add per-route terms") {
        Compatibility cp(in);
        auto full = models::build_full(in, cp, {true, ServiceCosts{5, 1}});
        auto res = milp::solve(full.model, *backend, {});
        CHECK(res.objective == doctest::Approx(20 + std::sqrt(8.0) + 6));
        Plan plan = models::decode_full(in, full, res);
        CHECK(plan.cost.service_cost == doctest::Approx(6));
    }
}

TEST_CASE("VRPTW baseline") {
    auto backend = milp::make_backend("cbc");
    Instance in = fixtures::micro1();

    SUBCASE("MICRO-1") {
        auto vm = models::build_vrptw(in);
        auto res = milp::solve(vm.model, *backend, {});
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        VrptwPlan p = models::decode_vrptw(in, vm, res);
        REQUIRE(p.routes.size() == 1);
        CHECK(p.total_cost == doctest::Approx(2 * std::sqrt(52.0 * 52 + 4)));
        CHECK(p.routes[0].visits[0].time == doctest::Approx(200));
    }
    SUBCASE("no customers") {
        in.customers.clear();
        auto vm = models::build_vrptw(in);
        auto res = milp::solve(vm.model, *backend, {});
        REQUIRE(res.status == milp::SolveStatus::Optimal);
        CHECK(res.objective == doctest::Approx(0));
        CHECK(models::decode_vrptw(in, vm, res).routes.empty());
    }
    SUBCASE("two customers share a truck when windows allow") {
        in.customers.push_back(Customer{"c2", {-40, 0}, 10, 200, 800, 0, {"B"}});
        in.trucks.push_back(Truck{"d2", 160});
        auto vm = models::build_vrptw(in);
        auto res = milp::solve(vm.model, *backend, {});
        double one = std::sqrt(52.0 * 52 + 4) + 40 + std::sqrt(92.0 * 92 + 4);
        CHECK(res.objective == doctest::Approx(one));
        CHECK(models::decode_vrptw(in, vm, res).routes.size() == 1);

        in.customers[1].window_lo = 200;
        in.customers[1].window_hi = 205;
        in.customers[0].window_hi = 205;
        auto vm2 = models::build_vrptw(in);
        auto res2 = milp::solve(vm2.model, *backend, {});
        CHECK(models::decode_vrptw(in, vm2, res2).routes.size() == 2);
        CHECK(res2.objective == doctest::Approx(2 * std::sqrt(52.0 * 52 + 4) + 80));
    }
}
