#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fixtures.hpp"
#include "tdppt/generator.hpp"
#include "tdppt/instance_io.hpp"
#include "tdppt/pipeline.hpp"
#include "tdppt/validator.hpp"

using namespace tdppt;

namespace {

const milp::Backend& cbc() {
    static auto b = milp::make_backend("cbc");
    return *b;
}

const double kMicroFull = 20 + std::sqrt(8.0);

}  // namespace

TEST_CASE("run labels") {
    CHECK(parse_run_label("full").method == Method::Full);
    CHECK(parse_run_label("d2-obj3").t2_obj == models::T2Tag::Obj3);
    CHECK(parse_run_label("d1-obj1").label() == "d1-obj1");
    CHECK_THROWS_AS(parse_run_label("d3-obj3"), Error);
    CHECK_THROWS_AS(parse_run_label("d2"), Error);
    CHECK_THROWS_AS(parse_run_label("full-obj1"), Error);
    CHECK_THROWS_AS(parse_run_label("d4-obj1"), Error);
}

TEST_CASE("MICRO-1 end to end") {
    Instance in = fixtures::micro1();

    SUBCASE("full") {
        auto r = run_method(in, parse_run_label("full"), cbc());
        CHECK(r.metrics.total == doctest::Approx(kMicroFull).epsilon(1e-9));
        CHECK(r.metrics.t1_cost == doctest::Approx(20));
        CHECK(r.metrics.violations == 0);
        CHECK(r.metrics.optimal);
        CHECK(r.plan.method == "full");
        CHECK(r.metrics.trucks_used == 1);
        CHECK(r.metrics.freighters_used == 1);
        CHECK(r.metrics.drop_in_used == 1);
    }
    SUBCASE("d2 with each objective matches full") {
        for (const char* label : {"d2-obj1", "d2-obj2", "d2-obj3"}) {
            CAPTURE(label);
            auto r = run_method(in, parse_run_label(label), cbc());
            CHECK(r.metrics.total == doctest::Approx(kMicroFull));
            CHECK(validate_plan(in, r.plan).empty());
            CHECK(r.metrics.stages.size() == 3);
            REQUIRE(r.plan.itineraries.size() == 1);
            CHECK(r.plan.itineraries[0].delivery_time == doctest::Approx(200));
        }
    }
    SUBCASE("vrptw baseline") {
        auto r = run_method(in, parse_run_label("vrptw"), cbc());
        REQUIRE(r.vrptw);
        CHECK(r.metrics.total == doctest::Approx(2 * std::sqrt(52.0 * 52 + 4)).epsilon(1e-9));
        CHECK(r.metrics.total == doctest::Approx(104.08).epsilon(1e-4));
        CHECK(r.metrics.violations == 0);
    }
    SUBCASE("d1 strands the second-half package") {
        try {
            run_method(in, parse_run_label("d1-obj2"), cbc());
            FAIL("expected a stage failure");
        } catch (const StageFailure& e) {
            CHECK(e.stage() == "T2");
            CHECK(std::string(e.cause()).find("stranded") != std::string::npos);
        }
    }
    SUBCASE("d3 runs into the capacity shortfall after repair") {
        try {
            run_method(in, parse_run_label("d3-obj2"), cbc());
            FAIL("expected a stage failure");
        } catch (const StageFailure& e) {
            CHECK(e.stage() == "T2");
            CHECK(e.cause() == "T2 capacity shortfall at stop");
        }
    }
    SUBCASE("d3 with a late trip") {
        in.trips.push_back(Trip{"p3", "L1", {{"A", 542}, {"B", 550}}, 60});
        auto r = run_method(in, parse_run_label("d3-obj2"), cbc());
        CHECK(r.metrics.violations == 0);
        CHECK(r.metrics.total >= kMicroFull - 1e-6);
        REQUIRE(r.plan.itineraries.size() == 1);
        CHECK(r.plan.itineraries[0].trip == "p3");
        CHECK(r.plan.itineraries[0].delivery_time == doctest::Approx(800));
    }
}

TEST_CASE("artifacts are written per run") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "tdppt-artifacts-test";
    fs::remove_all(dir);
    RunConfig cfg = parse_run_label("d2-obj2");
    cfg.artifacts_dir = dir.string();
    auto r = run_method(fixtures::micro1(), cfg, cbc());
    CHECK(fs::exists(dir / "instance.json"));
    CHECK(fs::exists(dir / "plan.json"));
    CHECK(fs::exists(dir / "metrics.json"));
    CHECK(fs::exists(dir / "handoff-1-T2.json"));
    CHECK(parse_plan(read_file((dir / "plan.json").string())) == r.plan);
    CHECK(models::parse_handoff(read_file((dir / "handoff-1-T2.json").string())) == r.handoffs[0].second);
    fs::remove_all(dir);
}

TEST_CASE("service costs follow the reference run") {
    Instance in = fixtures::micro1();
    RunConfig cfg = parse_run_label("full");
    cfg.mu = 0.5;
    ServiceCosts s = service_costs(in, cfg, cbc());
    CHECK(s.lambda1 == doctest::Approx(0.5 * 20));
    CHECK(s.lambda3 == doctest::Approx(0.5 * std::sqrt(8.0)));
    auto r = run_method(in, cfg, cbc());
    CHECK(r.metrics.service_cost == doctest::Approx(s.lambda1 + s.lambda3));
    CHECK(r.metrics.total == doctest::Approx(1.5 * kMicroFull));
    CHECK(r.metrics.violations == 0);
    cfg.mu = 0.0;
    CHECK(service_costs(in, cfg, cbc()) == ServiceCosts{});
}

TEST_CASE("full dominates the decompositions on generated instances") {
    for (std::uint64_t seed : {3u, 4u}) {
        GenParams gp;
        gp.n_customers = 4;
        gp.seed = seed;
        gp.n_trucks = 2;
        gp.max_freighters_per_stop = 2;
        Instance in = generate_instance(gp);
        auto full = run_method(in, parse_run_label("full"), cbc());
        REQUIRE(full.metrics.optimal);
        CHECK(full.metrics.violations == 0);
        for (const char* label : {"d1-obj1", "d1-obj2", "d1-obj3", "d2-obj1", "d2-obj2", "d2-obj3", "d3-obj1", "d3-obj2"}) {
            CAPTURE(seed);
            CAPTURE(label);
            try {
                auto r = run_method(in, parse_run_label(label), cbc());
                CHECK(r.metrics.violations == 0);
                CHECK(full.metrics.total <= r.metrics.total + 1e-6);
            } catch (const StageFailure& e) {
                std::string note = std::string(label) + " stage failure: " + e.what();
                MESSAGE(note);
            }
        }
    }
}
