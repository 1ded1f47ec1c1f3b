#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "tdppt/generator.hpp"
#include "tdppt/instance_io.hpp"

using namespace tdppt;

TEST_CASE("distance and travel time") {
    CHECK(euclidean_distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
    CHECK(euclidean_distance({7, 7}, {7, 7}) == 0.0);
    CHECK(euclidean_distance({0, 0}, {52, 2}) == doctest::Approx(std::sqrt(52.0 * 52 + 4)));
    CostParams p;
    CHECK(travel_time(100, p) == doctest::Approx(20.0));
    CHECK(travel_time(0, p) == 0.0);
    CHECK(travel_time(52.038, p) == doctest::Approx(10.4076));
    CHECK(p.horizon() == doctest::Approx(900));

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int k = 0; k < 200; ++k) {
        Point a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        CHECK(euclidean_distance(a, b) == doctest::Approx(euclidean_distance(b, a)));
        CHECK(euclidean_distance(a, c) <= euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-9);
    }
}

TEST_CASE("compatibility on MICRO-1") {
    Instance in = fixtures::micro1();
    Compatibility cp(in);
    const std::size_t A = cp.index.stop_at("A"), B = cp.index.stop_at("B");
    REQUIRE(cp.s_in_of_customer[0].size() == 1);
    CHECK(cp.s_in_of_customer[0][0] == A);
    CHECK(cp.trips_of_stop[A].size() == 2);
    CHECK(cp.customers_of_dropout[B] == std::vector<std::size_t>{0});
    CHECK(cp.freighters_of_stop[B].size() == 1);
    CHECK(cp.precedes(0, A, B));
    CHECK_FALSE(cp.precedes(0, B, A));

    SUBCASE("candidate drop-out at the head of every line") {
        in.stops[0].is_drop_out = true;
        in.freighters.push_back(Freighter{"kA", "A", 20});
        in.customers[0].dropout_candidates = {"A"};
        CHECK_THROWS_AS(Compatibility{in}, InstanceError);
    }
    SUBCASE("a stop shared by two lines sees trips of both") {
        in.stops.push_back(Stop{"C", {30, 20}, false, true, 10, 300});
        in.lines.push_back(Line{"L2", {"A", "C"}});
        in.trips.push_back(Trip{"q1", "L2", {{"A", 200}, {"C", 210}}, 60});
        in.freighters.push_back(Freighter{"kC", "C", 20});
        in.customers.push_back(Customer{"c2", {32, 22}, 5, 200, 800, 0, {"C"}});
        Compatibility two(in);
        CHECK(two.trips_of_stop[two.index.stop_at("A")].size() == 3);
    }
}

TEST_CASE("instance documents") {
    Instance in = fixtures::micro1();
    std::string text = serialize_instance(in);
    CHECK(parse_instance(text) == in);
    CHECK(serialize_instance(parse_instance(text)) == text);

    auto doc = nlohmann::json::parse(text);
    SUBCASE("missing trips") {
        doc.erase("trips");
        try {
            parse_instance(doc.dump());
            FAIL("expected an error");
        } catch (const InstanceError& e) {
            CHECK(std::string(e.what()).find("missing field trips") != std::string::npos);
        }
    }
    SUBCASE("decreasing stop times") {
        in.trips[0].stop_times["B"] = 140;
        try {
            parse_instance(serialize_instance(in));
            FAIL("expected an error");
        } catch (const InstanceError& e) {
            CHECK(std::string(e.what()).find("stop_times not increasing") != std::string::npos);
        }
    }
    SUBCASE("freighter homed at an unknown stop") {
        in.freighters[0].home_stop = "Z";
        CHECK_THROWS_AS(validate_instance(in), InstanceError);
    }
}

TEST_CASE("line filter") {
    Network net;
    net.cdc = {0, 0};
    net.stops = {Stop{"i1", {1, 0}, true, false, 10, 300}, Stop{"o1", {5, 0}, false, true, 10, 300},
                 Stop{"i2", {5, 5}, true, false, 10, 300}, Stop{"o2", {1, 1}, false, true, 10, 300}};
    net.lines = {Line{"good", {"i1", "o1"}}, Line{"bad", {"i2", "o2"}}};
    CHECK(line_is_profitable(net, net.lines[0]));
    CHECK_FALSE(line_is_profitable(net, net.lines[1]));
    Network kept = filter_lines(net);
    REQUIRE(kept.lines.size() == 1);
    CHECK(kept.lines[0].id == "good");
    CHECK(kept.stops.size() == 2);

    SUBCASE("six lines, three of them unprofitable") {
        Network six;
        six.cdc = {0, 0};
        for (int l = 0; l < 6; ++l) {
            double angle = l * 1.0;
            double rin = l % 2 == 1 ? 30 : 10, rout = l % 2 == 1 ? 12 : 40;
            std::string a = fmt::format("in{}", l), b = fmt::format("out{}", l);
            six.stops.push_back(Stop{a, {rin * std::cos(angle), rin * std::sin(angle)}, true, false, 10, 300});
            six.stops.push_back(Stop{b, {rout * std::cos(angle), rout * std::sin(angle)}, false, true, 10, 300});
            six.lines.push_back(Line{fmt::format("L{}", l), {a, b}});
        }
        auto out = filter_lines(six);
        std::set<std::string> ids;
        for (const auto& l : out.lines) ids.insert(l.id);
        CHECK(ids == std::set<std::string>{"L0", "L2", "L4"});
    }
}

TEST_CASE("drop-out candidates") {
    std::vector<Stop> two = {Stop{"a", {0, 0}, false, true, 10, 300}, Stop{"b", {10, 0}, false, true, 10, 300}};
    CHECK(candidate_radius(two) == doctest::Approx(30));

    std::vector<Stop> stops = {Stop{"a", {0, 0}, false, true, 10, 300}, Stop{"b", {1, 0}, false, true, 10, 300},
                               Stop{"c", {2, 0}, false, true, 10, 300}, Stop{"d", {3, 0}, false, true, 10, 300},
                               Stop{"e", {0, 1}, true, false, 10, 300}};
    double r = candidate_radius(stops);
    auto near = assign_dropouts({{-r + 1.5, 0}}, stops);
    CHECK(near[0] == std::vector<std::string>{"a", "b"});
    auto far = assign_dropouts({{100, 0}}, stops);
    CHECK(std::set<std::string>(far[0].begin(), far[0].end()) == std::set<std::string>{"b", "c", "d"});
}

TEST_CASE("orphan drop-out stops get a customer") {
    GenParams gp;
    gp.seed = 5;
    std::mt19937_64 rng(5);
    Instance in = fixtures::micro1();
    in.stops.push_back(Stop{"C", {70, 0}, false, true, 10, 300});
    in.stops.push_back(Stop{"D", {90, 0}, false, true, 10, 300});
    in.lines[0].ordered_stops = {"A", "B", "C", "D"};
    for (auto& t : in.trips) {
        t.stop_times["C"] = t.stop_times["B"] + 4;
        t.stop_times["D"] = t.stop_times["C"] + 4;
    }
    Instance patched = patch_orphan_dropouts(in, gp, rng);
    REQUIRE(patched.customers.size() == 3);
    CHECK(patched.customers[1].dropout_candidates.front() == "C");
    CHECK(patched.customers[2].dropout_candidates.front() == "D");
    CHECK(euclidean_distance(patched.customers[1].location, {70, 0}) < 5);
    CHECK(patch_orphan_dropouts(patched, gp, rng) == patched);
}

TEST_CASE("time windows") {
    GenParams gp;
    std::mt19937_64 rng(9);
    for (const auto& w : generate_time_windows(2000, gp, rng)) {
        CHECK(w.hi - w.lo >= 180);
        CHECK(w.lo >= 60);
        CHECK(w.lo < 15 * 30);
        CHECK(w.hi <= 900);
    }
}

TEST_CASE("fleet sizing") {
    GenParams gp;
    Instance in = fixtures::micro1();
    in.customers.clear();
    auto add = [&](const std::string& stop, int n, double q) {
        for (int k = 0; k < n; ++k)
            in.customers.push_back(Customer{fmt::format("{}{}", stop, k), {50, 1}, q, 200, 800, 0, {stop}});
    };
    add("B", 5, 10);
    add("X", 3, 10);
    add("Y", 2, 10);
    FleetSize f = size_fleets(in, gp);
    CHECK(f.freighters_per_stop == 5);
    CHECK(f.n_trucks == 5);
    in.customers.clear();
    add("B", 10, 20);
    CHECK(size_fleets(in, gp).n_trucks == 5);
    CHECK(size_fleets(in, gp).freighters_per_stop == 10);
    gp.n_trucks = 1;
    gp.max_freighters_per_stop = 3;
    CHECK(size_fleets(in, gp).n_trucks == 1);
    CHECK(size_fleets(in, gp).freighters_per_stop == 3);
    CHECK(truck_band(35) == 8);
    CHECK(truck_band(60) == 14);
}

TEST_CASE("generated instances") {
    GenParams gp;
    gp.n_customers = 10;
    gp.seed = 7;
    Instance a = generate_instance(gp);
    CHECK(serialize_instance(a) == serialize_instance(generate_instance(gp)));
    CHECK(a.lines.size() == 1);
    CHECK(a.trips.size() == 15);
    CHECK(a.customers.size() >= 10);
    CHECK(a.cdc == Point{50, 50});

    gp.min_stops_per_line = gp.max_stops_per_line = 6;
    Instance six = generate_instance(gp);
    int in_count = 0, out_count = 0;
    for (const auto& s : six.stops) {
        in_count += s.is_drop_in;
        out_count += s.is_drop_out;
    }
    CHECK(in_count == 3);
    CHECK(out_count == 3);
    // drop-in stops precede drop-out stops along the line
    const auto& order = six.lines[0].ordered_stops;
    for (std::size_t k = 0; k < order.size(); ++k)
        for (const auto& s : six.stops)
            if (s.id == order[k]) CHECK(s.is_drop_in == (k < 3));

    gp.n_lines = 3;
    gp.seed = 11;
    Instance three = generate_instance(gp);
    CHECK(three.lines.size() == 3);
    CHECK(three.trips.size() == 45);
    Compatibility cp(three);
    for (std::size_t s : cp.drop_out_stops) CHECK_FALSE(cp.customers_of_dropout[s].empty());
    CHECK(filter_lines(Network{three.cdc, three.stops, three.lines}).lines.size() == 3);

    gp.n_customers = 60;
    CHECK(generate_instance(gp).trips.size() == 3 * 18);
}
