#pragma once

#include "tdppt/instance.hpp"

namespace fixtures {

// Two-stop line, one customer next to the drop-out stop.
inline tdppt::Instance micro1() {
    using namespace tdppt;
    Instance in;
    in.id = "micro-1";
    in.cdc = {0, 0};
    in.stops = {Stop{"A", {10, 0}, true, false, 10, 300}, Stop{"B", {50, 0}, false, true, 10, 300}};
    in.lines = {Line{"L1", {"A", "B"}}};
    in.trips = {Trip{"p1", "L1", {{"A", 150}, {"B", 158}}, 60}, Trip{"p2", "L1", {{"A", 180}, {"B", 188}}, 60}};
    in.trucks = {Truck{"d1", 160}};
    in.freighters = {Freighter{"k1", "B", 20}};
    in.customers = {Customer{"c1", {52, 2}, 10, 200, 800, 0, {"B"}}};
    return in;
}

}  // namespace fixtures
