#pragma once

// Building blocks shared by the monolithic model and the tier models.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdppt/instance.hpp"
#include "tdppt/milp/backend.hpp"
#include "tdppt/milp/model.hpp"
#include "tdppt/plan.hpp"

namespace tdppt::models {

using milp::LinExpr;
using milp::MilpModel;
using milp::Sense;
using milp::SolveResult;
using milp::VarRef;

// Truck routing over o, the given drop-in stops and o'. Node 0 is o, nodes
// 1..n are `stops`, node n+1 is o'.
struct TruckBlock {
    std::vector<std::size_t> stops;
    std::vector<std::vector<std::vector<std::optional<VarRef>>>> w;  // [d][from][to]
    std::vector<std::vector<VarRef>> t1;                             // [d][node], node <= n
    std::size_t end_node() const { return stops.size() + 1; }
    std::optional<std::size_t> node_of(std::size_t stop) const;
};

// Adds w and t1 with depot start/end, flow balance, time propagation and,
// optionally, symmetry breaking. Objective terms are appended to `objective`:
// arc cost plus lambda1 on every arc into a drop-in stop.
TruckBlock add_truck_block(MilpModel& m, const Instance& in, const std::vector<std::size_t>& stops, double big_m,
                           bool symmetry, double lambda1, LinExpr& objective);

// One transit choice: customer boards (or leaves) trip `trip` at `stop`.
struct TransitChoice {
    std::size_t stop = 0;
    std::size_t trip = 0;
    VarRef var;
};

// Which stops a customer may use in the transit block.
struct TransitScope {
    std::vector<std::vector<std::size_t>> pick_stops;  // per customer
    std::vector<std::vector<std::size_t>> drop_stops;  // per customer
    // Variable naming. When the stop is fixed per customer the name omits it.
    std::string pick_family = "y1";
    std::string drop_family = "y2";
    bool pick_named_by_stop = true;
    bool drop_named_by_stop = true;
};

struct TransitBlock {
    std::vector<std::vector<TransitChoice>> pick;  // per customer
    std::vector<std::vector<TransitChoice>> drop;  // per customer
    std::map<std::pair<std::size_t, std::size_t>, VarRef> load;  // (trip, stop) -> l2
};

// Pickup/drop-off choices with one pickup and one drop per package, distinct
// stops, same trip, pickup before drop-off, and trip load propagation with
// capacity. A pickup variable exists only when the trip later reaches one of
// the customer's drop stops, and symmetrically for drop-offs.
TransitBlock add_transit_block(MilpModel& m, const Instance& in, const Compatibility& cp, const TransitScope& scope,
                               double big_m);

// Freighter routing for the freighters of one drop-out stop over the given
// customers. Node 0 is the stop, nodes 1..m are `customers`.
struct FreighterBlock {
    std::size_t stop = 0;
    std::vector<std::size_t> customers;
    std::vector<std::size_t> freighters;
    std::vector<std::vector<std::vector<std::optional<VarRef>>>> x;  // [k][from][to], [k][0][0] idle loop
    std::vector<std::vector<VarRef>> z;                              // [k][customer position]
    std::vector<std::vector<VarRef>> t3;                             // [k][node]
};

// Adds x, z, t3 with the customer-freighter link, capacity, start/end at the
// stop (idle loop included), flow balance, time propagation, time windows and
// optional symmetry breaking. Objective: arc cost plus lambda3 on arcs leaving
// the stop towards a customer.
FreighterBlock add_freighter_block(MilpModel& m, const Instance& in, std::size_t stop,
                                   const std::vector<std::size_t>& customers, double big_m, bool symmetry,
                                   double lambda3, LinExpr& objective);

// Customer positions outgoing-arc sum over one freighter block.
LinExpr outgoing_arcs(const FreighterBlock& b, std::size_t pos);

// Decoding helpers. Routes follow the chosen arcs; idle vehicles yield an
// empty sequence.
std::vector<std::vector<std::size_t>> decode_truck_routes(const TruckBlock& b, const SolveResult& res);
std::vector<std::vector<std::size_t>> decode_freighter_routes(const FreighterBlock& b, const SolveResult& res);

// Index of the single variable set to one, if any; throws when several are.
std::optional<std::size_t> chosen(const SolveResult& res, const std::vector<TransitChoice>& choices);

// Discrete decisions for one package, as indices into the instance.
struct Assignment {
    std::size_t truck = 0;
    std::size_t drop_in = 0;
    std::size_t trip = 0;
    std::size_t drop_out = 0;
    std::size_t freighter = 0;
};

// Builds a Plan from per-customer assignments and per-vehicle visit orders
// (stop indices per truck, customer indices per freighter). Empty routes are
// dropped. Times are the earliest feasible ones.
Plan assemble_plan(const Instance& in, const std::string& method, const std::vector<Assignment>& assignments,
                   const std::vector<std::pair<std::size_t, std::vector<std::size_t>>>& truck_routes,
                   const std::vector<std::pair<std::size_t, std::vector<std::size_t>>>& freighter_routes,
                   const ServiceCosts& service);

std::string sym(const std::string& family, std::initializer_list<std::string> idx);

double dist(const Point& a, const Point& b);

}  // namespace tdppt::models
