#pragma once

#include <string>
#include <vector>

#include "tdppt/instance.hpp"

namespace tdppt {

struct Itinerary {
    std::string customer;
    std::string truck;
    std::string drop_in_stop;
    double drop_in_time = 0.0;  // truck's time at the drop-in stop
    std::string trip;
    std::string drop_out_stop;
    double drop_out_time = 0.0;  // trip's scheduled time at the drop-out stop
    std::string freighter;
    double delivery_time = 0.0;

    bool operator==(const Itinerary&) const = default;
};

struct TruckVisit {
    std::string stop;
    double time = 0.0;

    bool operator==(const TruckVisit&) const = default;
};

struct TruckRoute {
    std::string truck;
    std::vector<TruckVisit> visits;  // CDC -> visits -> CDC copy

    bool operator==(const TruckRoute&) const = default;
};

struct FreighterVisit {
    std::string customer;
    double time = 0.0;

    bool operator==(const FreighterVisit&) const = default;
};

struct FreighterRoute {
    std::string freighter;
    double departure = 0.0;  // leaves the home stop
    std::vector<FreighterVisit> visits;

    bool operator==(const FreighterRoute&) const = default;
};

struct ServiceCosts {
    double lambda1 = 0.0;  // per truck arrival at a drop-in stop
    double lambda3 = 0.0;  // per freighter departure towards a customer

    bool operator==(const ServiceCosts&) const = default;
};

struct CostBreakdown {
    double t1_cost = 0.0;
    double t3_cost = 0.0;
    double service_cost = 0.0;
    double total = 0.0;

    bool operator==(const CostBreakdown&) const = default;
};

struct Plan {
    std::string instance_id;
    std::string method;
    std::vector<Itinerary> itineraries;
    std::vector<TruckRoute> truck_routes;          // used trucks only
    std::vector<FreighterRoute> freighter_routes;  // used freighters only
    ServiceCosts service;
    CostBreakdown cost;

    bool operator==(const Plan&) const = default;
};

struct VrptwVisit {
    std::string customer;
    double time = 0.0;

    bool operator==(const VrptwVisit&) const = default;
};

struct VrptwRoute {
    std::string truck;
    std::vector<VrptwVisit> visits;

    bool operator==(const VrptwRoute&) const = default;
};

struct VrptwPlan {
    std::string instance_id;
    std::vector<VrptwRoute> routes;
    double total_cost = 0.0;

    bool operator==(const VrptwPlan&) const = default;
};

// Route costs from geometry and the plan's service prices.
CostBreakdown route_costs(const Instance& instance, const Plan& plan);
double vrptw_cost(const Instance& instance, const VrptwPlan& plan);

// Fills every timestamp with the earliest value the routes and itineraries
// allow: trucks leave the CDC at 0, arrive no earlier than a package's trip
// time minus the dwell limit, freighters leave once all their packages are
// unloaded and wait at customers until the window opens. Also recomputes
// costs. Leaves the plan's discrete decisions untouched.
void assign_earliest_times(const Instance& instance, Plan& plan);
void assign_earliest_times(const Instance& instance, VrptwPlan& plan);

inline constexpr const char* kPlanSchema = "3tdppt-plan/1";
inline constexpr const char* kVrptwPlanSchema = "3tdppt-vrptw-plan/1";

std::string serialize_plan(const Plan& plan);
Plan parse_plan(const std::string& text);
std::string serialize_vrptw_plan(const VrptwPlan& plan);
VrptwPlan parse_vrptw_plan(const std::string& text);

}  // namespace tdppt
