#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdppt/instance.hpp"
#include "tdppt/plan.hpp"

namespace tdppt {

struct Violation {
    std::string code;     // TRUCK_CAPACITY, TRIP_CAPACITY, WINDOW, ...
    std::string subject;  // ids involved, comma separated
    double measured = 0.0;
    double bound = 0.0;
    std::string message;
};

inline constexpr double kTimeTol = 1e-6;

// Checks a plan against the problem rules directly, without any model.
// Unknown ids raise InstanceError; everything else is reported.
std::vector<Violation> validate_plan(const Instance& instance, const Plan& plan);
std::vector<Violation> validate_vrptw_plan(const Instance& instance, const VrptwPlan& plan);

CostBreakdown recompute_costs(const Instance& instance, const Plan& plan);

std::string violations_to_json(const std::vector<Violation>& violations);

struct BruteForceResult {
    bool feasible = false;
    double cost = 0.0;
    Plan plan;
    std::size_t itineraries_checked = 0;
};

struct BruteForceGuard {
    std::size_t max_customers = 4;
    std::size_t max_trips = 4;
    std::size_t max_trucks = 2;
    std::size_t max_freighters_per_stop = 2;
};

// Exhaustive optimum over package itineraries, vehicle assignments and visit
// orders, with earliest-feasible timing. Refuses instances beyond the guard.
BruteForceResult brute_force_optimum(const Instance& instance, const ServiceCosts& service = {},
                                     const BruteForceGuard& guard = {});

}  // namespace tdppt
