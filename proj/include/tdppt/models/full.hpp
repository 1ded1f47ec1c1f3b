#pragma once

#include <memory>

#include "tdppt/instance.hpp"
#include "tdppt/milp/backend.hpp"
#include "tdppt/milp/model.hpp"
#include "tdppt/plan.hpp"

namespace tdppt::models {

struct FullOptions {
    bool symmetry_breaking = true;
    ServiceCosts service;  // lambda1 / lambda3, zero unless a service-cost run
};

struct FullBuild;  // variable bookkeeping for decoding

// The monolithic three-tier model together with what the decoder needs.
struct FullModel {
    milp::MilpModel model;
    std::shared_ptr<const FullBuild> build;
    ServiceCosts service;
};

FullModel build_full(const Instance& instance, const Compatibility& compat, const FullOptions& options = {});

// Reads routes and itineraries off a solution, then assigns earliest feasible
// times. Throws milp::DecodeError on fractional binaries or broken routes.
Plan decode_full(const Instance& instance, const FullModel& full, const milp::SolveResult& result);

}  // namespace tdppt::models
