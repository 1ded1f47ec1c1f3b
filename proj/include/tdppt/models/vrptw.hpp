#pragma once

#include <memory>

#include "tdppt/instance.hpp"
#include "tdppt/milp/backend.hpp"
#include "tdppt/milp/model.hpp"
#include "tdppt/plan.hpp"

namespace tdppt::models {

struct VrptwBuild;

// Direct CDC -> customer truck routing with time windows; the transit
// network is ignored.
struct VrptwModel {
    milp::MilpModel model;
    std::shared_ptr<const VrptwBuild> build;
};

VrptwModel build_vrptw(const Instance& instance, bool symmetry_breaking = true);
VrptwPlan decode_vrptw(const Instance& instance, const VrptwModel& vm, const milp::SolveResult& result);

}  // namespace tdppt::models
