#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdppt/instance.hpp"
#include "tdppt/milp/backend.hpp"
#include "tdppt/models/tiers.hpp"
#include "tdppt/plan.hpp"

namespace tdppt {

enum class Method { Full, D1, D2, D3, Vrptw };
const char* to_string(Method m);
Method parse_method(const std::string& s);

// Wall-clock caps in seconds.
struct StageLimits {
    double full = 120.0;
    double first_stage = 60.0;  // first model of D1 / D2 / D3
    double other_stage = 30.0;
    double per_stop = 10.0;     // each stop-wise tier-3 model
};

struct RunConfig {
    Method method = Method::Full;
    std::optional<models::T2Tag> t2_obj;
    StageLimits limits;
    double rel_gap = 1e-6;
    std::optional<double> beta;  // overrides the freighter cost scale
    std::optional<double> mu;    // overrides the service-cost multiplier
    std::uint64_t seed = 0;
    bool symmetry_breaking = true;
    std::string artifacts_dir;   // when set, instance, handoffs, plan and metrics are written here

    // Throws Error for missing or forbidden objective choices.
    void check() const;
    // e.g. "full", "d2-obj2"
    std::string label() const;
};

// Parses "full", "vrptw", "d1-obj2", ... into a config with default limits.
RunConfig parse_run_label(const std::string& label);

struct StageMetric {
    std::string name;
    std::string status;
    double objective = 0.0;
    double wall_time = 0.0;
};

struct RunMetrics {
    std::vector<StageMetric> stages;
    double t1_cost = 0.0;
    double t3_cost = 0.0;
    double service_cost = 0.0;
    double total = 0.0;
    double wall_time = 0.0;
    int drop_in_used = 0;
    int drop_out_used = 0;
    int trucks_used = 0;
    int freighters_used = 0;
    int trips_used = 0;
    double packages_per_truck = 0.0;
    double packages_per_freighter = 0.0;
    double packages_per_trip = 0.0;
    std::size_t violations = 0;
    bool optimal = false;  // every stage proved optimal
    ServiceCosts service;
};

struct RunResult {
    Plan plan;                          // empty for the VRPTW baseline
    std::optional<VrptwPlan> vrptw;
    RunMetrics metrics;
    std::vector<std::pair<std::string, models::TierHandoff>> handoffs;  // stage name -> handoff after it
    std::vector<std::string> warnings;
};

// A stage could not produce a solution. `stage` names it, e.g. "T2".
class StageFailure : public Error {
public:
    StageFailure(std::string stage, const std::string& cause)
        : Error(stage + ": " + cause), stage_(std::move(stage)), cause_(cause) {}
    const std::string& stage() const { return stage_; }
    const std::string& cause() const { return cause_; }

private:
    std::string stage_;
    std::string cause_;
};

// Applies beta / mu overrides to a copy of the instance.
Instance configured_instance(const Instance& in, const RunConfig& config);

// Service prices for a run: mu times the mean cost per used route of the
// mu = 0 run of the same configuration. Reference runs are cached.
ServiceCosts service_costs(const Instance& in, const RunConfig& config, const milp::Backend& backend);

RunResult run_method(const Instance& in, const RunConfig& config, const milp::Backend& backend);

RunMetrics plan_metrics(const Instance& in, const Plan& plan);

// Metrics document written next to a run's plan.
std::string metrics_to_json(const std::string& label, const RunResult& result);

}  // namespace tdppt
