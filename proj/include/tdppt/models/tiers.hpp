#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tdppt/instance.hpp"
#include "tdppt/milp/backend.hpp"
#include "tdppt/milp/model.hpp"
#include "tdppt/plan.hpp"

namespace tdppt::models {

// Raised when a stage is infeasible for a reason visible before solving.
class StageInfeasible : public Error {
public:
    using Error::Error;
};

// Data passed from one stage of a decomposition to the next. Keys are ids.
struct TierHandoff {
    std::map<std::string, std::string> b_in;   // customer -> drop-in stop
    std::map<std::string, double> t_in;        // customer -> hand-over time at the drop-in stop
    std::map<std::string, std::string> b_out;  // customer -> drop-out stop
    std::map<std::string, double> t_out;       // customer -> time the package leaves the drop-out stop area
    std::map<std::string, std::string> trip;   // customer -> chosen trip
    std::map<std::string, std::map<std::string, int>> tau;  // customer -> drop-in stop -> half (1 or 2)
    std::map<std::string, double> t_first;     // drop-out stop -> first trip arrival

    bool operator==(const TierHandoff&) const = default;
};

inline constexpr const char* kHandoffSchema = "3tdppt-handoff/1";
std::string serialize_handoff(const TierHandoff& h);
TierHandoff parse_handoff(const std::string& text);

enum class T2Tag { Obj1, Obj2, Obj3 };
const char* to_string(T2Tag t);
T2Tag parse_t2_tag(const std::string& s);

struct T2Objective {
    T2Tag tag = T2Tag::Obj2;
    double period_length = 30.0;
    int period_count = 30;
    double mean_freighter_capacity = 0.0;  // 0: mean over the instance's freighters

    static T2Objective from(const Instance& in, T2Tag tag);
};

struct TierBuild;

struct TierModel {
    milp::MilpModel model;
    std::shared_ptr<const TierBuild> build;
};

// Shared options for stages that route vehicles.
struct RoutingOptions {
    bool symmetry_breaking = true;
    ServiceCosts service;
};

// Tier-2-first pipeline.
TierModel build_d2_t2(const Instance& in, const Compatibility& cp, const T2Objective& obj);
TierModel build_t1_from_handoff(const Instance& in, const Compatibility& cp, const TierHandoff& h,
                                const RoutingOptions& opt = {});
TierModel build_t3_stopwise(const Instance& in, const Compatibility& cp, const std::string& stop,
                            const std::vector<std::string>& customers, const TierHandoff& h,
                            const RoutingOptions& opt = {});

// Tier-1-first pipeline.
std::map<std::string, std::map<std::string, int>> preprocess_midday(const Instance& in, const Compatibility& cp);
TierModel build_d1_t1(const Instance& in, const Compatibility& cp,
                      const std::map<std::string, std::map<std::string, int>>& tau, const RoutingOptions& opt = {});
TierModel build_d1_t2(const Instance& in, const Compatibility& cp, const TierHandoff& h, const T2Objective& obj);

// Tier-3-first pipeline.
std::map<std::string, double> first_arrivals(const Instance& in, const Compatibility& cp);
TierModel build_d3_t3(const Instance& in, const Compatibility& cp, const std::map<std::string, double>& t_first,
                      const RoutingOptions& opt = {});
TierModel build_d3_t2(const Instance& in, const Compatibility& cp, const TierHandoff& h, const T2Objective& obj);

// Decoded tier-1 stage: truck per customer and visit orders with times.
struct T1Solution {
    std::map<std::string, std::string> truck_of;                // customer -> truck
    std::map<std::string, std::string> stop_of;                 // customer -> drop-in stop
    std::vector<TruckRoute> routes;                             // used trucks only, timed
};

// Decoded tier-3 stage.
struct T3Solution {
    std::map<std::string, std::string> freighter_of;  // customer -> freighter
    std::map<std::string, std::string> stop_of;       // customer -> drop-out stop
    std::vector<FreighterRoute> routes;               // used freighters only, untimed
};

// Tier-2 decode: fills what the stage decides (stops, trip and their times)
// on top of `upstream`.
TierHandoff decode_t2(const Instance& in, const Compatibility& cp, const TierModel& tm, const milp::SolveResult& res,
                      TierHandoff upstream);

// Times: earliest feasible visits. For the tier-1-first model the truck also
// waits for the mid-day boundary when a second-half package is on board.
T1Solution decode_t1(const Instance& in, const Compatibility& cp, const TierModel& tm, const milp::SolveResult& res);
T3Solution decode_t3(const Instance& in, const TierModel& tm, const milp::SolveResult& res);

// Latest-feasible delivery times keeping each route's visit order: the last
// customer is served at the window close, each earlier one as late as its
// window and the next visit allow. Departure and the customers' t_out follow.
struct Repair {
    std::vector<FreighterRoute> routes;          // timed
    std::map<std::string, double> t_out;         // customer -> route departure
    std::vector<std::string> warnings;           // repaired time before the window opens
};
Repair repair_d3_times(const Instance& in, const std::vector<FreighterRoute>& routes);

}  // namespace tdppt::models
