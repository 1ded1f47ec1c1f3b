#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tdppt/instance.hpp"

namespace tdppt {

struct GenParams {
    int n_customers = 10;
    int n_lines = 1;
    int min_stops_per_line = 4;
    int max_stops_per_line = 6;
    double box_size = 100.0;  // square [0, box_size]^2, CDC at its centre
    std::uint64_t seed = 1;
    int trips_per_line = 0;   // 0: 15 for up to 50 customers, 18 above
    double first_trip_time = 150.0;
    double headway = 30.0;
    double truck_capacity = 160.0;
    double freighter_capacity = 20.0;
    double vehicle_capacity_lo = 60.0;
    double vehicle_capacity_hi = 80.0;
    double demand_lo = 5.0;
    double demand_hi = 20.0;
    double stop_service_time = 10.0;
    double stop_max_dwell = 300.0;
    double window_min_length = 180.0;
    int window_first_period = 2;   // earliest start period, 0-indexed
    int window_last_period = 14;   // latest start period, 0-indexed
    std::optional<int> n_trucks;                // overrides the fleet rule
    std::optional<int> max_freighters_per_stop;  // caps the max rule
    int max_line_attempts = 200;
    CostParams cost_params;

    void check() const;
    int effective_trips_per_line() const;
};

struct Network {
    Point cdc;
    std::vector<Stop> stops;
    std::vector<Line> lines;
};

struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

// Random polylines around the CDC. Drop-in stops come first on each line,
// drop-out stops after them.
Network generate_network(const GenParams& params, std::mt19937_64& rng);

// Keeps lines whose farthest drop-in stop is closer to the CDC than their
// nearest drop-out stop. Unreferenced stops are dropped.
Network filter_lines(const Network& network);
bool line_is_profitable(const Network& network, const Line& line);

// Radius used for candidate assignment: three times the mean pairwise stop distance.
double candidate_radius(const std::vector<Stop>& stops);

std::vector<std::vector<std::string>> assign_dropouts(const std::vector<Point>& customers,
                                                      const std::vector<Stop>& stops);

// Adds one customer next to every drop-out stop no customer can use.
Instance patch_orphan_dropouts(const Instance& instance, const GenParams& params, std::mt19937_64& rng);

std::vector<Window> generate_time_windows(int n, const GenParams& params, std::mt19937_64& rng);

struct FleetSize {
    int n_trucks = 0;
    int freighters_per_stop = 0;
};

int truck_band(int n_customers);
FleetSize size_fleets(const Instance& instance, const GenParams& params);

// Full pipeline. Deterministic in (params, seed).
Instance generate_instance(const GenParams& params);

}  // namespace tdppt
