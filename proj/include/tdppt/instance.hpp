#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace tdppt {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when an instance document or an in-memory instance is malformed.
// `path` points at the offending element, e.g. "trips[3].stop_times".
class InstanceError : public Error {
public:
    InstanceError(std::string path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

struct Stop {
    std::string id;
    Point location;
    bool is_drop_in = false;
    bool is_drop_out = false;
    double service_time = 0.0;  // minutes spent loading/unloading at the stop
    double max_dwell = 0.0;     // longest a package may wait at the stop

    bool operator==(const Stop&) const = default;
};

struct Line {
    std::string id;
    std::vector<std::string> ordered_stops;

    bool operator==(const Line&) const = default;
};

// One scheduled run of a line. Trips start empty.
struct Trip {
    std::string id;
    std::string line;
    std::map<std::string, double> stop_times;
    double capacity = 0.0;

    bool operator==(const Trip&) const = default;
};

struct Truck {
    std::string id;
    double capacity = 0.0;

    bool operator==(const Truck&) const = default;
};

// A last-leg courier bound to a single drop-out stop.
struct Freighter {
    std::string id;
    std::string home_stop;
    double capacity = 0.0;

    bool operator==(const Freighter&) const = default;
};

struct Customer {
    std::string id;
    Point location;
    double demand = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double service_time = 0.0;
    std::vector<std::string> dropout_candidates;

    bool operator==(const Customer&) const = default;
};

struct CostParams {
    double truck_cost_per_distance = 1.0;
    double freighter_cost_scale = 0.5;  // freighter arc cost = scale * distance
    double time_per_distance = 0.2;
    double big_m = 1000.0;
    double service_cost_mu = 0.0;
    double t_mid_day = 400.0;
    double period_length = 30.0;
    int period_count = 30;

    double horizon() const { return period_length * period_count; }

    bool operator==(const CostParams&) const = default;
};

struct Instance {
    std::string id;
    Point cdc;
    std::vector<Stop> stops;
    std::vector<Line> lines;
    std::vector<Trip> trips;
    std::vector<Truck> trucks;
    std::vector<Freighter> freighters;
    std::vector<Customer> customers;
    CostParams cost_params;

    bool operator==(const Instance&) const = default;
};

double euclidean_distance(const Point& a, const Point& b);

// Minutes needed to cover `distance` under the single-speed assumption.
double travel_time(double distance, const CostParams& params);

// Checks every structural invariant of an instance and throws InstanceError
// naming the first violated one.
void validate_instance(const Instance& instance);

// Position lookups from ids to vector indices.
struct InstanceIndex {
    std::unordered_map<std::string, std::size_t> stop;
    std::unordered_map<std::string, std::size_t> line;
    std::unordered_map<std::string, std::size_t> trip;
    std::unordered_map<std::string, std::size_t> truck;
    std::unordered_map<std::string, std::size_t> freighter;
    std::unordered_map<std::string, std::size_t> customer;

    explicit InstanceIndex(const Instance& instance);

    std::size_t stop_at(const std::string& id) const;
    std::size_t trip_at(const std::string& id) const;
    std::size_t truck_at(const std::string& id) const;
    std::size_t freighter_at(const std::string& id) const;
    std::size_t customer_at(const std::string& id) const;
};

// A trip laid out in line order with resolved stop indices.
struct TripSchedule {
    std::vector<std::size_t> stops;  // indices into Instance::stops, in travel order
    std::vector<double> times;       // scheduled arrival at each stop

    // Position of `stop` on the trip, if the trip visits it.
    std::optional<std::size_t> position(std::size_t stop) const;
    double time_at(std::size_t stop) const;
};

// Sets derived from the network that every model builder needs. All ids are
// resolved to indices. Immutable once built.
struct Compatibility {
    InstanceIndex index;
    std::vector<TripSchedule> schedules;                  // per trip

    std::vector<std::vector<std::size_t>> s_in_of_customer;      // drop-in stops usable by customer
    std::vector<std::vector<std::size_t>> s_out_of_customer;     // resolved drop-out candidates
    std::vector<std::vector<std::size_t>> customers_of_dropin;   // per stop (empty if not drop-in)
    std::vector<std::vector<std::size_t>> customers_of_dropout;  // per stop (empty if not drop-out)
    std::vector<std::vector<std::size_t>> trips_of_stop;         // per stop
    std::vector<std::vector<std::size_t>> freighters_of_stop;    // per stop

    std::vector<std::size_t> drop_in_stops;
    std::vector<std::size_t> drop_out_stops;

    std::vector<double> avg_truck_time;                  // CDC -> stop, per stop
    std::vector<std::vector<double>> avg_freighter_time;  // [stop][customer]

    explicit Compatibility(const Instance& instance);

    // True when trip `trip` visits `from` strictly before `to`.
    bool precedes(std::size_t trip, std::size_t from, std::size_t to) const;
    // Drop-out candidates of `customer` that some trip reaches from a drop-in stop.
    std::vector<std::size_t> reachable_dropouts(std::size_t customer) const;
};

Compatibility derive_compatibility(const Instance& instance);

// Largest travel time between any two locations of the instance.
double max_travel_time(const Instance& instance);

}  // namespace tdppt
