#include "tdppt/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace tdppt {

void GenParams::check() const {
    auto fail = [](const std::string& m) { throw InstanceError("gen_params", m); };
    if (n_customers <= 0) fail("n_customers must be positive");
    if (n_lines <= 0) fail("n_lines must be positive");
    if (min_stops_per_line < 2 || max_stops_per_line < min_stops_per_line) fail("invalid stops_per_line range");
    if (!(box_size > 0)) fail("box_size must be positive");
    if (trips_per_line < 0) fail("trips_per_line must be nonnegative");
    if (!(headway > 0)) fail("headway must be positive");
    if (!(truck_capacity > 0) || !(freighter_capacity > 0)) fail("capacities must be positive");
    if (!(vehicle_capacity_lo > 0) || vehicle_capacity_hi < vehicle_capacity_lo) fail("invalid vehicle capacity range");
    if (!(demand_lo > 0) || demand_hi < demand_lo) fail("invalid demand range");
    if (window_first_period < 0 || window_last_period < window_first_period) fail("invalid window period range");
    if (n_trucks && *n_trucks <= 0) fail("n_trucks must be positive");
    if (max_freighters_per_stop && *max_freighters_per_stop <= 0) fail("max_freighters_per_stop must be positive");
}

int GenParams::effective_trips_per_line() const {
    if (trips_per_line > 0) return trips_per_line;
    return n_customers <= 50 ? 15 : 18;
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// One straight polyline: stops at uniform spacing from a random anchor,
// kept inside the box.
Line random_line(const GenParams& params, std::mt19937_64& rng, int label, std::vector<Stop>& stops) {
    const double box = params.box_size;
    const int n = uniform_int(rng, params.min_stops_per_line, params.max_stops_per_line);
    const int n_in = n / 2;
    for (;;) {
        Point anchor{uniform(rng, 0.1 * box, 0.9 * box), uniform(rng, 0.1 * box, 0.9 * box)};
        double angle = uniform(rng, 0.0, 2.0 * M_PI);
        double spacing = uniform(rng, 0.06 * box, 0.14 * box);
        Point dir{std::cos(angle), std::sin(angle)};
        Point end{anchor.x + dir.x * spacing * (n - 1), anchor.y + dir.y * spacing * (n - 1)};
        if (end.x < 0 || end.x > box || end.y < 0 || end.y > box) continue;

        Line line{fmt::format("L{}", label), {}};
        for (int k = 0; k < n; ++k) {
            Stop s;
            s.id = fmt::format("L{}S{}", label, k);
            s.location = Point{anchor.x + dir.x * spacing * k, anchor.y + dir.y * spacing * k};
            s.is_drop_in = k < n_in;
            s.is_drop_out = k >= n_in;
            s.service_time = params.stop_service_time;
            s.max_dwell = params.stop_max_dwell;
            line.ordered_stops.push_back(s.id);
            stops.push_back(s);
        }
        return line;
    }
}

Network generate_lines(const GenParams& params, std::mt19937_64& rng, int first_label, int count) {
    Network net;
    net.cdc = Point{params.box_size / 2, params.box_size / 2};
    for (int l = 0; l < count; ++l) net.lines.push_back(random_line(params, rng, first_label + l, net.stops));
    return net;
}

const Stop& find_stop(const Network& net, const std::string& id) {
    for (const auto& s : net.stops)
        if (s.id == id) return s;
    throw InstanceError("", "unknown stop " + id);
}

std::vector<std::size_t> nearest_dropouts(const Point& at, const std::vector<Stop>& stops) {
    std::vector<std::size_t> ix;
    for (std::size_t s = 0; s < stops.size(); ++s)
        if (stops[s].is_drop_out) ix.push_back(s);
    std::stable_sort(ix.begin(), ix.end(), [&](std::size_t a, std::size_t b) {
        return euclidean_distance(at, stops[a].location) < euclidean_distance(at, stops[b].location);
    });
    return ix;
}

Customer random_customer(const GenParams& params, std::mt19937_64& rng, const std::string& id, Point loc,
                         const Window& w) {
    Customer c;
    c.id = id;
    c.location = loc;
    c.demand = uniform_int(rng, static_cast<int>(params.demand_lo), static_cast<int>(params.demand_hi));
    c.window_lo = w.lo;
    c.window_hi = w.hi;
    c.service_time = 0.0;
    return c;
}

}  // namespace

Network generate_network(const GenParams& params, std::mt19937_64& rng) {
    params.check();
    return generate_lines(params, rng, 0, params.n_lines);
}

bool line_is_profitable(const Network& net, const Line& line) {
    double far_in = -1.0;
    double near_out = INFINITY;
    bool any_in = false, any_out = false;
    for (const auto& id : line.ordered_stops) {
        const Stop& s = find_stop(net, id);
        double d = euclidean_distance(net.cdc, s.location);
        if (s.is_drop_in) far_in = std::max(far_in, d), any_in = true;
        if (s.is_drop_out) near_out = std::min(near_out, d), any_out = true;
    }
    return any_in && any_out && far_in < near_out;
}

Network filter_lines(const Network& net) {
    Network out;
    out.cdc = net.cdc;
    std::set<std::string> keep;
    for (const auto& line : net.lines) {
        if (!line_is_profitable(net, line)) continue;
        out.lines.push_back(line);
        keep.insert(line.ordered_stops.begin(), line.ordered_stops.end());
    }
    if (out.lines.empty()) throw InstanceError("lines", "no profitable lines");
    for (const auto& s : net.stops)
        if (keep.count(s.id)) out.stops.push_back(s);
    return out;
}

double candidate_radius(const std::vector<Stop>& stops) {
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < stops.size(); ++a)
        for (std::size_t b = a + 1; b < stops.size(); ++b) {
            sum += euclidean_distance(stops[a].location, stops[b].location);
            ++pairs;
        }
    return pairs == 0 ? 0.0 : 3.0 * sum / static_cast<double>(pairs);
}

std::vector<std::vector<std::string>> assign_dropouts(const std::vector<Point>& customers,
                                                      const std::vector<Stop>& stops) {
    const double radius = candidate_radius(stops);
    std::vector<std::vector<std::string>> out;
    for (const Point& c : customers) {
        std::vector<std::string> cand;
        for (const auto& s : stops)
            if (s.is_drop_out && euclidean_distance(c, s.location) <= radius) cand.push_back(s.id);
        if (cand.empty()) {
            auto near = nearest_dropouts(c, stops);
            for (std::size_t k = 0; k < near.size() && k < 3; ++k) cand.push_back(stops[near[k]].id);
        }
        out.push_back(std::move(cand));
    }
    return out;
}

Instance patch_orphan_dropouts(const Instance& instance, const GenParams& params, std::mt19937_64& rng) {
    Instance out = instance;
    std::set<std::string> served;
    for (const auto& c : instance.customers) served.insert(c.dropout_candidates.begin(), c.dropout_candidates.end());
    int next = static_cast<int>(instance.customers.size());
    const double jitter = 0.03 * params.box_size;
    for (const auto& s : instance.stops) {
        if (!s.is_drop_out || served.count(s.id)) continue;
        Point loc{std::clamp(s.location.x + uniform(rng, -jitter, jitter), 0.0, params.box_size),
                  std::clamp(s.location.y + uniform(rng, -jitter, jitter), 0.0, params.box_size)};
        Window w = generate_time_windows(1, params, rng).front();
        Customer c = random_customer(params, rng, fmt::format("c{}", next++), loc, w);
        c.dropout_candidates.push_back(s.id);
        for (std::size_t k : nearest_dropouts(loc, instance.stops)) {
            if (c.dropout_candidates.size() == 3) break;
            if (instance.stops[k].id != s.id) c.dropout_candidates.push_back(instance.stops[k].id);
        }
        out.customers.push_back(std::move(c));
    }
    return out;
}

std::vector<Window> generate_time_windows(int n, const GenParams& params, std::mt19937_64& rng) {
    const double period = params.cost_params.period_length;
    const double horizon = params.cost_params.horizon();
    const int lo_min = static_cast<int>(std::ceil(params.window_first_period * period));
    const int lo_max = static_cast<int>(std::ceil((params.window_last_period + 1) * period)) - 1;
    std::vector<Window> out;
    for (int k = 0; k < n; ++k) {
        int lo = uniform_int(rng, lo_min, lo_max);
        int hi_min = lo + static_cast<int>(std::ceil(params.window_min_length));
        int hi = uniform_int(rng, hi_min, std::max(hi_min, static_cast<int>(horizon)));
        out.push_back(Window{static_cast<double>(lo), static_cast<double>(hi)});
    }
    return out;
}

int truck_band(int n_customers) {
    if (n_customers <= 30) return 5;
    if (n_customers <= 40) return 8;
    if (n_customers <= 50) return 10;
    return 14;
}

FleetSize size_fleets(const Instance& instance, const GenParams& params) {
    FleetSize f;
    double demand = 0.0;
    for (const auto& c : instance.customers) demand += c.demand;
    int cover = static_cast<int>(std::ceil(demand / params.truck_capacity - 1e-9));
    f.n_trucks = params.n_trucks ? *params.n_trucks
                                 : std::max(truck_band(static_cast<int>(instance.customers.size())), cover);

    std::map<std::string, int> per_stop;
    for (const auto& c : instance.customers)
        for (const auto& s : c.dropout_candidates) ++per_stop[s];
    for (const auto& [s, n] : per_stop) f.freighters_per_stop = std::max(f.freighters_per_stop, n);
    if (params.max_freighters_per_stop)
        f.freighters_per_stop = std::min(f.freighters_per_stop, *params.max_freighters_per_stop);
    f.freighters_per_stop = std::max(f.freighters_per_stop, 1);
    return f;
}

Instance generate_instance(const GenParams& params) {
    params.check();
    std::mt19937_64 rng(params.seed);

    // Draw lines until enough survive the profitability filter.
    Network net;
    net.cdc = Point{params.box_size / 2, params.box_size / 2};
    for (int attempt = 0; static_cast<int>(net.lines.size()) < params.n_lines; ++attempt) {
        if (attempt >= params.max_line_attempts) throw InstanceError("lines", "no profitable lines");
        Network one = generate_lines(params, rng, static_cast<int>(net.lines.size()), 1);
        if (!line_is_profitable(one, one.lines.front())) continue;
        net.lines.push_back(one.lines.front());
        net.stops.insert(net.stops.end(), one.stops.begin(), one.stops.end());
    }

    Instance in;
    in.id = fmt::format("gen-c{}-l{}-s{}", params.n_customers, params.n_lines, params.seed);
    in.cdc = net.cdc;
    in.stops = net.stops;
    in.lines = net.lines;
    in.cost_params = params.cost_params;

    const int trips = params.effective_trips_per_line();
    for (const auto& line : in.lines) {
        double cap = uniform_int(rng, static_cast<int>(params.vehicle_capacity_lo),
                                 static_cast<int>(params.vehicle_capacity_hi));
        for (int j = 0; j < trips; ++j) {
            Trip t;
            t.id = fmt::format("{}T{}", line.id, j);
            t.line = line.id;
            t.capacity = cap;
            double time = params.first_trip_time + params.headway * j;
            const Stop* prev = nullptr;
            for (const auto& sid : line.ordered_stops) {
                const Stop& s = find_stop(net, sid);
                if (prev) time += travel_time(euclidean_distance(prev->location, s.location), in.cost_params);
                t.stop_times[sid] = time;
                prev = &s;
            }
            in.trips.push_back(std::move(t));
        }
    }

    std::vector<Point> locs;
    for (int i = 0; i < params.n_customers; ++i)
        locs.push_back(Point{uniform(rng, 0.0, params.box_size), uniform(rng, 0.0, params.box_size)});
    auto windows = generate_time_windows(params.n_customers, params, rng);
    auto cands = assign_dropouts(locs, in.stops);
    for (int i = 0; i < params.n_customers; ++i) {
        Customer c = random_customer(params, rng, fmt::format("c{}", i), locs[i], windows[i]);
        c.dropout_candidates = cands[i];
        in.customers.push_back(std::move(c));
    }
    in = patch_orphan_dropouts(in, params, rng);

    FleetSize fleet = size_fleets(in, params);
    for (int d = 0; d < fleet.n_trucks; ++d) in.trucks.push_back(Truck{fmt::format("d{}", d), params.truck_capacity});
    for (const auto& s : in.stops) {
        if (!s.is_drop_out) continue;
        for (int k = 0; k < fleet.freighters_per_stop; ++k)
            in.freighters.push_back(Freighter{fmt::format("{}K{}", s.id, k), s.id, params.freighter_capacity});
    }

    validate_instance(in);
    return in;
}

}  // namespace tdppt
