#include "tdppt/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace tdppt {

double euclidean_distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double travel_time(double distance, const CostParams& params) {
    return params.time_per_distance * distance;
}

namespace {

bool finite(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

std::string at(const char* list, std::size_t i) { return fmt::format("{}[{}]", list, i); }

}  // namespace

void validate_instance(const Instance& in) {
    if (!finite(in.cdc)) throw InstanceError("cdc", "coordinates not finite");

    std::unordered_map<std::string, std::size_t> stop_ix;
    for (std::size_t i = 0; i < in.stops.size(); ++i) {
        const Stop& s = in.stops[i];
        auto p = at("stops", i);
        if (s.id.empty()) throw InstanceError(p, "empty id");
        if (!stop_ix.emplace(s.id, i).second) throw InstanceError(p, "duplicate stop id " + s.id);
        if (!finite(s.location)) throw InstanceError(p, "coordinates not finite");
        if (!s.is_drop_in && !s.is_drop_out) throw InstanceError(p, "stop is neither drop-in nor drop-out");
        if (!(s.service_time >= 0)) throw InstanceError(p, "service_time negative");
        if (!(s.max_dwell >= 0)) throw InstanceError(p, "max_dwell negative");
    }

    std::unordered_map<std::string, std::size_t> line_ix;
    for (std::size_t i = 0; i < in.lines.size(); ++i) {
        const Line& l = in.lines[i];
        auto p = at("lines", i);
        if (!line_ix.emplace(l.id, i).second) throw InstanceError(p, "duplicate line id " + l.id);
        if (l.ordered_stops.size() < 2) throw InstanceError(p, "line has fewer than 2 stops");
        std::set<std::string> seen;
        for (const auto& s : l.ordered_stops) {
            if (!stop_ix.count(s)) throw InstanceError(p, "unknown stop " + s);
            if (!seen.insert(s).second) throw InstanceError(p, "repeated stop " + s);
        }
    }

    std::set<std::string> trip_ids;
    for (std::size_t i = 0; i < in.trips.size(); ++i) {
        const Trip& t = in.trips[i];
        auto p = at("trips", i);
        if (!trip_ids.insert(t.id).second) throw InstanceError(p, "duplicate trip id " + t.id);
        auto li = line_ix.find(t.line);
        if (li == line_ix.end()) throw InstanceError(p, "unknown line " + t.line);
        const Line& line = in.lines[li->second];
        if (t.stop_times.size() != line.ordered_stops.size())
            throw InstanceError(p + ".stop_times", "stop_times do not cover the line");
        double prev = -INFINITY;
        for (const auto& s : line.ordered_stops) {
            auto st = t.stop_times.find(s);
            if (st == t.stop_times.end()) throw InstanceError(p + ".stop_times", "missing time for stop " + s);
            if (!std::isfinite(st->second)) throw InstanceError(p + ".stop_times", "time not finite");
            if (!(st->second > prev)) throw InstanceError(p + ".stop_times", "stop_times not increasing");
            prev = st->second;
        }
        if (!(t.capacity > 0)) throw InstanceError(p, "capacity must be positive");
    }

    std::set<std::string> truck_ids;
    for (std::size_t i = 0; i < in.trucks.size(); ++i) {
        if (!truck_ids.insert(in.trucks[i].id).second) throw InstanceError(at("trucks", i), "duplicate truck id");
        if (!(in.trucks[i].capacity > 0)) throw InstanceError(at("trucks", i), "capacity must be positive");
    }

    std::set<std::string> freighter_ids;
    std::set<std::string> homes;
    for (std::size_t i = 0; i < in.freighters.size(); ++i) {
        const Freighter& f = in.freighters[i];
        auto p = at("freighters", i);
        if (!freighter_ids.insert(f.id).second) throw InstanceError(p, "duplicate freighter id");
        auto si = stop_ix.find(f.home_stop);
        if (si == stop_ix.end()) throw InstanceError(p, "unknown stop " + f.home_stop);
        if (!in.stops[si->second].is_drop_out) throw InstanceError(p, "home_stop is not a drop-out stop");
        if (!(f.capacity > 0)) throw InstanceError(p, "capacity must be positive");
        homes.insert(f.home_stop);
    }
    for (std::size_t i = 0; i < in.stops.size(); ++i) {
        if (in.stops[i].is_drop_out && !homes.count(in.stops[i].id))
            throw InstanceError(at("stops", i), "drop-out stop has no freighter");
    }

    std::set<std::string> customer_ids;
    for (std::size_t i = 0; i < in.customers.size(); ++i) {
        const Customer& c = in.customers[i];
        auto p = at("customers", i);
        if (!customer_ids.insert(c.id).second) throw InstanceError(p, "duplicate customer id");
        if (!finite(c.location)) throw InstanceError(p, "coordinates not finite");
        if (!(c.demand > 0)) throw InstanceError(p, "demand must be positive");
        if (!(c.window_lo < c.window_hi)) throw InstanceError(p, "window_lo must be below window_hi");
        if (!(c.service_time >= 0)) throw InstanceError(p, "service_time negative");
        if (c.dropout_candidates.empty()) throw InstanceError(p, "dropout_candidates empty");
        std::set<std::string> seen;
        for (const auto& s : c.dropout_candidates) {
            auto si = stop_ix.find(s);
            if (si == stop_ix.end()) throw InstanceError(p, "unknown stop " + s);
            if (!in.stops[si->second].is_drop_out) throw InstanceError(p, "candidate " + s + " is not a drop-out stop");
            if (!seen.insert(s).second) throw InstanceError(p, "repeated candidate " + s);
        }
    }

    const CostParams& cp = in.cost_params;
    for (double v : {cp.truck_cost_per_distance, cp.freighter_cost_scale, cp.time_per_distance, cp.big_m,
                     cp.service_cost_mu, cp.t_mid_day, cp.period_length}) {
        if (!(v >= 0) || !std::isfinite(v)) throw InstanceError("cost_params", "parameters must be finite and nonnegative");
    }
    if (cp.period_count <= 0) throw InstanceError("cost_params", "period_count must be positive");
}

namespace {

template <class Map>
std::size_t lookup(const Map& m, const std::string& id, const char* what) {
    auto it = m.find(id);
    if (it == m.end()) throw InstanceError("", fmt::format("unknown {} {}", what, id));
    return it->second;
}

}  // namespace

InstanceIndex::InstanceIndex(const Instance& in) {
    for (std::size_t i = 0; i < in.stops.size(); ++i) stop.emplace(in.stops[i].id, i);
    for (std::size_t i = 0; i < in.lines.size(); ++i) line.emplace(in.lines[i].id, i);
    for (std::size_t i = 0; i < in.trips.size(); ++i) trip.emplace(in.trips[i].id, i);
    for (std::size_t i = 0; i < in.trucks.size(); ++i) truck.emplace(in.trucks[i].id, i);
    for (std::size_t i = 0; i < in.freighters.size(); ++i) freighter.emplace(in.freighters[i].id, i);
    for (std::size_t i = 0; i < in.customers.size(); ++i) customer.emplace(in.customers[i].id, i);
}

std::size_t InstanceIndex::stop_at(const std::string& id) const { return lookup(stop, id, "stop"); }
std::size_t InstanceIndex::trip_at(const std::string& id) const { return lookup(trip, id, "trip"); }
std::size_t InstanceIndex::truck_at(const std::string& id) const { return lookup(truck, id, "truck"); }
std::size_t InstanceIndex::freighter_at(const std::string& id) const { return lookup(freighter, id, "freighter"); }
std::size_t InstanceIndex::customer_at(const std::string& id) const { return lookup(customer, id, "customer"); }

std::optional<std::size_t> TripSchedule::position(std::size_t stop) const {
    for (std::size_t k = 0; k < stops.size(); ++k)
        if (stops[k] == stop) return k;
    return std::nullopt;
}

double TripSchedule::time_at(std::size_t stop) const {
    auto k = position(stop);
    if (!k) throw Error("trip does not visit stop");
    return times[*k];
}

Compatibility::Compatibility(const Instance& in) : index(in) {
    const std::size_t ns = in.stops.size();
    const std::size_t nc = in.customers.size();

    schedules.resize(in.trips.size());
    trips_of_stop.assign(ns, {});
    for (std::size_t p = 0; p < in.trips.size(); ++p) {
        const Line& line = in.lines[index.line.at(in.trips[p].line)];
        for (const auto& sid : line.ordered_stops) {
            std::size_t s = index.stop_at(sid);
            schedules[p].stops.push_back(s);
            schedules[p].times.push_back(in.trips[p].stop_times.at(sid));
            trips_of_stop[s].push_back(p);
        }
    }

    for (std::size_t s = 0; s < ns; ++s) {
        if (in.stops[s].is_drop_in) drop_in_stops.push_back(s);
        if (in.stops[s].is_drop_out) drop_out_stops.push_back(s);
    }

    freighters_of_stop.assign(ns, {});
    for (std::size_t k = 0; k < in.freighters.size(); ++k)
        freighters_of_stop[index.stop_at(in.freighters[k].home_stop)].push_back(k);

    // Drop-in stops that precede a given stop on some line.
    std::vector<std::set<std::size_t>> feeders(ns);
    for (const Line& line : in.lines) {
        for (std::size_t a = 0; a < line.ordered_stops.size(); ++a) {
            std::size_t u = index.stop_at(line.ordered_stops[a]);
            if (!in.stops[u].is_drop_in) continue;
            for (std::size_t b = a + 1; b < line.ordered_stops.size(); ++b)
                feeders[index.stop_at(line.ordered_stops[b])].insert(u);
        }
    }

    s_in_of_customer.assign(nc, {});
    s_out_of_customer.assign(nc, {});
    customers_of_dropin.assign(ns, {});
    customers_of_dropout.assign(ns, {});
    for (std::size_t i = 0; i < nc; ++i) {
        std::set<std::size_t> sin;
        for (const auto& sid : in.customers[i].dropout_candidates) {
            std::size_t v = index.stop_at(sid);
            s_out_of_customer[i].push_back(v);
            customers_of_dropout[v].push_back(i);
            sin.insert(feeders[v].begin(), feeders[v].end());
        }
        if (sin.empty())
            throw InstanceError(fmt::format("customers[{}]", i),
                                "customer unreachable by transit: " + in.customers[i].id);
        s_in_of_customer[i].assign(sin.begin(), sin.end());
        for (std::size_t s : sin) customers_of_dropin[s].push_back(i);
    }

    avg_truck_time.assign(ns, 0.0);
    avg_freighter_time.assign(ns, std::vector<double>(nc, 0.0));
    for (std::size_t s = 0; s < ns; ++s) {
        avg_truck_time[s] = travel_time(euclidean_distance(in.cdc, in.stops[s].location), in.cost_params);
        for (std::size_t i = 0; i < nc; ++i)
            avg_freighter_time[s][i] =
                travel_time(euclidean_distance(in.stops[s].location, in.customers[i].location), in.cost_params);
    }
}

bool Compatibility::precedes(std::size_t trip, std::size_t from, std::size_t to) const {
    auto a = schedules[trip].position(from);
    auto b = schedules[trip].position(to);
    return a && b && *a < *b;
}

std::vector<std::size_t> Compatibility::reachable_dropouts(std::size_t customer) const {
    std::vector<std::size_t> out;
    for (std::size_t v : s_out_of_customer[customer]) {
        bool ok = false;
        for (std::size_t p : trips_of_stop[v]) {
            for (std::size_t u : schedules[p].stops) {
                if (u == v) break;
                if (std::find(drop_in_stops.begin(), drop_in_stops.end(), u) != drop_in_stops.end()) {
                    ok = true;
                    break;
                }
            }
            if (ok) break;
        }
        if (ok) out.push_back(v);
    }
    return out;
}

Compatibility derive_compatibility(const Instance& instance) {
    validate_instance(instance);
    return Compatibility(instance);
}

double max_travel_time(const Instance& in) {
    std::vector<Point> pts{in.cdc};
    for (const auto& s : in.stops) pts.push_back(s.location);
    for (const auto& c : in.customers) pts.push_back(c.location);
    double best = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b)
            best = std::max(best, euclidean_distance(pts[a], pts[b]));
    return travel_time(best, in.cost_params);
}

}  // namespace tdppt
