#include "tdppt/validator.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include <fmt/format.h>

#include "json_fields.hpp"

namespace tdppt {

namespace {

class Report {
public:
    void add(std::string code, std::string subject, double measured, double bound, std::string message) {
        out.push_back(Violation{std::move(code), std::move(subject), measured, bound, std::move(message)});
    }
    // Reports when measured exceeds bound beyond the tolerance.
    void over(const char* code, const std::string& subject, double measured, double bound, const std::string& what) {
        if (measured > bound + kTimeTol) add(code, subject, measured, bound, fmt::format("{}: {} > {}", what, measured, bound));
    }
    std::vector<Violation> out;
};

double leg(const Instance& in, const Point& a, const Point& b) {
    return travel_time(euclidean_distance(a, b), in.cost_params);
}

}  // namespace

std::vector<Violation> validate_plan(const Instance& in, const Plan& plan) {
    InstanceIndex ix(in);
    Report rep;
    const std::size_t nc = in.customers.size();

    // Resolve every reference first; failures here are hard errors.
    std::vector<const Itinerary*> by_customer(nc, nullptr);
    for (const auto& it : plan.itineraries) {
        std::size_t c = ix.customer_at(it.customer);
        ix.truck_at(it.truck);
        ix.stop_at(it.drop_in_stop);
        ix.trip_at(it.trip);
        ix.stop_at(it.drop_out_stop);
        ix.freighter_at(it.freighter);
        if (by_customer[c])
            rep.add("COVERAGE", it.customer, 2, 1, "customer has more than one itinerary");
        else
            by_customer[c] = &it;
    }
    for (std::size_t c = 0; c < nc; ++c)
        if (!by_customer[c]) rep.add("COVERAGE", in.customers[c].id, 0, 1, "customer has no itinerary");

    std::map<std::string, const TruckRoute*> truck_route;
    for (const auto& r : plan.truck_routes) {
        ix.truck_at(r.truck);
        if (!truck_route.emplace(r.truck, &r).second) rep.add("ROUTE", r.truck, 2, 1, "truck has two routes");
        std::set<std::string> seen;
        for (const auto& v : r.visits) {
            const Stop& s = in.stops[ix.stop_at(v.stop)];
            if (!s.is_drop_in) rep.add("ROUTE", r.truck + "," + v.stop, 0, 0, "truck visits a stop that is not drop-in");
            if (!seen.insert(v.stop).second) rep.add("ROUTE", r.truck + "," + v.stop, 2, 1, "truck visits a stop twice");
        }
    }
    std::map<std::string, const FreighterRoute*> freighter_route;
    std::map<std::string, int> served;
    for (const auto& r : plan.freighter_routes) {
        ix.freighter_at(r.freighter);
        if (!freighter_route.emplace(r.freighter, &r).second)
            rep.add("ROUTE", r.freighter, 2, 1, "freighter has two routes");
        for (const auto& v : r.visits) {
            ix.customer_at(v.customer);
            ++served[v.customer];
        }
    }
    for (std::size_t c = 0; c < nc; ++c) {
        int n = served.count(in.customers[c].id) ? served[in.customers[c].id] : 0;
        if (n != 1) rep.add("COVERAGE", in.customers[c].id, n, 1, "customer must be visited by exactly one freighter");
    }

    // Per-package checks.
    std::map<std::string, double> truck_load, freighter_load;
    std::map<std::string, std::vector<std::pair<std::size_t, double>>> trip_changes;  // trip -> (position, delta)
    for (std::size_t c = 0; c < nc; ++c) {
        const Itinerary* it = by_customer[c];
        if (!it) continue;
        const Customer& cu = in.customers[c];
        const Stop& sin = in.stops[ix.stop_at(it->drop_in_stop)];
        const Stop& sout = in.stops[ix.stop_at(it->drop_out_stop)];
        const Trip& trip = in.trips[ix.trip_at(it->trip)];
        const Line& line = in.lines[ix.line.at(trip.line)];
        const std::string subj = cu.id;

        truck_load[it->truck] += cu.demand;
        freighter_load[it->freighter] += cu.demand;

        if (it->drop_in_stop == it->drop_out_stop)
            rep.add("STOP_DISTINCT", subj + "," + sin.id, 0, 0, "drop-in and drop-out stop coincide");
        if (!sin.is_drop_in) rep.add("ELIGIBILITY", subj + "," + sin.id, 0, 0, "drop-in stop is not a drop-in stop");
        if (std::find(cu.dropout_candidates.begin(), cu.dropout_candidates.end(), sout.id) == cu.dropout_candidates.end())
            rep.add("ELIGIBILITY", subj + "," + sout.id, 0, 0, "drop-out stop is not a candidate of the customer");
        if (in.freighters[ix.freighter_at(it->freighter)].home_stop != sout.id)
            rep.add("ELIGIBILITY", subj + "," + it->freighter, 0, 0, "freighter is not based at the drop-out stop");

        auto pin = trip.stop_times.find(sin.id);
        auto pout = trip.stop_times.find(sout.id);
        if (pin == trip.stop_times.end() || pout == trip.stop_times.end()) {
            rep.add("TIMETABLE", subj + "," + trip.id, 0, 0, "trip does not serve both stops");
            continue;
        }
        auto pos_in = std::find(line.ordered_stops.begin(), line.ordered_stops.end(), sin.id) - line.ordered_stops.begin();
        auto pos_out = std::find(line.ordered_stops.begin(), line.ordered_stops.end(), sout.id) - line.ordered_stops.begin();
        if (pos_in >= pos_out)
            rep.add("ORDER", subj + "," + trip.id, pin->second, pout->second, "pickup does not precede drop-off on the trip");
        if (std::abs(it->drop_out_time - pout->second) > kTimeTol)
            rep.add("TIMETABLE", subj + "," + trip.id, it->drop_out_time, pout->second,
                    "drop-out time differs from the timetable");
        trip_changes[trip.id].emplace_back(pos_in, cu.demand);
        trip_changes[trip.id].emplace_back(pos_out, -cu.demand);

        // Tier 1 hand-over.
        auto tr = truck_route.find(it->truck);
        const TruckVisit* visit = nullptr;
        if (tr != truck_route.end())
            for (const auto& v : tr->second->visits)
                if (v.stop == sin.id) visit = &v;
        if (!visit) {
            rep.add("COVERAGE", subj + "," + it->truck, 0, 1, "truck does not visit the package's drop-in stop");
        } else {
            if (std::abs(it->drop_in_time - visit->time) > kTimeTol)
                rep.add("SYNC", subj + "," + it->truck, it->drop_in_time, visit->time,
                        "itinerary drop-in time differs from the truck visit");
            rep.over("ORDER", subj + "," + sin.id, visit->time, pin->second, "truck arrives after the trip departs");
            rep.over("DWELL_IN", subj + "," + sin.id, pin->second - visit->time, sin.max_dwell, "wait at drop-in stop");
        }

        // Tier 3 hand-over.
        auto fr = freighter_route.find(it->freighter);
        const FreighterVisit* fv = nullptr;
        if (fr != freighter_route.end())
            for (const auto& v : fr->second->visits)
                if (v.customer == cu.id) fv = &v;
        if (!fv) {
            rep.add("COVERAGE", subj + "," + it->freighter, 0, 1, "assigned freighter does not visit the customer");
        } else {
            double dep = fr->second->departure;
            if (dep + kTimeTol < pout->second + sout.service_time)
                rep.add("ORDER", subj + "," + it->freighter, dep, pout->second + sout.service_time,
                        "freighter leaves before the package is unloaded");
            rep.over("DWELL_OUT", subj + "," + sout.id, dep - pout->second, sout.max_dwell, "wait at drop-out stop");
            if (std::abs(it->delivery_time - fv->time) > kTimeTol)
                rep.add("SYNC", subj + "," + it->freighter, it->delivery_time, fv->time,
                        "itinerary delivery time differs from the freighter visit");
            if (fv->time + kTimeTol < cu.window_lo)
                rep.add("WINDOW", subj, fv->time, cu.window_lo, "delivered before the window opens");
            rep.over("WINDOW", subj, fv->time, cu.window_hi, "delivery after the window closes");
        }
    }

    for (const auto& [tid, load] : truck_load)
        rep.over("TRUCK_CAPACITY", tid, load, in.trucks[ix.truck_at(tid)].capacity, "truck load");
    for (const auto& [fid, load] : freighter_load)
        rep.over("FREIGHTER_CAPACITY", fid, load, in.freighters[ix.freighter_at(fid)].capacity, "freighter load");
    for (auto& [tid, changes] : trip_changes) {
        const Trip& trip = in.trips[ix.trip_at(tid)];
        std::sort(changes.begin(), changes.end());
        double load = 0.0, peak = 0.0;
        for (std::size_t k = 0; k < changes.size(); ++k) {
            load += changes[k].second;
            if (k + 1 == changes.size() || changes[k + 1].first != changes[k].first) peak = std::max(peak, load);
        }
        rep.over("TRIP_CAPACITY", tid, peak, trip.capacity, "trip load");
    }

    // Travel times along routes.
    for (const auto& r : plan.truck_routes) {
        Point at = in.cdc;
        double t = 0.0;
        for (const auto& v : r.visits) {
            const Stop& s = in.stops[ix.stop_at(v.stop)];
            double earliest = t + leg(in, at, s.location) + s.service_time;
            if (v.time + kTimeTol < earliest)
                rep.add("TRAVEL", r.truck + "," + v.stop, v.time, earliest, "truck visit earlier than travel allows");
            t = v.time;
            at = s.location;
        }
    }
    for (const auto& r : plan.freighter_routes) {
        const Stop& home = in.stops[ix.stop_at(in.freighters[ix.freighter_at(r.freighter)].home_stop)];
        Point at = home.location;
        double t = r.departure;
        for (const auto& v : r.visits) {
            const Customer& cu = in.customers[ix.customer_at(v.customer)];
            double earliest = t + leg(in, at, cu.location) + cu.service_time;
            if (v.time + kTimeTol < earliest)
                rep.add("TRAVEL", r.freighter + "," + v.customer, v.time, earliest,
                        "freighter visit earlier than travel allows");
            t = v.time;
            at = cu.location;
        }
    }

    CostBreakdown c = route_costs(in, plan);
    if (std::abs(c.total - plan.cost.total) > 1e-6 * std::max(1.0, std::abs(c.total)))
        rep.add("COST", plan.method, plan.cost.total, c.total, "reported total differs from the routes");
    return rep.out;
}

std::vector<Violation> validate_vrptw_plan(const Instance& in, const VrptwPlan& plan) {
    InstanceIndex ix(in);
    Report rep;
    std::map<std::string, int> served;
    std::set<std::string> trucks;
    for (const auto& r : plan.routes) {
        const Truck& tr = in.trucks[ix.truck_at(r.truck)];
        if (!trucks.insert(r.truck).second) rep.add("ROUTE", r.truck, 2, 1, "truck has two routes");
        double load = 0.0, t = 0.0;
        Point at = in.cdc;
        for (const auto& v : r.visits) {
            const Customer& cu = in.customers[ix.customer_at(v.customer)];
            ++served[cu.id];
            load += cu.demand;
            double earliest = t + leg(in, at, cu.location) + cu.service_time;
            if (v.time + kTimeTol < earliest)
                rep.add("TRAVEL", r.truck + "," + cu.id, v.time, earliest, "visit earlier than travel allows");
            if (v.time + kTimeTol < cu.window_lo)
                rep.add("WINDOW", cu.id, v.time, cu.window_lo, "delivered before the window opens");
            rep.over("WINDOW", cu.id, v.time, cu.window_hi, "delivery after the window closes");
            t = v.time;
            at = cu.location;
        }
        rep.over("TRUCK_CAPACITY", r.truck, load, tr.capacity, "truck load");
    }
    for (const auto& cu : in.customers) {
        int n = served.count(cu.id) ? served[cu.id] : 0;
        if (n != 1) rep.add("COVERAGE", cu.id, n, 1, "customer must be visited exactly once");
    }
    double cost = vrptw_cost(in, plan);
    if (std::abs(cost - plan.total_cost) > 1e-6 * std::max(1.0, std::abs(cost)))
        rep.add("COST", "vrptw", plan.total_cost, cost, "reported total differs from the routes");
    return rep.out;
}

CostBreakdown recompute_costs(const Instance& in, const Plan& plan) { return route_costs(in, plan); }

std::string violations_to_json(const std::vector<Violation>& vs) {
    detail::json doc;
    doc["valid"] = vs.empty();
    doc["violations"] = detail::json::array();
    for (const auto& v : vs)
        doc["violations"].push_back({{"code", v.code},
                                     {"subject", v.subject},
                                     {"measured", v.measured},
                                     {"bound", v.bound},
                                     {"message", v.message}});
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Exhaustive oracle.

namespace {

struct Leg {
    std::size_t s_in, trip, s_out;
    double t_in, t_out;  // scheduled pickup / drop-off
};

constexpr double kInfCost = std::numeric_limits<double>::infinity();

// Cheapest feasible route over `stops` (as a permutation) for one truck, or
// infinity. Pickup bounds per stop: latest arrival and earliest arrival.
struct TruckStopNeed {
    std::size_t stop;
    double earliest;  // T_sp - V over the packages handed over there
    double latest;    // min T_sp
};

double best_truck_route(const Instance& in, std::vector<TruckStopNeed> needs, double lambda1,
                        std::vector<std::size_t>* order) {
    if (needs.empty()) {
        if (order) order->clear();
        return 0.0;
    }
    std::sort(needs.begin(), needs.end(), [](const auto& a, const auto& b) { return a.stop < b.stop; });
    double best = kInfCost;
    const CostParams& cp = in.cost_params;
    do {
        Point at = in.cdc;
        double t = 0.0, cost = 0.0;
        bool ok = true;
        for (const auto& n : needs) {
            const Stop& s = in.stops[n.stop];
            double d = euclidean_distance(at, s.location);
            cost += cp.truck_cost_per_distance * d + lambda1;
            t = std::max(t + travel_time(d, cp) + s.service_time, n.earliest);
            if (t > n.latest + kTimeTol) {
                ok = false;
                break;
            }
            at = s.location;
        }
        if (!ok) continue;
        cost += cp.truck_cost_per_distance * euclidean_distance(at, in.cdc);
        if (cost < best - 1e-12) {
            best = cost;
            if (order) {
                order->clear();
                for (const auto& n : needs) order->push_back(n.stop);
            }
        }
    } while (std::next_permutation(needs.begin(), needs.end(),
                                   [](const auto& a, const auto& b) { return a.stop < b.stop; }));
    return best;
}

double best_freighter_route(const Instance& in, std::size_t home, std::vector<std::pair<std::size_t, double>> pkgs,
                            double lambda3, std::vector<std::size_t>* order) {
    if (pkgs.empty()) {
        if (order) order->clear();
        return 0.0;
    }
    const Stop& s = in.stops[home];
    const CostParams& cp = in.cost_params;
    double dep = 0.0, first_drop = kInfCost;
    for (const auto& [c, t] : pkgs) {
        dep = std::max(dep, t + s.service_time);
        first_drop = std::min(first_drop, t);
    }
    if (dep - first_drop > s.max_dwell + kTimeTol) return kInfCost;
    std::sort(pkgs.begin(), pkgs.end());
    double best = kInfCost;
    do {
        Point at = s.location;
        double t = dep, cost = lambda3;
        bool ok = true;
        for (const auto& [c, drop] : pkgs) {
            const Customer& cu = in.customers[c];
            double d = euclidean_distance(at, cu.location);
            cost += cp.freighter_cost_scale * d;
            t = std::max(cu.window_lo, t + travel_time(d, cp) + cu.service_time);
            if (t > cu.window_hi + kTimeTol) {
                ok = false;
                break;
            }
            at = cu.location;
        }
        if (!ok) continue;
        cost += cp.freighter_cost_scale * euclidean_distance(at, s.location);
        if (cost < best - 1e-12) {
            best = cost;
            if (order) {
                order->clear();
                for (const auto& p : pkgs) order->push_back(p.first);
            }
        }
    } while (std::next_permutation(pkgs.begin(), pkgs.end()));
    return best;
}

// Enumerates every map from `n` items to `k` bins.
void for_each_assignment(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& f) {
    std::vector<std::size_t> a(n, 0);
    if (k == 0) {
        if (n == 0) f(a);
        return;
    }
    while (true) {
        f(a);
        std::size_t i = 0;
        while (i < n && ++a[i] == k) a[i++] = 0;
        if (i == n) return;
    }
}

struct TruckSolution {
    double cost = kInfCost;
    std::vector<std::size_t> truck_of;             // per package
    std::vector<std::vector<std::size_t>> routes;  // per truck
};

TruckSolution solve_trucks(const Instance& in, const std::vector<Leg>& legs, double lambda1) {
    TruckSolution best;
    const std::size_t n = legs.size(), nd = in.trucks.size();
    for_each_assignment(n, nd, [&](const std::vector<std::size_t>& a) {
        std::vector<double> load(nd, 0.0);
        for (std::size_t i = 0; i < n; ++i) load[a[i]] += in.customers[i].demand;
        for (std::size_t d = 0; d < nd; ++d)
            if (load[d] > in.trucks[d].capacity + kTimeTol) return;
        double total = 0.0;
        std::vector<std::vector<std::size_t>> routes(nd);
        for (std::size_t d = 0; d < nd; ++d) {
            std::map<std::size_t, TruckStopNeed> needs;
            for (std::size_t i = 0; i < n; ++i) {
                if (a[i] != d) continue;
                auto [it, fresh] = needs.emplace(legs[i].s_in, TruckStopNeed{legs[i].s_in, -kInfCost, kInfCost});
                it->second.earliest = std::max(it->second.earliest, legs[i].t_in - in.stops[legs[i].s_in].max_dwell);
                it->second.latest = std::min(it->second.latest, legs[i].t_in);
            }
            std::vector<TruckStopNeed> v;
            for (auto& [s, need] : needs) v.push_back(need);
            double c = best_truck_route(in, v, lambda1, &routes[d]);
            total += c;
            if (total >= best.cost) return;
        }
        if (total < best.cost - 1e-12) best = TruckSolution{total, a, routes};
    });
    return best;
}

struct FreighterSolution {
    double cost = kInfCost;
    std::vector<std::pair<std::size_t, std::size_t>> freighter_of;  // (customer, freighter)
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> routes;
};

// Packages at one drop-out stop: (customer, drop-off time).
FreighterSolution solve_freighters(const Instance& in, const Compatibility& cp, std::size_t stop,
                                   const std::vector<std::pair<std::size_t, double>>& pkgs, double lambda3) {
    FreighterSolution best;
    const auto& fleet = cp.freighters_of_stop[stop];
    for_each_assignment(pkgs.size(), fleet.size(), [&](const std::vector<std::size_t>& a) {
        double total = 0.0;
        std::vector<std::pair<std::size_t, std::vector<std::size_t>>> routes;
        for (std::size_t kk = 0; kk < fleet.size(); ++kk) {
            std::vector<std::pair<std::size_t, double>> mine;
            double load = 0.0;
            for (std::size_t j = 0; j < pkgs.size(); ++j)
                if (a[j] == kk) {
                    mine.push_back(pkgs[j]);
                    load += in.customers[pkgs[j].first].demand;
                }
            if (load > in.freighters[fleet[kk]].capacity + kTimeTol) return;
            std::vector<std::size_t> order;
            total += best_freighter_route(in, stop, mine, lambda3, &order);
            if (total >= best.cost) return;
            routes.emplace_back(fleet[kk], order);
        }
        if (total < best.cost - 1e-12) {
            best.cost = total;
            best.routes = routes;
            best.freighter_of.clear();
            for (std::size_t j = 0; j < pkgs.size(); ++j) best.freighter_of.emplace_back(pkgs[j].first, fleet[a[j]]);
        }
    });
    return best;
}

}  // namespace

BruteForceResult brute_force_optimum(const Instance& in, const ServiceCosts& service, const BruteForceGuard& g) {
    Compatibility cp(in);
    std::size_t max_fleet = 0;
    for (std::size_t s : cp.drop_out_stops) max_fleet = std::max(max_fleet, cp.freighters_of_stop[s].size());
    if (in.customers.size() > g.max_customers || in.trips.size() > g.max_trips || in.trucks.size() > g.max_trucks ||
        max_fleet > g.max_freighters_per_stop)
        throw Error(fmt::format("instance too large for enumeration: {} customers (max {}), {} trips (max {}), "
                                "{} trucks (max {}), {} freighters per stop (max {})",
                                in.customers.size(), g.max_customers, in.trips.size(), g.max_trips, in.trucks.size(),
                                g.max_trucks, max_fleet, g.max_freighters_per_stop));

    const std::size_t nc = in.customers.size();
    std::vector<std::vector<Leg>> options(nc);
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t v : cp.s_out_of_customer[i])
            for (std::size_t s : cp.s_in_of_customer[i])
                for (std::size_t p = 0; p < in.trips.size(); ++p)
                    if (s != v && cp.precedes(p, s, v))
                        options[i].push_back(Leg{s, p, v, cp.schedules[p].time_at(s), cp.schedules[p].time_at(v)});

    BruteForceResult res;
    res.cost = kInfCost;
    std::map<std::vector<std::pair<std::size_t, double>>, TruckSolution> truck_memo;
    std::map<std::pair<std::size_t, std::vector<std::pair<std::size_t, double>>>, FreighterSolution> freighter_memo;

    std::vector<std::size_t> pick(nc, 0);
    std::vector<Leg> legs(nc);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i < nc) {
            for (std::size_t k = 0; k < options[i].size(); ++k) {
                legs[i] = options[i][k];
                rec(i + 1);
            }
            return;
        }
        ++res.itineraries_checked;
        // Trip loads.
        for (std::size_t p = 0; p < in.trips.size(); ++p) {
            const auto& sched = cp.schedules[p];
            double load = 0.0;
            for (std::size_t pos = 0; pos < sched.stops.size(); ++pos) {
                for (std::size_t c = 0; c < nc; ++c) {
                    if (legs[c].trip != p) continue;
                    if (legs[c].s_in == sched.stops[pos]) load += in.customers[c].demand;
                    if (legs[c].s_out == sched.stops[pos]) load -= in.customers[c].demand;
                }
                if (load > in.trips[p].capacity + kTimeTol) return;
            }
        }
        std::vector<std::pair<std::size_t, double>> tkey;
        for (const auto& l : legs) tkey.emplace_back(l.s_in, l.t_in);
        auto tit = truck_memo.find(tkey);
        if (tit == truck_memo.end()) tit = truck_memo.emplace(tkey, solve_trucks(in, legs, service.lambda1)).first;
        double total = tit->second.cost;
        if (total >= res.cost) return;
        std::vector<const FreighterSolution*> parts;
        for (std::size_t s : cp.drop_out_stops) {
            std::vector<std::pair<std::size_t, double>> pk;
            for (std::size_t c = 0; c < nc; ++c)
                if (legs[c].s_out == s) pk.emplace_back(c, legs[c].t_out);
            auto key = std::make_pair(s, pk);
            auto fit = freighter_memo.find(key);
            if (fit == freighter_memo.end())
                fit = freighter_memo.emplace(key, solve_freighters(in, cp, s, pk, service.lambda3)).first;
            total += fit->second.cost;
            if (total >= res.cost) return;
            parts.push_back(&fit->second);
        }
        if (total >= res.cost - 1e-12) return;
        res.cost = total;
        res.feasible = true;

        Plan plan;
        plan.instance_id = in.id;
        plan.method = "brute-force";
        plan.service = service;
        std::vector<std::size_t> freighter_of(nc, 0);
        for (const auto* part : parts)
            for (const auto& [c, k] : part->freighter_of) freighter_of[c] = k;
        for (std::size_t c = 0; c < nc; ++c) {
            Itinerary it;
            it.customer = in.customers[c].id;
            it.truck = in.trucks[tit->second.truck_of[c]].id;
            it.drop_in_stop = in.stops[legs[c].s_in].id;
            it.trip = in.trips[legs[c].trip].id;
            it.drop_out_stop = in.stops[legs[c].s_out].id;
            it.freighter = in.freighters[freighter_of[c]].id;
            plan.itineraries.push_back(it);
        }
        for (std::size_t d = 0; d < in.trucks.size(); ++d) {
            if (tit->second.routes[d].empty()) continue;
            TruckRoute r{in.trucks[d].id, {}};
            for (std::size_t s : tit->second.routes[d]) r.visits.push_back({in.stops[s].id, 0.0});
            plan.truck_routes.push_back(r);
        }
        for (const auto* part : parts)
            for (const auto& [k, order] : part->routes) {
                if (order.empty()) continue;
                FreighterRoute r{in.freighters[k].id, 0.0, {}};
                for (std::size_t c : order) r.visits.push_back({in.customers[c].id, 0.0});
                plan.freighter_routes.push_back(r);
            }
        assign_earliest_times(in, plan);
        res.plan = std::move(plan);
    };
    rec(0);
    if (!res.feasible) res.cost = 0.0;
    return res;
}

}  // namespace tdppt
