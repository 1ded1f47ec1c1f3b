#include "common.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace tdppt::models {

using milp::is_one;

std::string sym(const std::string& family, std::initializer_list<std::string> idx) {
    std::string s = family + "[";
    bool first = true;
    for (const auto& i : idx) {
        if (!first) s += ",";
        s += i;
        first = false;
    }
    return s + "]";
}

double dist(const Point& a, const Point& b) { return euclidean_distance(a, b); }

std::optional<std::size_t> TruckBlock::node_of(std::size_t stop) const {
    for (std::size_t k = 0; k < stops.size(); ++k)
        if (stops[k] == stop) return k + 1;
    return std::nullopt;
}

TruckBlock add_truck_block(MilpModel& m, const Instance& in, const std::vector<std::size_t>& stops, double big_m,
                           bool symmetry, double lambda1, LinExpr& objective) {
    TruckBlock b;
    b.stops = stops;
    const std::size_t n = stops.size();
    const std::size_t end = n + 1;
    const CostParams& cp = in.cost_params;

    auto label = [&](std::size_t node) -> std::string {
        if (node == 0) return "o";
        if (node == end) return "o'";
        return in.stops[stops[node - 1]].id;
    };
    auto loc = [&](std::size_t node) -> const Point& {
        return node == 0 || node == end ? in.cdc : in.stops[stops[node - 1]].location;
    };

    const std::size_t nd = in.trucks.size();
    b.w.assign(nd, std::vector<std::vector<std::optional<VarRef>>>(n + 1, std::vector<std::optional<VarRef>>(n + 2)));
    b.t1.assign(nd, {});
    for (std::size_t d = 0; d < nd; ++d) {
        const std::string& tid = in.trucks[d].id;
        for (std::size_t u = 0; u <= n; ++u) {
            for (std::size_t v = 1; v <= end; ++v) {
                if (u == v) continue;
                VarRef w = m.add_binary(sym("w", {label(u), label(v), tid}));
                b.w[d][u][v] = w;
                double c = cp.truck_cost_per_distance * dist(loc(u), loc(v));
                if (v != end) c += lambda1;
                objective.add(w, c);
            }
        }
        for (std::size_t u = 0; u <= n; ++u) b.t1[d].push_back(m.add_continuous(sym("t1", {label(u), tid})));
    }

    for (std::size_t d = 0; d < nd; ++d) {
        const std::string& tid = in.trucks[d].id;
        LinExpr start, finish;
        for (std::size_t v = 1; v <= end; ++v) start.add(*b.w[d][0][v]);
        for (std::size_t u = 0; u <= n; ++u) finish.add(*b.w[d][u][end]);
        m.add_constraint(sym("truck_start", {tid}), start, Sense::Eq, 1.0);
        m.add_constraint(sym("truck_end", {tid}), finish, Sense::Eq, 1.0);
        for (std::size_t u = 1; u <= n; ++u) {
            LinExpr bal;
            for (std::size_t v = 1; v <= end; ++v)
                if (v != u) bal.add(*b.w[d][u][v]);
            for (std::size_t v = 0; v <= n; ++v)
                if (v != u) bal.add(*b.w[d][v][u], -1.0);
            m.add_constraint(sym("truck_balance", {label(u), tid}), bal, Sense::Eq, 0.0);
        }
        // t1[v] >= t1[u] + T_uv + T'_v - M(1 - w_uv)
        for (std::size_t u = 0; u <= n; ++u) {
            for (std::size_t v = 1; v <= n; ++v) {
                if (u == v) continue;
                double tt = travel_time(dist(loc(u), loc(v)), cp) + in.stops[stops[v - 1]].service_time;
                LinExpr e;
                e.add(b.t1[d][v]).add(b.t1[d][u], -1.0).add(*b.w[d][u][v], -big_m);
                m.add_constraint(sym("truck_time", {label(u), label(v), tid}), e, Sense::Ge, tt - big_m);
            }
        }
    }

    if (symmetry) {
        for (std::size_t d = 0; d + 1 < nd; ++d) {
            LinExpr first, arcs;
            for (std::size_t v = 1; v <= n; ++v) first.add(*b.w[d][0][v]).add(*b.w[d + 1][0][v], -1.0);
            for (std::size_t u = 0; u <= n; ++u)
                for (std::size_t v = 1; v <= end; ++v)
                    if (u != v) arcs.add(*b.w[d][u][v]).add(*b.w[d + 1][u][v], -1.0);
            m.add_constraint(sym("truck_sym_used", {in.trucks[d].id}), first, Sense::Ge, 0.0);
            m.add_constraint(sym("truck_sym_size", {in.trucks[d].id}), arcs, Sense::Ge, 0.0);
        }
    }
    return b;
}

TransitBlock add_transit_block(MilpModel& m, const Instance& in, const Compatibility& cp, const TransitScope& scope,
                               double big_m) {
    TransitBlock b;
    const std::size_t nc = in.customers.size();
    b.pick.assign(nc, {});
    b.drop.assign(nc, {});

    for (std::size_t i = 0; i < nc; ++i) {
        const std::string& cid = in.customers[i].id;
        const auto& picks = scope.pick_stops[i];
        const auto& drops = scope.drop_stops[i];
        for (std::size_t s : picks) {
            if (!in.stops[s].is_drop_in) continue;
            for (std::size_t p : cp.trips_of_stop[s]) {
                bool later = std::any_of(drops.begin(), drops.end(), [&](std::size_t v) { return cp.precedes(p, s, v); });
                if (!later) continue;
                std::string name = scope.pick_named_by_stop ? sym(scope.pick_family, {cid, in.stops[s].id, in.trips[p].id})
                                                            : sym(scope.pick_family, {cid, in.trips[p].id});
                b.pick[i].push_back(TransitChoice{s, p, m.add_binary(name)});
            }
        }
        for (std::size_t v : drops) {
            for (std::size_t p : cp.trips_of_stop[v]) {
                bool earlier = std::any_of(picks.begin(), picks.end(), [&](std::size_t u) {
                    return in.stops[u].is_drop_in && cp.precedes(p, u, v);
                });
                if (!earlier) continue;
                std::string name = scope.drop_named_by_stop ? sym(scope.drop_family, {cid, in.stops[v].id, in.trips[p].id})
                                                            : sym(scope.drop_family, {cid, in.trips[p].id});
                b.drop[i].push_back(TransitChoice{v, p, m.add_binary(name)});
            }
        }
    }

    for (std::size_t i = 0; i < nc; ++i) {
        const std::string& cid = in.customers[i].id;
        LinExpr one_pick, one_drop;
        for (const auto& c : b.pick[i]) one_pick.add(c.var);
        for (const auto& c : b.drop[i]) one_drop.add(c.var);
        m.add_constraint(sym("one_pickup", {cid}), one_pick, Sense::Eq, 1.0);
        m.add_constraint(sym("one_dropoff", {cid}), one_drop, Sense::Eq, 1.0);

        // Distinct stops where a stop is both kinds.
        for (const auto& pc : b.pick[i])
            for (const auto& dc : b.drop[i])
                if (pc.stop == dc.stop && pc.trip == dc.trip) {
                    LinExpr e;
                    e.add(pc.var).add(dc.var);
                    m.add_constraint(sym("distinct_stops", {cid, in.stops[pc.stop].id, in.trips[pc.trip].id}), e,
                                     Sense::Le, 1.0);
                }

        std::set<std::size_t> trips;
        for (const auto& c : b.pick[i]) trips.insert(c.trip);
        for (const auto& c : b.drop[i]) trips.insert(c.trip);
        for (std::size_t p : trips) {
            LinExpr e;
            for (const auto& c : b.pick[i])
                if (c.trip == p) e.add(c.var);
            for (const auto& c : b.drop[i])
                if (c.trip == p) e.add(c.var, -1.0);
            m.add_constraint(sym("same_trip", {cid, in.trips[p].id}), e, Sense::Eq, 0.0);
        }

        // T_up y1 <= T_vp y2 + M(1 - y2)
        for (const auto& pc : b.pick[i]) {
            for (const auto& dc : b.drop[i]) {
                if (pc.trip != dc.trip) continue;
                double tu = cp.schedules[pc.trip].time_at(pc.stop);
                double tv = cp.schedules[dc.trip].time_at(dc.stop);
                LinExpr e;
                e.add(pc.var, tu).add(dc.var, big_m - tv);
                m.add_constraint(sym("pickup_before_drop", {cid, in.stops[pc.stop].id, in.stops[dc.stop].id,
                                                            in.trips[pc.trip].id}),
                                 e, Sense::Le, big_m);
            }
        }
    }

    // Load along each trip that carries any candidate package.
    std::map<std::size_t, std::map<std::size_t, LinExpr>> delta;  // trip -> stop -> change
    for (std::size_t i = 0; i < nc; ++i) {
        for (const auto& c : b.pick[i]) delta[c.trip][c.stop].add(c.var, in.customers[i].demand);
        for (const auto& c : b.drop[i]) delta[c.trip][c.stop].add(c.var, -in.customers[i].demand);
    }
    for (auto& [p, changes] : delta) {
        const auto& sched = cp.schedules[p];
        const Trip& trip = in.trips[p];
        std::optional<VarRef> prev;
        for (std::size_t k = 0; k < sched.stops.size(); ++k) {
            std::size_t s = sched.stops[k];
            VarRef l = m.add_continuous(sym("l2", {in.stops[s].id, trip.id}));
            b.load.emplace(std::make_pair(p, s), l);
            LinExpr e;
            e.add(l);
            if (prev) e.add(*prev, -1.0);
            auto it = changes.find(s);
            if (it != changes.end()) e.add(it->second, -1.0);
            m.add_constraint(sym(prev ? "load_step" : "load_start", {in.stops[s].id, trip.id}), e, Sense::Eq, 0.0);
            LinExpr cap;
            cap.add(l);
            m.add_constraint(sym("trip_capacity", {in.stops[s].id, trip.id}), cap, Sense::Le, trip.capacity);
            prev = l;
        }
    }
    return b;
}

FreighterBlock add_freighter_block(MilpModel& m, const Instance& in, std::size_t stop,
                                   const std::vector<std::size_t>& customers, double big_m, bool symmetry,
                                   double lambda3, LinExpr& objective) {
    FreighterBlock b;
    b.stop = stop;
    b.customers = customers;
    const CostParams& cp = in.cost_params;
    const Stop& home = in.stops[stop];
    for (std::size_t k = 0; k < in.freighters.size(); ++k)
        if (in.freighters[k].home_stop == home.id) b.freighters.push_back(k);

    const std::size_t nm = customers.size();
    auto label = [&](std::size_t node) -> const std::string& {
        return node == 0 ? home.id : in.customers[customers[node - 1]].id;
    };
    auto loc = [&](std::size_t node) -> const Point& {
        return node == 0 ? home.location : in.customers[customers[node - 1]].location;
    };

    const std::size_t nk = b.freighters.size();
    b.x.assign(nk, std::vector<std::vector<std::optional<VarRef>>>(nm + 1, std::vector<std::optional<VarRef>>(nm + 1)));
    b.z.assign(nk, {});
    b.t3.assign(nk, {});
    for (std::size_t kk = 0; kk < nk; ++kk) {
        const std::string& fid = in.freighters[b.freighters[kk]].id;
        for (std::size_t a = 0; a <= nm; ++a) {
            for (std::size_t c = 0; c <= nm; ++c) {
                if (a == c && a != 0) continue;
                VarRef x = m.add_binary(sym("x", {label(a), label(c), fid}));
                b.x[kk][a][c] = x;
                double cost = cp.freighter_cost_scale * dist(loc(a), loc(c));
                if (a == 0 && c != 0) cost += lambda3;
                if (cost != 0.0) objective.add(x, cost);
            }
        }
        for (std::size_t pos = 0; pos < nm; ++pos) b.z[kk].push_back(m.add_binary(sym("z", {label(pos + 1), fid})));
        for (std::size_t node = 0; node <= nm; ++node) b.t3[kk].push_back(m.add_continuous(sym("t3", {label(node), fid})));
    }

    for (std::size_t kk = 0; kk < nk; ++kk) {
        const Freighter& f = in.freighters[b.freighters[kk]];
        LinExpr load, start, finish;
        for (std::size_t pos = 0; pos < nm; ++pos) {
            std::size_t node = pos + 1;
            const Customer& cu = in.customers[customers[pos]];
            LinExpr in_arcs;
            for (std::size_t a = 0; a <= nm; ++a)
                if (a != node) in_arcs.add(*b.x[kk][a][node]);
            in_arcs.add(b.z[kk][pos], -1.0);
            m.add_constraint(sym("freighter_link", {cu.id, f.id}), in_arcs, Sense::Eq, 0.0);

            LinExpr bal;
            for (std::size_t c = 0; c <= nm; ++c)
                if (c != node) bal.add(*b.x[kk][node][c]).add(*b.x[kk][c][node], -1.0);
            m.add_constraint(sym("freighter_balance", {cu.id, f.id}), bal, Sense::Eq, 0.0);

            load.add(b.z[kk][pos], cu.demand);

            LinExpr lo;
            lo.add(b.t3[kk][node]).add(b.z[kk][pos], -big_m);
            m.add_constraint(sym("window_lo", {cu.id, f.id}), lo, Sense::Ge, cu.window_lo - big_m);
            LinExpr hi;
            hi.add(b.t3[kk][node]).add(b.z[kk][pos], big_m);
            m.add_constraint(sym("window_hi", {cu.id, f.id}), hi, Sense::Le, cu.window_hi + big_m);
        }
        m.add_constraint(sym("freighter_capacity", {f.id}), load, Sense::Le, f.capacity);
        for (std::size_t c = 0; c <= nm; ++c) start.add(*b.x[kk][0][c]);
        for (std::size_t a = 0; a <= nm; ++a) finish.add(*b.x[kk][a][0]);
        m.add_constraint(sym("freighter_start", {f.id}), start, Sense::Eq, 1.0);
        m.add_constraint(sym("freighter_end", {f.id}), finish, Sense::Eq, 1.0);

        // t3[j] >= t3[i] + T3_ij + That_j - M(1 - x_ij)
        for (std::size_t a = 0; a <= nm; ++a) {
            for (std::size_t c = 1; c <= nm; ++c) {
                if (a == c) continue;
                const Customer& cu = in.customers[customers[c - 1]];
                double tt = travel_time(dist(loc(a), loc(c)), cp) + cu.service_time;
                LinExpr e;
                e.add(b.t3[kk][c]).add(b.t3[kk][a], -1.0).add(*b.x[kk][a][c], -big_m);
                m.add_constraint(sym("freighter_time", {label(a), label(c), f.id}), e, Sense::Ge, tt - big_m);
            }
        }
    }

    if (symmetry) {
        for (std::size_t kk = 0; kk + 1 < nk; ++kk) {
            LinExpr used, size;
            for (std::size_t c = 1; c <= nm; ++c) used.add(*b.x[kk][0][c]).add(*b.x[kk + 1][0][c], -1.0);
            for (std::size_t a = 0; a <= nm; ++a)
                for (std::size_t c = 1; c <= nm; ++c)
                    if (a != c) size.add(*b.x[kk][a][c]).add(*b.x[kk + 1][a][c], -1.0);
            const std::string& fid = in.freighters[b.freighters[kk]].id;
            m.add_constraint(sym("freighter_sym_used", {fid}), used, Sense::Ge, 0.0);
            m.add_constraint(sym("freighter_sym_size", {fid}), size, Sense::Ge, 0.0);
        }
    }
    return b;
}

LinExpr outgoing_arcs(const FreighterBlock& b, std::size_t pos) {
    LinExpr e;
    std::size_t node = pos + 1;
    for (std::size_t kk = 0; kk < b.x.size(); ++kk)
        for (std::size_t c = 0; c < b.x[kk][node].size(); ++c)
            if (b.x[kk][node][c]) e.add(*b.x[kk][node][c]);
    return e;
}

std::vector<std::vector<std::size_t>> decode_truck_routes(const TruckBlock& b, const SolveResult& res) {
    std::vector<std::vector<std::size_t>> routes;
    const std::size_t end = b.end_node();
    for (std::size_t d = 0; d < b.w.size(); ++d) {
        std::vector<std::size_t> route;
        std::size_t at = 0;
        for (std::size_t steps = 0;; ++steps) {
            if (steps > b.stops.size()) throw milp::DecodeError("truck route does not return to the CDC");
            std::optional<std::size_t> next;
            for (std::size_t v = 1; v <= end; ++v) {
                if (!b.w[d][at][v] || !is_one(res, *b.w[d][at][v])) continue;
                if (next) throw milp::DecodeError("truck leaves a node twice");
                next = v;
            }
            if (!next) throw milp::DecodeError("truck route is broken");
            if (*next == end) break;
            route.push_back(b.stops[*next - 1]);
            at = *next;
        }
        routes.push_back(std::move(route));
    }
    return routes;
}

std::vector<std::vector<std::size_t>> decode_freighter_routes(const FreighterBlock& b, const SolveResult& res) {
    std::vector<std::vector<std::size_t>> routes;
    for (std::size_t kk = 0; kk < b.x.size(); ++kk) {
        std::vector<std::size_t> route;
        std::size_t at = 0;
        for (std::size_t steps = 0;; ++steps) {
            if (steps > b.customers.size()) throw milp::DecodeError("freighter route does not return to its stop");
            std::optional<std::size_t> next;
            for (std::size_t c = 0; c < b.x[kk][at].size(); ++c) {
                if (!b.x[kk][at][c] || !is_one(res, *b.x[kk][at][c])) continue;
                if (next) throw milp::DecodeError("freighter leaves a node twice");
                next = c;
            }
            if (!next) throw milp::DecodeError("freighter route is broken");
            if (*next == 0) break;
            route.push_back(b.customers[*next - 1]);
            at = *next;
        }
        routes.push_back(std::move(route));
    }
    return routes;
}

std::optional<std::size_t> chosen(const SolveResult& res, const std::vector<TransitChoice>& choices) {
    std::optional<std::size_t> pick;
    for (std::size_t k = 0; k < choices.size(); ++k) {
        if (!is_one(res, choices[k].var)) continue;
        if (pick) throw milp::DecodeError("more than one transit choice selected");
        pick = k;
    }
    return pick;
}

Plan assemble_plan(const Instance& in, const std::string& method, const std::vector<Assignment>& assignments,
                   const std::vector<std::pair<std::size_t, std::vector<std::size_t>>>& truck_routes,
                   const std::vector<std::pair<std::size_t, std::vector<std::size_t>>>& freighter_routes,
                   const ServiceCosts& service) {
    Plan plan;
    plan.instance_id = in.id;
    plan.method = method;
    plan.service = service;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const Assignment& a = assignments[i];
        Itinerary it;
        it.customer = in.customers[i].id;
        it.truck = in.trucks[a.truck].id;
        it.drop_in_stop = in.stops[a.drop_in].id;
        it.trip = in.trips[a.trip].id;
        it.drop_out_stop = in.stops[a.drop_out].id;
        it.freighter = in.freighters[a.freighter].id;
        plan.itineraries.push_back(std::move(it));
    }
    for (const auto& [d, stops] : truck_routes) {
        if (stops.empty()) continue;
        TruckRoute r{in.trucks[d].id, {}};
        for (std::size_t s : stops) r.visits.push_back(TruckVisit{in.stops[s].id, 0.0});
        plan.truck_routes.push_back(std::move(r));
    }
    for (const auto& [k, customers] : freighter_routes) {
        if (customers.empty()) continue;
        FreighterRoute r{in.freighters[k].id, 0.0, {}};
        for (std::size_t c : customers) r.visits.push_back(FreighterVisit{in.customers[c].id, 0.0});
        plan.freighter_routes.push_back(std::move(r));
    }
    assign_earliest_times(in, plan);
    return plan;
}

}  // namespace tdppt::models
