#include "tdppt/models/tiers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "common.hpp"
#include "json_fields.hpp"

namespace tdppt::models {

namespace {

// Factor applied to the direct freighter travel time when estimating how much
// earlier a package must reach its drop-in stop.
constexpr double kDetourFactor = 1.3;

}  // namespace

enum class TierKind { T2, T1Handoff, D1T1, T3Stopwise, D3T3 };

struct TierBuild {
    TierKind kind = TierKind::T2;
    TransitBlock transit;
    TruckBlock trucks;
    struct TruckChoice {
        std::size_t customer, stop, truck;
        VarRef var;
    };
    std::vector<TruckChoice> r;
    std::vector<FreighterBlock> freighters;
    // Lower bound on the truck's time at (customer's stop) per customer.
    std::map<std::size_t, double> arrive_after;
    // (customer, stop) pairs pinned to the second half of the day.
    std::set<std::pair<std::size_t, std::size_t>> second_half;
};

const char* to_string(T2Tag t) {
    switch (t) {
        case T2Tag::Obj1: return "obj1";
        case T2Tag::Obj2: return "obj2";
        case T2Tag::Obj3: return "obj3";
    }
    return "?";
}

T2Tag parse_t2_tag(const std::string& s) {
    if (s == "obj1") return T2Tag::Obj1;
    if (s == "obj2") return T2Tag::Obj2;
    if (s == "obj3") return T2Tag::Obj3;
    throw Error("unknown tier-2 objective: " + s);
}

T2Objective T2Objective::from(const Instance& in, T2Tag tag) {
    T2Objective o;
    o.tag = tag;
    o.period_length = in.cost_params.period_length;
    o.period_count = in.cost_params.period_count;
    return o;
}

namespace {

std::size_t stop_index(const Compatibility& cp, const std::string& id) { return cp.index.stop_at(id); }

template <class Map>
const typename Map::mapped_type& need(const Map& m, const std::string& key, const char* what) {
    auto it = m.find(key);
    if (it == m.end()) throw Error(fmt::format("handoff has no {} for customer {}", what, key));
    return it->second;
}

double mean_freighter_capacity(const Instance& in, const T2Objective& obj) {
    if (obj.mean_freighter_capacity > 0) return obj.mean_freighter_capacity;
    double sum = 0.0;
    for (const auto& f : in.freighters) sum += f.capacity;
    if (in.freighters.empty()) throw Error("no freighters to average");
    return sum / static_cast<double>(in.freighters.size());
}

// Tier-2 objectives. `pick_terms` / `drop_terms` select which side counts.
void add_t2_objective(MilpModel& m, const Instance& in, const Compatibility& cp, const TransitBlock& tb,
                      const T2Objective& obj, bool pick_terms, bool drop_terms) {
    const double M = milp::big_m(in).value;
    LinExpr total;
    const std::size_t nc = in.customers.size();
    switch (obj.tag) {
        case T2Tag::Obj1: {
            std::map<std::size_t, LinExpr> picks, drops;
            for (std::size_t i = 0; i < nc; ++i) {
                for (const auto& c : tb.pick[i]) picks[c.stop].add(c.var);
                for (const auto& c : tb.drop[i]) drops[c.stop].add(c.var);
            }
            auto add_phi = [&](const char* fam, std::map<std::size_t, LinExpr>& use) {
                for (auto& [s, e] : use) {
                    VarRef phi = m.add_binary(sym(fam, {in.stops[s].id}));
                    LinExpr c;
                    c.add(phi).add(e, -1.0 / M);
                    m.add_constraint(sym(std::string(fam) + "_use", {in.stops[s].id}), c, Sense::Ge, 0.0);
                    total.add(phi);
                }
            };
            if (pick_terms) add_phi("phi1", picks);
            if (drop_terms) add_phi("phi2", drops);
            break;
        }
        case T2Tag::Obj2:
            for (std::size_t i = 0; i < nc; ++i) {
                if (pick_terms)
                    for (const auto& c : tb.pick[i]) total.add(c.var, dist(in.cdc, in.stops[c.stop].location));
                if (drop_terms)
                    for (const auto& c : tb.drop[i])
                        total.add(c.var, dist(in.customers[i].location, in.stops[c.stop].location));
            }
            break;
        case T2Tag::Obj3: {
            if (!drop_terms) throw Error("obj3 is not available when tier 3 is solved first");
            if (obj.period_length <= 0 || obj.period_count <= 0) throw Error("obj3 needs a period grid");
            const double qf = mean_freighter_capacity(in, obj);
            std::map<std::pair<std::size_t, int>, LinExpr> volume;
            for (std::size_t i = 0; i < nc; ++i)
                for (const auto& c : tb.drop[i]) {
                    double t = cp.schedules[c.trip].time_at(c.stop);
                    int tau = std::clamp(static_cast<int>(std::floor(t / obj.period_length)), 0, obj.period_count - 1);
                    volume[{c.stop, tau}].add(c.var, in.customers[i].demand);
                }
            for (auto& [key, e] : volume) {
                std::string tau = std::to_string(key.second);
                VarRef h = m.add_integer(sym("h", {in.stops[key.first].id, tau}));
                LinExpr c;
                c.add(e).add(h, -qf);
                m.add_constraint(sym("freighter_estimate", {in.stops[key.first].id, tau}), c, Sense::Le, 0.0);
                total.add(h);
            }
            break;
        }
    }
    m.set_objective(total);
    m.metadata["t2_objective"] = to_string(obj.tag);
}

// Latest delivery cut: drop-off time plus direct freighter time within the window.
void add_window_cut(MilpModel& m, const Instance& in, const Compatibility& cp, const TransitBlock& tb) {
    for (std::size_t i = 0; i < in.customers.size(); ++i) {
        const Customer& cu = in.customers[i];
        LinExpr e;
        for (const auto& c : tb.drop[i])
            e.add(c.var, cp.schedules[c.trip].time_at(c.stop) + cp.avg_freighter_time[c.stop][i] +
                             in.stops[c.stop].service_time + cu.service_time);
        m.add_constraint(sym("window_cut", {cu.id}), e, Sense::Le, cu.window_hi);
    }
}

// The truck must reach the drop-in stop before the trip picks the package up.
void add_lead_time_cut(MilpModel& m, const Instance& in, const Compatibility& cp, const TransitBlock& tb) {
    for (std::size_t i = 0; i < in.customers.size(); ++i)
        for (const auto& c : tb.pick[i]) {
            double slack = cp.schedules[c.trip].time_at(c.stop) - cp.avg_truck_time[c.stop] - in.stops[c.stop].service_time;
            LinExpr e;
            e.add(c.var, slack);
            m.add_constraint(sym("lead_time", {in.customers[i].id, in.stops[c.stop].id, in.trips[c.trip].id}), e,
                             Sense::Ge, 0.0);
        }
}

void require_choices(const Instance& in, const TransitBlock& tb) {
    for (std::size_t i = 0; i < in.customers.size(); ++i)
        if (tb.pick[i].empty() || tb.drop[i].empty())
            throw StageInfeasible("T2 infeasible: customer " + in.customers[i].id + " has no usable trip");
}

}  // namespace

// ---------------------------------------------------------------------------
// Tier 2 first.

TierModel build_d2_t2(const Instance& in, const Compatibility& cp, const T2Objective& obj) {
    auto b = std::make_shared<TierBuild>();
    b->kind = TierKind::T2;
    TierModel out{MilpModel("d2-t2", in.id), nullptr};
    MilpModel& m = out.model;
    TransitScope scope;
    scope.pick_stops = cp.s_in_of_customer;
    scope.drop_stops = cp.s_out_of_customer;
    b->transit = add_transit_block(m, in, cp, scope, milp::big_m(in).value);
    require_choices(in, b->transit);
    add_lead_time_cut(m, in, cp, b->transit);
    add_window_cut(m, in, cp, b->transit);
    add_t2_objective(m, in, cp, b->transit, obj, true, true);
    out.build = b;
    return out;
}

TierModel build_t1_from_handoff(const Instance& in, const Compatibility& cp, const TierHandoff& h,
                                const RoutingOptions& opt) {
    auto b = std::make_shared<TierBuild>();
    b->kind = TierKind::T1Handoff;
    TierModel out{MilpModel("t1", in.id), nullptr};
    MilpModel& m = out.model;
    const double M = milp::big_m(in).value;
    const std::size_t nc = in.customers.size();

    std::vector<std::size_t> stop_of(nc);
    std::vector<double> t_in(nc);
    std::set<std::size_t> used;
    for (std::size_t i = 0; i < nc; ++i) {
        const std::string& cid = in.customers[i].id;
        stop_of[i] = stop_index(cp, need(h.b_in, cid, "drop-in stop"));
        t_in[i] = need(h.t_in, cid, "drop-in time");
        const Stop& s = in.stops[stop_of[i]];
        double earliest = cp.avg_truck_time[stop_of[i]] + s.service_time;
        if (t_in[i] + milp::kIntegralityTol < earliest)
            throw StageInfeasible(fmt::format("T1 infeasible: customer {} is due at {} by {} but a truck needs {}", cid,
                                              s.id, t_in[i], earliest));
        used.insert(stop_of[i]);
        b->arrive_after[i] = t_in[i] - s.max_dwell;
    }
    std::vector<std::size_t> stops(used.begin(), used.end());
    LinExpr obj;
    b->trucks = add_truck_block(m, in, stops, M, opt.symmetry_breaking, opt.service.lambda1, obj);

    const std::size_t nd = in.trucks.size();
    std::vector<std::vector<VarRef>> g(nd);
    for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t k = 0; k < stops.size(); ++k) {
            VarRef gv = m.add_binary(sym("g", {in.trucks[d].id, in.stops[stops[k]].id}));
            g[d].push_back(gv);
            LinExpr e;
            e.add(gv);
            for (std::size_t u = 0; u <= stops.size(); ++u)
                if (b->trucks.w[d][u][k + 1]) e.add(*b->trucks.w[d][u][k + 1], -1.0);
            m.add_constraint(sym("visit_link", {in.trucks[d].id, in.stops[stops[k]].id}), e, Sense::Eq, 0.0);
        }
        for (std::size_t i = 0; i < nc; ++i)
            b->r.push_back({i, stop_of[i], d, m.add_binary(sym("r", {in.customers[i].id, in.trucks[d].id}))});
    }
    for (std::size_t i = 0; i < nc; ++i) {
        LinExpr one;
        for (const auto& c : b->r)
            if (c.customer == i) one.add(c.var);
        m.add_constraint(sym("assign_truck", {in.customers[i].id}), one, Sense::Eq, 1.0);
    }
    for (std::size_t d = 0; d < nd; ++d) {
        LinExpr load;
        for (const auto& c : b->r)
            if (c.truck == d) load.add(c.var, in.customers[c.customer].demand);
        m.add_constraint(sym("truck_capacity", {in.trucks[d].id}), load, Sense::Le, in.trucks[d].capacity);
    }
    for (const auto& c : b->r) {
        const std::string& cid = in.customers[c.customer].id;
        const std::string& tid = in.trucks[c.truck].id;
        std::size_t node = *b->trucks.node_of(c.stop);
        VarRef gv = g[c.truck][node - 1];
        VarRef t1 = b->trucks.t1[c.truck][node];
        LinExpr visit;
        visit.add(gv).add(c.var, -1.0);
        m.add_constraint(sym("must_visit", {cid, tid}), visit, Sense::Ge, 0.0);
        LinExpr before;
        before.add(t1).add(c.var, M);
        m.add_constraint(sym("drop_before_pickup", {cid, tid}), before, Sense::Le, t_in[c.customer] + M);
        LinExpr dwell;
        dwell.add(gv, t_in[c.customer]).add(t1, -1.0).add(c.var, M);
        m.add_constraint(sym("dwell_in", {cid, tid}), dwell, Sense::Le, in.stops[c.stop].max_dwell + M);
    }
    m.set_objective(obj);
    out.build = b;
    return out;
}

TierModel build_t3_stopwise(const Instance& in, const Compatibility& cp, const std::string& stop_id,
                            const std::vector<std::string>& customers, const TierHandoff& h,
                            const RoutingOptions& opt) {
    auto b = std::make_shared<TierBuild>();
    b->kind = TierKind::T3Stopwise;
    TierModel out{MilpModel("t3-" + stop_id, in.id), nullptr};
    MilpModel& m = out.model;
    const double M = milp::big_m(in).value;
    std::size_t s = stop_index(cp, stop_id);
    const Stop& home = in.stops[s];
    if (cp.freighters_of_stop[s].empty()) throw StageInfeasible("T3 infeasible at stop " + stop_id + ": no freighter");

    std::vector<std::size_t> idx;
    std::vector<double> t_out;
    for (const auto& cid : customers) {
        std::size_t i = cp.index.customer_at(cid);
        const Customer& cu = in.customers[i];
        double t = need(h.t_out, cid, "drop-out time");
        double earliest = t + home.service_time + cp.avg_freighter_time[s][i] + cu.service_time;
        if (earliest > cu.window_hi + milp::kIntegralityTol)
            throw StageInfeasible(fmt::format("T3 infeasible at stop {}: customer {} reachable at {} after window closes at {}",
                                              stop_id, cid, earliest, cu.window_hi));
        idx.push_back(i);
        t_out.push_back(t);
    }
    LinExpr obj;
    FreighterBlock fb = add_freighter_block(m, in, s, idx, M, opt.symmetry_breaking, opt.service.lambda3, obj);
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
        const std::string& cid = in.customers[idx[pos]].id;
        LinExpr one;
        for (std::size_t kk = 0; kk < fb.freighters.size(); ++kk) {
            one.add(fb.z[kk][pos]);
            const std::string& fid = in.freighters[fb.freighters[kk]].id;
            LinExpr start;
            start.add(fb.t3[kk][0]).add(fb.z[kk][pos], -t_out[pos]);
            m.add_constraint(sym("start_after_drop", {cid, fid}), start, Sense::Ge, home.service_time);
            LinExpr dwell;
            dwell.add(fb.t3[kk][0]).add(fb.z[kk][pos], M);
            m.add_constraint(sym("dwell_out", {cid, fid}), dwell, Sense::Le, home.max_dwell + t_out[pos] + M);
        }
        m.add_constraint(sym("assign_freighter", {cid}), one, Sense::Eq, 1.0);
    }
    b->freighters.push_back(std::move(fb));
    m.set_objective(obj);
    out.build = b;
    return out;
}

// ---------------------------------------------------------------------------
// Tier 1 first.

std::map<std::string, std::map<std::string, int>> preprocess_midday(const Instance& in, const Compatibility& cp) {
    std::map<std::string, std::map<std::string, int>> tau;
    for (std::size_t i = 0; i < in.customers.size(); ++i) {
        const Customer& cu = in.customers[i];
        for (std::size_t s : cp.s_in_of_customer[i]) {
            double latest = cu.window_hi - in.stops[s].max_dwell -
                            kDetourFactor * travel_time(dist(in.stops[s].location, cu.location), in.cost_params);
            tau[cu.id][in.stops[s].id] = latest <= in.cost_params.t_mid_day ? 1 : 2;
        }
    }
    return tau;
}

TierModel build_d1_t1(const Instance& in, const Compatibility& cp,
                      const std::map<std::string, std::map<std::string, int>>& tau, const RoutingOptions& opt) {
    auto b = std::make_shared<TierBuild>();
    b->kind = TierKind::D1T1;
    TierModel out{MilpModel("d1-t1", in.id), nullptr};
    MilpModel& m = out.model;
    const double M = milp::big_m(in).value;
    const double t_mid = in.cost_params.t_mid_day;
    const std::size_t nc = in.customers.size(), nd = in.trucks.size();
    LinExpr obj;
    b->trucks = add_truck_block(m, in, cp.drop_in_stops, M, opt.symmetry_breaking, opt.service.lambda1, obj);

    std::vector<std::vector<VarRef>> gamma(nc);
    for (std::size_t i = 0; i < nc; ++i) {
        const Customer& cu = in.customers[i];
        for (std::size_t s : cp.s_in_of_customer[i]) {
            gamma[i].push_back(m.add_binary(sym("gamma1", {cu.id, in.stops[s].id})));
            for (std::size_t d = 0; d < nd; ++d)
                b->r.push_back({i, s, d, m.add_binary(sym("r", {cu.id, in.stops[s].id, in.trucks[d].id}))});
        }
    }
    for (std::size_t i = 0; i < nc; ++i) {
        const Customer& cu = in.customers[i];
        LinExpr one, pick;
        for (const auto& c : b->r)
            if (c.customer == i) one.add(c.var);
        m.add_constraint(sym("assign_truck", {cu.id}), one, Sense::Eq, 1.0);
        for (std::size_t k = 0; k < cp.s_in_of_customer[i].size(); ++k) {
            std::size_t s = cp.s_in_of_customer[i][k];
            LinExpr link;
            for (const auto& c : b->r)
                if (c.customer == i && c.stop == s) link.add(c.var);
            link.add(gamma[i][k], -1.0);
            m.add_constraint(sym("stop_link", {cu.id, in.stops[s].id}), link, Sense::Eq, 0.0);
            pick.add(gamma[i][k]);
        }
        m.add_constraint(sym("one_stop", {cu.id}), pick, Sense::Eq, 1.0);
    }
    for (std::size_t d = 0; d < nd; ++d) {
        LinExpr load;
        for (const auto& c : b->r)
            if (c.truck == d) load.add(c.var, in.customers[c.customer].demand);
        m.add_constraint(sym("truck_capacity", {in.trucks[d].id}), load, Sense::Le, in.trucks[d].capacity);
        for (std::size_t s : cp.drop_in_stops) {
            std::size_t node = *b->trucks.node_of(s);
            LinExpr e;
            for (std::size_t u = 0; u <= cp.drop_in_stops.size(); ++u)
                if (b->trucks.w[d][u][node]) e.add(*b->trucks.w[d][u][node]);
            bool any = false;
            for (const auto& c : b->r)
                if (c.truck == d && c.stop == s) {
                    e.add(c.var, -1.0 / M);
                    any = true;
                }
            if (any) m.add_constraint(sym("visit_stop", {in.stops[s].id, in.trucks[d].id}), e, Sense::Ge, 0.0);
        }
    }
    for (const auto& c : b->r) {
        const Customer& cu = in.customers[c.customer];
        const Stop& s = in.stops[c.stop];
        const std::string& tid = in.trucks[c.truck].id;
        VarRef t1 = b->trucks.t1[c.truck][*b->trucks.node_of(c.stop)];
        double mid_window = 0.5 * (cu.window_lo + cu.window_hi);
        double latest = mid_window - kDetourFactor * travel_time(dist(s.location, cu.location), in.cost_params);
        LinExpr cut;
        cut.add(t1).add(c.var, M);
        m.add_constraint(sym("early_enough", {cu.id, s.id, tid}), cut, Sense::Le, latest + M);

        int half = 1;
        if (auto ci = tau.find(cu.id); ci != tau.end())
            if (auto si = ci->second.find(s.id); si != ci->second.end()) half = si->second;
        LinExpr pin;
        pin.add(t1);
        if (half == 1) {
            pin.add(c.var, M);
            m.add_constraint(sym("first_half", {cu.id, s.id, tid}), pin, Sense::Le, t_mid + M);
        } else {
            pin.add(c.var, -M);
            b->second_half.insert({c.customer, c.stop});
            m.add_constraint(sym("second_half", {cu.id, s.id, tid}), pin, Sense::Ge, t_mid - M);
        }
    }
    m.set_objective(obj);
    out.build = b;
    return out;
}

TierModel build_d1_t2(const Instance& in, const Compatibility& cp, const TierHandoff& h, const T2Objective& obj) {
    auto b = std::make_shared<TierBuild>();
    b->kind = TierKind::T2;
    TierModel out{MilpModel("d1-t2", in.id), nullptr};
    MilpModel& m = out.model;
    const std::size_t nc = in.customers.size();
    TransitScope scope;
    scope.pick_stops.resize(nc);
    scope.drop_stops = cp.s_out_of_customer;
    scope.pick_family = "gamma1";
    scope.pick_named_by_stop = false;
    std::vector<double> t_in(nc);
    for (std::size_t i = 0; i < nc; ++i) {
        const std::string& cid = in.customers[i].id;
        scope.pick_stops[i] = {stop_index(cp, need(h.b_in, cid, "drop-in stop"))};
        t_in[i] = need(h.t_in, cid, "drop-in time");
    }
    b->transit = add_transit_block(m, in, cp, scope, milp::big_m(in).value);
    for (std::size_t i = 0; i < nc; ++i) {
        const std::string& cid = in.customers[i].id;
        const double V = in.stops[scope.pick_stops[i][0]].max_dwell;
        bool any = false;
        LinExpr pick_time;
        for (const auto& c : b->transit.pick[i]) {
            double t = cp.schedules[c.trip].time_at(c.stop);
            if (t + milp::kIntegralityTol >= t_in[i] && t <= t_in[i] + V + milp::kIntegralityTol) any = true;
            pick_time.add(c.var, t);
        }
        if (!any)
            throw StageInfeasible(fmt::format("T2 infeasible: stranded package for customer {} at {} (no trip in [{}, {}])",
                                              cid, in.stops[scope.pick_stops[i][0]].id, t_in[i], t_in[i] + V));
        m.add_constraint(sym("after_truck", {cid}), pick_time, Sense::Ge, t_in[i]);
        m.add_constraint(sym("dwell_in", {cid}), pick_time, Sense::Le, t_in[i] + V);
    }
    add_window_cut(m, in, cp, b->transit);
    add_t2_objective(m, in, cp, b->transit, obj, false, true);
    out.build = b;
    return out;
}

// ---------------------------------------------------------------------------
// Tier 3 first.

std::map<std::string, double> first_arrivals(const Instance& in, const Compatibility& cp) {
    std::map<std::string, double> first;
    for (std::size_t s : cp.drop_out_stops) {
        double t = milp::kInf;
        for (std::size_t p : cp.trips_of_stop[s]) t = std::min(t, cp.schedules[p].time_at(s));
        if (std::isfinite(t)) first[in.stops[s].id] = t;
    }
    return first;
}

TierModel build_d3_t3(const Instance& in, const Compatibility& cp, const std::map<std::string, double>& t_first,
                      const RoutingOptions& opt) {
    auto b = std::make_shared<TierBuild>();
    b->kind = TierKind::D3T3;
    TierModel out{MilpModel("d3-t3", in.id), nullptr};
    MilpModel& m = out.model;
    const double M = milp::big_m(in).value;
    const std::size_t nc = in.customers.size();

    std::vector<std::vector<std::size_t>> reach(nc);
    std::map<std::size_t, std::vector<std::size_t>> served;  // stop -> customers
    for (std::size_t i = 0; i < nc; ++i) {
        reach[i] = cp.reachable_dropouts(i);
        if (reach[i].empty())
            throw StageInfeasible("T3 infeasible: customer " + in.customers[i].id + " has no reachable drop-out stop");
        for (std::size_t s : reach[i]) served[s].push_back(i);
    }
    LinExpr obj;
    std::map<std::pair<std::size_t, std::size_t>, VarRef> gamma;
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t s : reach[i]) gamma[{i, s}] = m.add_binary(sym("gamma2", {in.customers[i].id, in.stops[s].id}));
    for (auto& [s, cs] : served)
        b->freighters.push_back(add_freighter_block(m, in, s, cs, M, opt.symmetry_breaking, opt.service.lambda3, obj));

    for (std::size_t i = 0; i < nc; ++i) {
        LinExpr one;
        for (std::size_t s : reach[i]) one.add(gamma[{i, s}]);
        m.add_constraint(sym("one_dropout", {in.customers[i].id}), one, Sense::Eq, 1.0);
    }
    std::vector<LinExpr> leaves(nc);
    for (const auto& fb : b->freighters) {
        const Stop& home = in.stops[fb.stop];
        auto ft = t_first.find(home.id);
        if (ft == t_first.end()) throw Error("no first arrival for stop " + home.id);
        for (std::size_t pos = 0; pos < fb.customers.size(); ++pos) {
            std::size_t i = fb.customers[pos];
            LinExpr link;
            for (std::size_t kk = 0; kk < fb.freighters.size(); ++kk) {
                link.add(fb.z[kk][pos]);
                LinExpr start;
                start.add(fb.t3[kk][0]).add(*fb.x[kk][0][pos + 1], -M);
                m.add_constraint(sym("start_after_first", {in.customers[i].id, in.freighters[fb.freighters[kk]].id}),
                                 start, Sense::Ge, ft->second + home.service_time - M);
            }
            link.add(gamma[{i, fb.stop}], -1.0);
            m.add_constraint(sym("dropout_link", {in.customers[i].id, home.id}), link, Sense::Eq, 0.0);
            leaves[i].add(outgoing_arcs(fb, pos));
        }
    }
    for (std::size_t i = 0; i < nc; ++i)
        m.add_constraint(sym("visit_customer", {in.customers[i].id}), leaves[i], Sense::Eq, 1.0);
    m.set_objective(obj);
    out.build = b;
    return out;
}

Repair repair_d3_times(const Instance& in, const std::vector<FreighterRoute>& routes) {
    InstanceIndex ix(in);
    const CostParams& cp = in.cost_params;
    Repair rep;
    for (const auto& route : routes) {
        FreighterRoute r = route;
        if (r.visits.empty()) {
            rep.routes.push_back(r);
            continue;
        }
        const Stop& home = in.stops[ix.stop_at(in.freighters[ix.freighter_at(r.freighter)].home_stop)];
        std::size_t n = r.visits.size();
        for (std::size_t k = n; k-- > 0;) {
            const Customer& cu = in.customers[ix.customer_at(r.visits[k].customer)];
            double t = cu.window_hi;
            if (k + 1 < n) {
                const Customer& next = in.customers[ix.customer_at(r.visits[k + 1].customer)];
                t = std::min(t, r.visits[k + 1].time - travel_time(dist(cu.location, next.location), cp) -
                                    next.service_time);
            }
            r.visits[k].time = t;
            if (t + 1e-9 < cu.window_lo)
                rep.warnings.push_back(fmt::format("repaired time {} for {} precedes window start {}", t, cu.id,
                                                   cu.window_lo));
        }
        const Customer& first = in.customers[ix.customer_at(r.visits[0].customer)];
        r.departure = r.visits[0].time - travel_time(dist(home.location, first.location), cp) - first.service_time;
        for (const auto& v : r.visits) rep.t_out[v.customer] = r.departure;
        rep.routes.push_back(std::move(r));
    }
    return rep;
}

TierModel build_d3_t2(const Instance& in, const Compatibility& cp, const TierHandoff& h, const T2Objective& obj) {
    if (obj.tag == T2Tag::Obj3) throw Error("obj3 is not available when tier 3 is solved first");
    auto b = std::make_shared<TierBuild>();
    b->kind = TierKind::T2;
    TierModel out{MilpModel("d3-t2", in.id), nullptr};
    MilpModel& m = out.model;
    const std::size_t nc = in.customers.size();
    TransitScope scope;
    scope.pick_stops = cp.s_in_of_customer;
    scope.drop_stops.resize(nc);
    scope.drop_family = "gamma2";
    scope.drop_named_by_stop = false;
    std::vector<double> t_out(nc);
    for (std::size_t i = 0; i < nc; ++i) {
        const std::string& cid = in.customers[i].id;
        scope.drop_stops[i] = {stop_index(cp, need(h.b_out, cid, "drop-out stop"))};
        t_out[i] = need(h.t_out, cid, "drop-out time");
    }
    b->transit = add_transit_block(m, in, cp, scope, milp::big_m(in).value);
    require_choices(in, b->transit);
    for (std::size_t i = 0; i < nc; ++i) {
        const std::string& cid = in.customers[i].id;
        const Stop& s = in.stops[scope.drop_stops[i][0]];
        LinExpr drop_time;
        for (const auto& c : b->transit.drop[i]) {
            double t = cp.schedules[c.trip].time_at(c.stop);
            drop_time.add(c.var, t);
            LinExpr e;
            e.add(c.var, t);
            m.add_constraint(sym("deadline", {cid, in.trips[c.trip].id}), e, Sense::Le, t_out[i] - s.service_time);
        }
        m.add_constraint(sym("dwell_out", {cid}), drop_time, Sense::Ge, t_out[i] - s.max_dwell);
    }
    add_lead_time_cut(m, in, cp, b->transit);
    add_t2_objective(m, in, cp, b->transit, obj, true, false);
    out.build = b;
    return out;
}

// ---------------------------------------------------------------------------
// Decoding.

TierHandoff decode_t2(const Instance& in, const Compatibility& cp, const TierModel& tm, const SolveResult& res,
                      TierHandoff h) {
    if (!res.has_solution()) throw milp::DecodeError("no solution to decode");
    const TierBuild& b = *tm.build;
    for (std::size_t i = 0; i < in.customers.size(); ++i) {
        const std::string& cid = in.customers[i].id;
        auto pick = chosen(res, b.transit.pick[i]);
        auto drop = chosen(res, b.transit.drop[i]);
        if (!pick || !drop) throw milp::DecodeError("customer " + cid + " has no transit leg");
        const auto& pc = b.transit.pick[i][*pick];
        const auto& dc = b.transit.drop[i][*drop];
        h.b_in[cid] = in.stops[pc.stop].id;
        h.b_out[cid] = in.stops[dc.stop].id;
        h.trip[cid] = in.trips[pc.trip].id;
        if (!h.t_in.count(cid)) h.t_in[cid] = cp.schedules[pc.trip].time_at(pc.stop);
        if (!h.t_out.count(cid)) h.t_out[cid] = cp.schedules[dc.trip].time_at(dc.stop);
    }
    return h;
}

T1Solution decode_t1(const Instance& in, const Compatibility&, const TierModel& tm, const SolveResult& res) {
    if (!res.has_solution()) throw milp::DecodeError("no solution to decode");
    const TierBuild& b = *tm.build;
    const double t_mid = in.cost_params.t_mid_day;
    T1Solution sol;
    std::map<std::pair<std::size_t, std::size_t>, double> lower;  // (truck, stop) -> earliest visit
    for (const auto& c : b.r) {
        if (!milp::is_one(res, c.var)) continue;
        const std::string& cid = in.customers[c.customer].id;
        if (sol.truck_of.count(cid)) throw milp::DecodeError("customer " + cid + " assigned twice");
        sol.truck_of[cid] = in.trucks[c.truck].id;
        sol.stop_of[cid] = in.stops[c.stop].id;
        double lo = -milp::kInf;
        if (b.kind == TierKind::T1Handoff) lo = b.arrive_after.at(c.customer);
        if (b.second_half.count({c.customer, c.stop})) lo = t_mid;
        auto [it, fresh] = lower.emplace(std::make_pair(c.truck, c.stop), lo);
        if (!fresh) it->second = std::max(it->second, lo);
    }
    for (std::size_t i = 0; i < in.customers.size(); ++i)
        if (!sol.truck_of.count(in.customers[i].id))
            throw milp::DecodeError("customer " + in.customers[i].id + " has no truck");

    auto routes = decode_truck_routes(b.trucks, res);
    for (std::size_t d = 0; d < routes.size(); ++d) {
        if (routes[d].empty()) continue;
        TruckRoute r{in.trucks[d].id, {}};
        Point at = in.cdc;
        double t = 0.0;
        for (std::size_t s : routes[d]) {
            const Stop& st = in.stops[s];
            t += travel_time(dist(at, st.location), in.cost_params) + st.service_time;
            if (auto it = lower.find({d, s}); it != lower.end()) t = std::max(t, it->second);
            r.visits.push_back(TruckVisit{st.id, t});
            at = st.location;
        }
        sol.routes.push_back(std::move(r));
    }
    return sol;
}

T3Solution decode_t3(const Instance& in, const TierModel& tm, const SolveResult& res) {
    if (!res.has_solution()) throw milp::DecodeError("no solution to decode");
    const TierBuild& b = *tm.build;
    T3Solution sol;
    for (const auto& fb : b.freighters) {
        for (std::size_t pos = 0; pos < fb.customers.size(); ++pos)
            for (std::size_t kk = 0; kk < fb.freighters.size(); ++kk)
                if (milp::is_one(res, fb.z[kk][pos])) {
                    const std::string& cid = in.customers[fb.customers[pos]].id;
                    if (sol.freighter_of.count(cid)) throw milp::DecodeError("customer " + cid + " served twice");
                    sol.freighter_of[cid] = in.freighters[fb.freighters[kk]].id;
                    sol.stop_of[cid] = in.stops[fb.stop].id;
                }
        auto seqs = decode_freighter_routes(fb, res);
        for (std::size_t kk = 0; kk < seqs.size(); ++kk) {
            if (seqs[kk].empty()) continue;
            FreighterRoute r{in.freighters[fb.freighters[kk]].id, 0.0, {}};
            for (std::size_t c : seqs[kk]) r.visits.push_back(FreighterVisit{in.customers[c].id, 0.0});
            sol.routes.push_back(std::move(r));
        }
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Handoff documents.

std::string serialize_handoff(const TierHandoff& h) {
    detail::json doc;
    doc["schema"] = kHandoffSchema;
    doc["b_in"] = h.b_in;
    doc["t_in"] = h.t_in;
    doc["b_out"] = h.b_out;
    doc["t_out"] = h.t_out;
    doc["trip"] = h.trip;
    doc["tau"] = h.tau;
    doc["t_first"] = h.t_first;
    return doc.dump(2) + "\n";
}

TierHandoff parse_handoff(const std::string& text) {
    detail::json doc;
    try {
        doc = detail::json::parse(text);
    } catch (const detail::json::parse_error& e) {
        throw InstanceError("", std::string("malformed handoff: ") + e.what());
    }
    if (doc.value("schema", "") != kHandoffSchema) throw InstanceError("schema", "not a handoff document");
    TierHandoff h;
    try {
        if (doc.contains("b_in")) doc["b_in"].get_to(h.b_in);
        if (doc.contains("t_in")) doc["t_in"].get_to(h.t_in);
        if (doc.contains("b_out")) doc["b_out"].get_to(h.b_out);
        if (doc.contains("t_out")) doc["t_out"].get_to(h.t_out);
        if (doc.contains("trip")) doc["trip"].get_to(h.trip);
        if (doc.contains("tau")) doc["tau"].get_to(h.tau);
        if (doc.contains("t_first")) doc["t_first"].get_to(h.t_first);
    } catch (const detail::json::exception& e) {
        throw InstanceError("", std::string("malformed handoff: ") + e.what());
    }
    return h;
}

}  // namespace tdppt::models
