#include "tdppt/models/full.hpp"

#include "common.hpp"

namespace tdppt::models {

struct FullBuild {
    TruckBlock trucks;
    TransitBlock transit;
    std::vector<FreighterBlock> freighters;  // one per drop-out stop
    // r[i] lists (stop, truck, var)
    struct TruckChoice {
        std::size_t stop, truck;
        VarRef var;
    };
    std::vector<std::vector<TruckChoice>> r;
};

FullModel build_full(const Instance& in, const Compatibility& cp, const FullOptions& opt) {
    auto b = std::make_shared<FullBuild>();
    FullModel out{MilpModel("full", in.id), nullptr, opt.service};
    MilpModel& m = out.model;
    const double M = milp::big_m(in).value;
    const std::size_t nc = in.customers.size();
    LinExpr obj;

    b->trucks = add_truck_block(m, in, cp.drop_in_stops, M, opt.symmetry_breaking, opt.service.lambda1, obj);

    TransitScope scope;
    scope.pick_stops = cp.s_in_of_customer;
    scope.drop_stops = cp.s_out_of_customer;
    b->transit = add_transit_block(m, in, cp, scope, M);

    b->r.assign(nc, {});
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t s : cp.s_in_of_customer[i])
            for (std::size_t d = 0; d < in.trucks.size(); ++d)
                b->r[i].push_back({s, d, m.add_binary(sym("r", {in.customers[i].id, in.stops[s].id, in.trucks[d].id}))});

    for (std::size_t s : cp.drop_out_stops)
        b->freighters.push_back(
            add_freighter_block(m, in, s, cp.customers_of_dropout[s], M, opt.symmetry_breaking, opt.service.lambda3, obj));

    // Tier 1 assignment.
    for (std::size_t i = 0; i < nc; ++i) {
        LinExpr one;
        for (const auto& c : b->r[i]) one.add(c.var);
        m.add_constraint(sym("assign_truck", {in.customers[i].id}), one, Sense::Eq, 1.0);
    }
    for (std::size_t d = 0; d < in.trucks.size(); ++d) {
        LinExpr load;
        for (std::size_t i = 0; i < nc; ++i)
            for (const auto& c : b->r[i])
                if (c.truck == d) load.add(c.var, in.customers[i].demand);
        m.add_constraint(sym("truck_capacity", {in.trucks[d].id}), load, Sense::Le, in.trucks[d].capacity);
    }
    // A truck carrying a package to a stop must visit it (1/M coupling).
    for (std::size_t d = 0; d < in.trucks.size(); ++d) {
        for (std::size_t s : cp.drop_in_stops) {
            std::size_t node = *b->trucks.node_of(s);
            LinExpr e;
            for (std::size_t u = 0; u <= cp.drop_in_stops.size(); ++u)
                if (b->trucks.w[d][u][node]) e.add(*b->trucks.w[d][u][node]);
            bool any = false;
            for (std::size_t i = 0; i < nc; ++i)
                for (const auto& c : b->r[i])
                    if (c.truck == d && c.stop == s) {
                        e.add(c.var, -1.0 / M);
                        any = true;
                    }
            if (any) m.add_constraint(sym("visit_stop", {in.stops[s].id, in.trucks[d].id}), e, Sense::Ge, 0.0);
        }
    }

    for (std::size_t i = 0; i < nc; ++i) {
        const std::string& cid = in.customers[i].id;
        for (std::size_t s : cp.s_in_of_customer[i]) {
            LinExpr link, pick_time;
            for (const auto& c : b->r[i])
                if (c.stop == s) link.add(c.var);
            for (const auto& pc : b->transit.pick[i])
                if (pc.stop == s) {
                    link.add(pc.var, -1.0);
                    pick_time.add(pc.var, cp.schedules[pc.trip].time_at(s));
                }
            m.add_constraint(sym("handoff_in", {cid, in.stops[s].id}), link, Sense::Eq, 0.0);

            std::size_t node = *b->trucks.node_of(s);
            for (const auto& c : b->r[i]) {
                if (c.stop != s) continue;
                VarRef t1 = b->trucks.t1[c.truck][node];
                // t1 <= sum T y1 + M(1 - r)
                LinExpr before;
                before.add(t1).add(pick_time, -1.0).add(c.var, M);
                m.add_constraint(sym("drop_before_pickup", {cid, in.stops[s].id, in.trucks[c.truck].id}), before,
                                 Sense::Le, M);
                // sum T y1 - t1 <= V + M(1 - r)
                LinExpr dwell;
                dwell.add(pick_time).add(t1, -1.0).add(c.var, M);
                m.add_constraint(sym("dwell_in", {cid, in.stops[s].id, in.trucks[c.truck].id}), dwell, Sense::Le,
                                 in.stops[s].max_dwell + M);
            }
        }
    }

    // Tier 3 coupling.
    std::vector<LinExpr> leaves(nc);
    for (const auto& fb : b->freighters) {
        const Stop& home = in.stops[fb.stop];
        for (std::size_t pos = 0; pos < fb.customers.size(); ++pos) {
            std::size_t i = fb.customers[pos];
            const std::string& cid = in.customers[i].id;
            LinExpr link, drop_time;
            for (std::size_t kk = 0; kk < fb.freighters.size(); ++kk) link.add(fb.z[kk][pos]);
            for (const auto& dc : b->transit.drop[i])
                if (dc.stop == fb.stop) {
                    link.add(dc.var, -1.0);
                    drop_time.add(dc.var, cp.schedules[dc.trip].time_at(fb.stop));
                }
            m.add_constraint(sym("handoff_out", {cid, home.id}), link, Sense::Eq, 0.0);
            leaves[i].add(outgoing_arcs(fb, pos));

            for (std::size_t kk = 0; kk < fb.freighters.size(); ++kk) {
                const std::string& fid = in.freighters[fb.freighters[kk]].id;
                VarRef t3 = fb.t3[kk][0];
                VarRef z = fb.z[kk][pos];
                // t3_s >= sum T y2 + T' - M(1 - z)
                LinExpr after;
                after.add(t3).add(drop_time, -1.0).add(z, -M);
                m.add_constraint(sym("start_after_drop", {cid, fid}), after, Sense::Ge, home.service_time - M);
                // t3_s - sum T y2 <= V + M(1 - z)
                LinExpr dwell;
                dwell.add(t3).add(drop_time, -1.0).add(z, M);
                m.add_constraint(sym("dwell_out", {cid, fid}), dwell, Sense::Le, home.max_dwell + M);
            }
        }
    }
    for (std::size_t i = 0; i < nc; ++i)
        m.add_constraint(sym("visit_customer", {in.customers[i].id}), leaves[i], Sense::Eq, 1.0);

    m.set_objective(obj);
    m.metadata["symmetry_breaking"] = opt.symmetry_breaking ? "on" : "off";
    out.build = b;
    return out;
}

Plan decode_full(const Instance& in, const FullModel& full, const SolveResult& res) {
    if (!res.has_solution()) throw milp::DecodeError("no solution to decode");
    const FullBuild& b = *full.build;
    const std::size_t nc = in.customers.size();
    std::vector<Assignment> as(nc);
    for (std::size_t i = 0; i < nc; ++i) {
        const std::string& cid = in.customers[i].id;
        int found = 0;
        for (const auto& c : b.r[i])
            if (milp::is_one(res, c.var)) {
                as[i].truck = c.truck;
                as[i].drop_in = c.stop;
                ++found;
            }
        if (found != 1) throw milp::DecodeError("customer " + cid + " has no unique truck assignment");
        auto pick = chosen(res, b.transit.pick[i]);
        auto drop = chosen(res, b.transit.drop[i]);
        if (!pick || !drop) throw milp::DecodeError("customer " + cid + " has no transit leg");
        as[i].trip = b.transit.pick[i][*pick].trip;
        as[i].drop_out = b.transit.drop[i][*drop].stop;
        found = 0;
        for (const auto& fb : b.freighters) {
            for (std::size_t pos = 0; pos < fb.customers.size(); ++pos) {
                if (fb.customers[pos] != i) continue;
                for (std::size_t kk = 0; kk < fb.freighters.size(); ++kk)
                    if (milp::is_one(res, fb.z[kk][pos])) {
                        as[i].freighter = fb.freighters[kk];
                        ++found;
                    }
            }
        }
        if (found != 1) throw milp::DecodeError("customer " + cid + " has no unique freighter");
    }

    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> trucks, freighters;
    auto truck_seq = decode_truck_routes(b.trucks, res);
    for (std::size_t d = 0; d < truck_seq.size(); ++d) trucks.emplace_back(d, truck_seq[d]);
    for (const auto& fb : b.freighters) {
        auto seq = decode_freighter_routes(fb, res);
        for (std::size_t kk = 0; kk < seq.size(); ++kk) freighters.emplace_back(fb.freighters[kk], seq[kk]);
    }
    return assemble_plan(in, "full", as, trucks, freighters, full.service);
}

}  // namespace tdppt::models
