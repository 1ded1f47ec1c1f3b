#include "tdppt/models/vrptw.hpp"

#include "common.hpp"

namespace tdppt::models {

struct VrptwBuild {
    // [d][from][to]; node 0 is the CDC, 1..n customers, n+1 the CDC copy
    std::vector<std::vector<std::vector<std::optional<VarRef>>>> w;
};

VrptwModel build_vrptw(const Instance& in, bool symmetry) {
    auto b = std::make_shared<VrptwBuild>();
    VrptwModel out{MilpModel("vrptw", in.id), nullptr};
    MilpModel& m = out.model;
    const double M = milp::big_m(in).value;
    const CostParams& cp = in.cost_params;
    const std::size_t n = in.customers.size(), end = n + 1, nd = in.trucks.size();
    auto label = [&](std::size_t node) -> std::string {
        return node == 0 ? "o" : node == end ? "o'" : in.customers[node - 1].id;
    };
    auto loc = [&](std::size_t node) -> const Point& {
        return node == 0 || node == end ? in.cdc : in.customers[node - 1].location;
    };

    LinExpr obj;
    std::vector<std::vector<VarRef>> r(nd), t(nd);
    b->w.assign(nd, std::vector<std::vector<std::optional<VarRef>>>(n + 1, std::vector<std::optional<VarRef>>(n + 2)));
    for (std::size_t d = 0; d < nd; ++d) {
        const std::string& tid = in.trucks[d].id;
        for (std::size_t i = 1; i <= n; ++i) r[d].push_back(m.add_binary(sym("r", {label(i), tid})));
        for (std::size_t u = 0; u <= n; ++u)
            for (std::size_t v = 1; v <= end; ++v) {
                if (u == v) continue;
                VarRef w = m.add_binary(sym("w", {label(u), label(v), tid}));
                b->w[d][u][v] = w;
                obj.add(w, cp.truck_cost_per_distance * dist(loc(u), loc(v)));
            }
        for (std::size_t u = 0; u <= n; ++u) t[d].push_back(m.add_continuous(sym("t", {label(u), tid})));
    }

    for (std::size_t i = 1; i <= n; ++i) {
        LinExpr one;
        for (std::size_t d = 0; d < nd; ++d) one.add(r[d][i - 1]);
        m.add_constraint(sym("assign_truck", {label(i)}), one, Sense::Eq, 1.0);
    }
    for (std::size_t d = 0; d < nd; ++d) {
        const std::string& tid = in.trucks[d].id;
        LinExpr load, start, finish;
        for (std::size_t i = 1; i <= n; ++i) load.add(r[d][i - 1], in.customers[i - 1].demand);
        m.add_constraint(sym("truck_capacity", {tid}), load, Sense::Le, in.trucks[d].capacity);
        for (std::size_t v = 1; v <= end; ++v) start.add(*b->w[d][0][v]);
        for (std::size_t u = 0; u <= n; ++u) finish.add(*b->w[d][u][end]);
        m.add_constraint(sym("truck_start", {tid}), start, Sense::Eq, 1.0);
        m.add_constraint(sym("truck_end", {tid}), finish, Sense::Eq, 1.0);
        for (std::size_t i = 1; i <= n; ++i) {
            LinExpr bal, link;
            for (std::size_t v = 1; v <= end; ++v)
                if (v != i) bal.add(*b->w[d][i][v]);
            for (std::size_t u = 0; u <= n; ++u)
                if (u != i) {
                    bal.add(*b->w[d][u][i], -1.0);
                    link.add(*b->w[d][u][i]);
                }
            link.add(r[d][i - 1], -1.0);
            m.add_constraint(sym("truck_balance", {label(i), tid}), bal, Sense::Eq, 0.0);
            m.add_constraint(sym("route_link", {label(i), tid}), link, Sense::Eq, 0.0);

            const Customer& cu = in.customers[i - 1];
            for (std::size_t u = 0; u <= n; ++u) {
                if (u == i) continue;
                LinExpr e;
                e.add(t[d][i]).add(t[d][u], -1.0).add(*b->w[d][u][i], -M);
                m.add_constraint(sym("truck_time", {label(u), label(i), tid}), e, Sense::Ge,
                                 travel_time(dist(loc(u), loc(i)), cp) + cu.service_time - M);
            }
            LinExpr lo, hi;
            lo.add(t[d][i]).add(r[d][i - 1], -M);
            hi.add(t[d][i]).add(r[d][i - 1], M);
            m.add_constraint(sym("window_lo", {label(i), tid}), lo, Sense::Ge, cu.window_lo - M);
            m.add_constraint(sym("window_hi", {label(i), tid}), hi, Sense::Le, cu.window_hi + M);
        }
    }
    if (symmetry) {
        for (std::size_t d = 0; d + 1 < nd; ++d) {
            LinExpr used, size;
            for (std::size_t v = 1; v <= n; ++v) used.add(*b->w[d][0][v]).add(*b->w[d + 1][0][v], -1.0);
            for (std::size_t u = 0; u <= n; ++u)
                for (std::size_t v = 1; v <= end; ++v)
                    if (u != v) size.add(*b->w[d][u][v]).add(*b->w[d + 1][u][v], -1.0);
            m.add_constraint(sym("truck_sym_used", {in.trucks[d].id}), used, Sense::Ge, 0.0);
            m.add_constraint(sym("truck_sym_size", {in.trucks[d].id}), size, Sense::Ge, 0.0);
        }
    }
    m.set_objective(obj);
    out.build = b;
    return out;
}

VrptwPlan decode_vrptw(const Instance& in, const VrptwModel& vm, const SolveResult& res) {
    if (!res.has_solution()) throw milp::DecodeError("no solution to decode");
    const auto& w = vm.build->w;
    const std::size_t n = in.customers.size(), end = n + 1;
    VrptwPlan plan;
    plan.instance_id = in.id;
    for (std::size_t d = 0; d < w.size(); ++d) {
        VrptwRoute route{in.trucks[d].id, {}};
        std::size_t at = 0;
        for (std::size_t steps = 0;; ++steps) {
            if (steps > n) throw milp::DecodeError("truck route does not return to the CDC");
            std::optional<std::size_t> next;
            for (std::size_t v = 1; v <= end; ++v)
                if (w[d][at][v] && milp::is_one(res, *w[d][at][v])) {
                    if (next) throw milp::DecodeError("truck leaves a node twice");
                    next = v;
                }
            if (!next) throw milp::DecodeError("truck route is broken");
            if (*next == end) break;
            route.visits.push_back(VrptwVisit{in.customers[*next - 1].id, 0.0});
            at = *next;
        }
        if (!route.visits.empty()) plan.routes.push_back(std::move(route));
    }
    assign_earliest_times(in, plan);
    return plan;
}

}  // namespace tdppt::models
