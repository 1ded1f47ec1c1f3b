#include "tdppt/plan.hpp"

#include <algorithm>
#include <unordered_map>

#include "json_fields.hpp"

namespace tdppt {

using detail::json;

CostBreakdown route_costs(const Instance& in, const Plan& plan) {
    InstanceIndex ix(in);
    const CostParams& cp = in.cost_params;
    CostBreakdown c;
    std::size_t arrivals = 0, departures = 0;
    for (const auto& r : plan.truck_routes) {
        if (r.visits.empty()) continue;
        Point at = in.cdc;
        for (const auto& v : r.visits) {
            const Point& next = in.stops[ix.stop_at(v.stop)].location;
            c.t1_cost += cp.truck_cost_per_distance * euclidean_distance(at, next);
            at = next;
            ++arrivals;
        }
        c.t1_cost += cp.truck_cost_per_distance * euclidean_distance(at, in.cdc);
    }
    for (const auto& r : plan.freighter_routes) {
        if (r.visits.empty()) continue;
        const Point& home = in.stops[ix.stop_at(in.freighters[ix.freighter_at(r.freighter)].home_stop)].location;
        Point at = home;
        for (const auto& v : r.visits) {
            const Point& next = in.customers[ix.customer_at(v.customer)].location;
            c.t3_cost += cp.freighter_cost_scale * euclidean_distance(at, next);
            at = next;
        }
        c.t3_cost += cp.freighter_cost_scale * euclidean_distance(at, home);
        ++departures;
    }
    c.service_cost = plan.service.lambda1 * static_cast<double>(arrivals) +
                     plan.service.lambda3 * static_cast<double>(departures);
    c.total = c.t1_cost + c.t3_cost + c.service_cost;
    return c;
}

double vrptw_cost(const Instance& in, const VrptwPlan& plan) {
    InstanceIndex ix(in);
    double total = 0.0;
    for (const auto& r : plan.routes) {
        if (r.visits.empty()) continue;
        Point at = in.cdc;
        for (const auto& v : r.visits) {
            const Point& next = in.customers[ix.customer_at(v.customer)].location;
            total += in.cost_params.truck_cost_per_distance * euclidean_distance(at, next);
            at = next;
        }
        total += in.cost_params.truck_cost_per_distance * euclidean_distance(at, in.cdc);
    }
    return total;
}

void assign_earliest_times(const Instance& in, Plan& plan) {
    InstanceIndex ix(in);
    const CostParams& cp = in.cost_params;

    std::unordered_map<std::string, Itinerary*> by_customer;
    for (auto& it : plan.itineraries) {
        const Trip& trip = in.trips[ix.trip_at(it.trip)];
        auto out = trip.stop_times.find(it.drop_out_stop);
        if (out == trip.stop_times.end()) throw Error("trip " + it.trip + " does not visit " + it.drop_out_stop);
        it.drop_out_time = out->second;
        by_customer[it.customer] = &it;
    }

    for (auto& r : plan.truck_routes) {
        Point at = in.cdc;
        double t = 0.0;
        for (auto& v : r.visits) {
            const Stop& s = in.stops[ix.stop_at(v.stop)];
            t += travel_time(euclidean_distance(at, s.location), cp) + s.service_time;
            for (const auto& it : plan.itineraries) {
                if (it.truck != r.truck || it.drop_in_stop != v.stop) continue;
                const Trip& trip = in.trips[ix.trip_at(it.trip)];
                auto pick = trip.stop_times.find(v.stop);
                if (pick == trip.stop_times.end()) throw Error("trip " + it.trip + " does not visit " + v.stop);
                t = std::max(t, pick->second - s.max_dwell);
            }
            v.time = t;
            at = s.location;
        }
        for (auto& it : plan.itineraries) {
            if (it.truck != r.truck) continue;
            for (const auto& v : r.visits)
                if (v.stop == it.drop_in_stop) it.drop_in_time = v.time;
        }
    }

    for (auto& r : plan.freighter_routes) {
        const Stop& home = in.stops[ix.stop_at(in.freighters[ix.freighter_at(r.freighter)].home_stop)];
        double dep = 0.0;
        for (const auto& v : r.visits) {
            auto f = by_customer.find(v.customer);
            if (f == by_customer.end()) throw Error("freighter visits customer without itinerary " + v.customer);
            dep = std::max(dep, f->second->drop_out_time + home.service_time);
        }
        r.departure = dep;
        Point at = home.location;
        double t = dep;
        for (auto& v : r.visits) {
            const Customer& c = in.customers[ix.customer_at(v.customer)];
            t = std::max(c.window_lo, t + travel_time(euclidean_distance(at, c.location), cp) + c.service_time);
            v.time = t;
            at = c.location;
            by_customer[v.customer]->delivery_time = t;
        }
    }
    plan.cost = route_costs(in, plan);
}

void assign_earliest_times(const Instance& in, VrptwPlan& plan) {
    InstanceIndex ix(in);
    for (auto& r : plan.routes) {
        Point at = in.cdc;
        double t = 0.0;
        for (auto& v : r.visits) {
            const Customer& c = in.customers[ix.customer_at(v.customer)];
            t = std::max(c.window_lo, t + travel_time(euclidean_distance(at, c.location), in.cost_params) +
                                          c.service_time);
            v.time = t;
            at = c.location;
        }
    }
    plan.total_cost = vrptw_cost(in, plan);
}

std::string serialize_plan(const Plan& p) {
    json doc;
    doc["schema"] = kPlanSchema;
    doc["instance"] = p.instance_id;
    doc["method"] = p.method;
    doc["itineraries"] = json::array();
    for (const auto& it : p.itineraries)
        doc["itineraries"].push_back({{"customer", it.customer},
                                      {"truck", it.truck},
                                      {"drop_in_stop", it.drop_in_stop},
                                      {"drop_in_time", it.drop_in_time},
                                      {"trip", it.trip},
                                      {"drop_out_stop", it.drop_out_stop},
                                      {"drop_out_time", it.drop_out_time},
                                      {"freighter", it.freighter},
                                      {"delivery_time", it.delivery_time}});
    doc["truck_routes"] = json::array();
    for (const auto& r : p.truck_routes) {
        json visits = json::array();
        for (const auto& v : r.visits) visits.push_back({{"stop", v.stop}, {"time", v.time}});
        doc["truck_routes"].push_back({{"truck", r.truck}, {"visits", visits}});
    }
    doc["freighter_routes"] = json::array();
    for (const auto& r : p.freighter_routes) {
        json visits = json::array();
        for (const auto& v : r.visits) visits.push_back({{"customer", v.customer}, {"time", v.time}});
        doc["freighter_routes"].push_back({{"freighter", r.freighter}, {"departure", r.departure}, {"visits", visits}});
    }
    doc["service"] = {{"lambda1", p.service.lambda1}, {"lambda3", p.service.lambda3}};
    doc["cost"] = {{"t1_cost", p.cost.t1_cost},
                   {"t3_cost", p.cost.t3_cost},
                   {"service_cost", p.cost.service_cost},
                   {"total", p.cost.total}};
    return doc.dump(2) + "\n";
}

Plan parse_plan(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InstanceError("", std::string("malformed plan: ") + e.what());
    }
    if (doc.contains("schema") && doc["schema"] != kPlanSchema) throw InstanceError("schema", "not a plan document");
    Plan p;
    p.instance_id = doc.value("instance", "");
    p.method = doc.value("method", "");
    const json& its = detail::array(doc, "itineraries", "");
    for (std::size_t i = 0; i < its.size(); ++i) {
        std::string path = detail::item("", "itineraries", i);
        const json& j = its[i];
        p.itineraries.push_back(Itinerary{
            detail::text(j, "customer", path), detail::text(j, "truck", path), detail::text(j, "drop_in_stop", path),
            detail::number(j, "drop_in_time", path), detail::text(j, "trip", path),
            detail::text(j, "drop_out_stop", path), detail::number(j, "drop_out_time", path),
            detail::text(j, "freighter", path), detail::number(j, "delivery_time", path)});
    }
    const json& trs = detail::array(doc, "truck_routes", "");
    for (std::size_t i = 0; i < trs.size(); ++i) {
        std::string path = detail::item("", "truck_routes", i);
        TruckRoute r{detail::text(trs[i], "truck", path), {}};
        const json& vs = detail::array(trs[i], "visits", path);
        for (std::size_t k = 0; k < vs.size(); ++k) {
            std::string vp = detail::item(path, "visits", k);
            r.visits.push_back(TruckVisit{detail::text(vs[k], "stop", vp), detail::number(vs[k], "time", vp)});
        }
        p.truck_routes.push_back(std::move(r));
    }
    const json& frs = detail::array(doc, "freighter_routes", "");
    for (std::size_t i = 0; i < frs.size(); ++i) {
        std::string path = detail::item("", "freighter_routes", i);
        FreighterRoute r{detail::text(frs[i], "freighter", path), detail::number(frs[i], "departure", path), {}};
        const json& vs = detail::array(frs[i], "visits", path);
        for (std::size_t k = 0; k < vs.size(); ++k) {
            std::string vp = detail::item(path, "visits", k);
            r.visits.push_back(
                FreighterVisit{detail::text(vs[k], "customer", vp), detail::number(vs[k], "time", vp)});
        }
        p.freighter_routes.push_back(std::move(r));
    }
    if (doc.contains("service")) {
        p.service.lambda1 = detail::number_or(doc["service"], "lambda1", "service", 0.0);
        p.service.lambda3 = detail::number_or(doc["service"], "lambda3", "service", 0.0);
    }
    if (doc.contains("cost")) {
        const json& c = doc["cost"];
        p.cost = CostBreakdown{detail::number(c, "t1_cost", "cost"), detail::number(c, "t3_cost", "cost"),
                               detail::number(c, "service_cost", "cost"), detail::number(c, "total", "cost")};
    }
    return p;
}

std::string serialize_vrptw_plan(const VrptwPlan& p) {
    json doc;
    doc["schema"] = kVrptwPlanSchema;
    doc["instance"] = p.instance_id;
    doc["routes"] = json::array();
    for (const auto& r : p.routes) {
        json visits = json::array();
        for (const auto& v : r.visits) visits.push_back({{"customer", v.customer}, {"time", v.time}});
        doc["routes"].push_back({{"truck", r.truck}, {"visits", visits}});
    }
    doc["total_cost"] = p.total_cost;
    return doc.dump(2) + "\n";
}

VrptwPlan parse_vrptw_plan(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InstanceError("", std::string("malformed plan: ") + e.what());
    }
    if (doc.contains("schema") && doc["schema"] != kVrptwPlanSchema)
        throw InstanceError("schema", "not a VRPTW plan document");
    VrptwPlan p;
    p.instance_id = doc.value("instance", "");
    const json& rs = detail::array(doc, "routes", "");
    for (std::size_t i = 0; i < rs.size(); ++i) {
        std::string path = detail::item("", "routes", i);
        VrptwRoute r{detail::text(rs[i], "truck", path), {}};
        const json& vs = detail::array(rs[i], "visits", path);
        for (std::size_t k = 0; k < vs.size(); ++k) {
            std::string vp = detail::item(path, "visits", k);
            r.visits.push_back(VrptwVisit{detail::text(vs[k], "customer", vp), detail::number(vs[k], "time", vp)});
        }
        p.routes.push_back(std::move(r));
    }
    p.total_cost = detail::number(doc, "total_cost", "");
    return p;
}

}  // namespace tdppt
