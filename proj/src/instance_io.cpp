#include "tdppt/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "json_fields.hpp"

namespace tdppt {

using detail::json;

namespace {

CostParams parse_cost_params(const json& j) {
    const std::string p = "cost_params";
    CostParams c;
    c.truck_cost_per_distance = detail::number_or(j, "truck_cost_per_distance", p, c.truck_cost_per_distance);
    c.freighter_cost_scale = detail::number_or(j, "freighter_cost_scale", p, c.freighter_cost_scale);
    c.time_per_distance = detail::number_or(j, "time_per_distance", p, c.time_per_distance);
    c.big_m = detail::number_or(j, "big_M", p, c.big_m);
    c.service_cost_mu = detail::number_or(j, "service_cost_mu", p, c.service_cost_mu);
    c.t_mid_day = detail::number_or(j, "t_mid_day", p, c.t_mid_day);
    c.period_length = detail::number_or(j, "period_length", p, c.period_length);
    if (j.contains("period_count")) {
        if (!j["period_count"].is_number_integer()) throw InstanceError(p + ".period_count", "expected an integer");
        c.period_count = j["period_count"].get<int>();
    }
    return c;
}

}  // namespace

Instance parse_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InstanceError("", std::string("malformed document: ") + e.what());
    }
    if (!doc.is_object()) throw InstanceError("", "expected an object at top level");
    if (doc.contains("schema") && doc["schema"] != kInstanceSchema)
        throw InstanceError("schema", "unsupported schema " + doc["schema"].dump());

    Instance in;
    if (doc.contains("id")) in.id = detail::text(doc, "id", "");
    in.cdc = detail::point(doc, "cdc", "");

    const json& stops = detail::array(doc, "stops", "");
    const json& lines = detail::array(doc, "lines", "");
    const json& trips = detail::array(doc, "trips", "");
    const json& trucks = detail::array(doc, "trucks", "");
    const json& freighters = detail::array(doc, "freighters", "");
    const json& customers = detail::array(doc, "customers", "");

    for (std::size_t i = 0; i < stops.size(); ++i) {
        std::string p = detail::item("", "stops", i);
        const json& s = stops[i];
        in.stops.push_back(Stop{detail::text(s, "id", p), detail::point(s, "location", p),
                                detail::flag(s, "is_drop_in", p), detail::flag(s, "is_drop_out", p),
                                detail::number(s, "service_time", p), detail::number(s, "max_dwell", p)});
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string p = detail::item("", "lines", i);
        Line l{detail::text(lines[i], "id", p), {}};
        const json& seq = detail::array(lines[i], "ordered_stops", p);
        for (const auto& s : seq) {
            if (!s.is_string()) throw InstanceError(p + ".ordered_stops", "expected stop ids");
            l.ordered_stops.push_back(s.get<std::string>());
        }
        in.lines.push_back(std::move(l));
    }
    for (std::size_t i = 0; i < trips.size(); ++i) {
        std::string p = detail::item("", "trips", i);
        Trip t{detail::text(trips[i], "id", p), detail::text(trips[i], "line", p), {},
               detail::number(trips[i], "capacity", p)};
        const json& times = detail::field(trips[i], "stop_times", p);
        if (!times.is_object()) throw InstanceError(p + ".stop_times", "expected an object");
        for (auto it = times.begin(); it != times.end(); ++it) {
            if (!it->is_number()) throw InstanceError(p + ".stop_times." + it.key(), "expected a number");
            t.stop_times.emplace(it.key(), it->get<double>());
        }
        in.trips.push_back(std::move(t));
    }
    for (std::size_t i = 0; i < trucks.size(); ++i) {
        std::string p = detail::item("", "trucks", i);
        in.trucks.push_back(Truck{detail::text(trucks[i], "id", p), detail::number(trucks[i], "capacity", p)});
    }
    for (std::size_t i = 0; i < freighters.size(); ++i) {
        std::string p = detail::item("", "freighters", i);
        in.freighters.push_back(Freighter{detail::text(freighters[i], "id", p),
                                          detail::text(freighters[i], "home_stop", p),
                                          detail::number(freighters[i], "capacity", p)});
    }
    for (std::size_t i = 0; i < customers.size(); ++i) {
        std::string p = detail::item("", "customers", i);
        const json& c = customers[i];
        Customer cu{detail::text(c, "id", p), detail::point(c, "location", p), detail::number(c, "demand", p),
                    detail::number(c, "window_lo", p), detail::number(c, "window_hi", p),
                    detail::number(c, "service_time", p), {}};
        for (const auto& s : detail::array(c, "dropout_candidates", p)) {
            if (!s.is_string()) throw InstanceError(p + ".dropout_candidates", "expected stop ids");
            cu.dropout_candidates.push_back(s.get<std::string>());
        }
        in.customers.push_back(std::move(cu));
    }
    if (doc.contains("cost_params")) in.cost_params = parse_cost_params(doc["cost_params"]);

    validate_instance(in);
    return in;
}

std::string serialize_instance(const Instance& in) {
    json doc;
    doc["schema"] = kInstanceSchema;
    doc["id"] = in.id;
    doc["cdc"] = detail::point_json(in.cdc);
    doc["stops"] = json::array();
    for (const auto& s : in.stops)
        doc["stops"].push_back({{"id", s.id},
                                {"location", detail::point_json(s.location)},
                                {"is_drop_in", s.is_drop_in},
                                {"is_drop_out", s.is_drop_out},
                                {"service_time", s.service_time},
                                {"max_dwell", s.max_dwell}});
    doc["lines"] = json::array();
    for (const auto& l : in.lines) doc["lines"].push_back({{"id", l.id}, {"ordered_stops", l.ordered_stops}});
    doc["trips"] = json::array();
    for (const auto& t : in.trips) {
        json times = json::object();
        for (const auto& [s, v] : t.stop_times) times[s] = v;
        doc["trips"].push_back({{"id", t.id}, {"line", t.line}, {"stop_times", times}, {"capacity", t.capacity}});
    }
    doc["trucks"] = json::array();
    for (const auto& d : in.trucks) doc["trucks"].push_back({{"id", d.id}, {"capacity", d.capacity}});
    doc["freighters"] = json::array();
    for (const auto& k : in.freighters)
        doc["freighters"].push_back({{"id", k.id}, {"home_stop", k.home_stop}, {"capacity", k.capacity}});
    doc["customers"] = json::array();
    for (const auto& c : in.customers)
        doc["customers"].push_back({{"id", c.id},
                                    {"location", detail::point_json(c.location)},
                                    {"demand", c.demand},
                                    {"window_lo", c.window_lo},
                                    {"window_hi", c.window_hi},
                                    {"service_time", c.service_time},
                                    {"dropout_candidates", c.dropout_candidates}});
    const CostParams& cp = in.cost_params;
    doc["cost_params"] = {{"truck_cost_per_distance", cp.truck_cost_per_distance},
                          {"freighter_cost_scale", cp.freighter_cost_scale},
                          {"time_per_distance", cp.time_per_distance},
                          {"big_M", cp.big_m},
                          {"service_cost_mu", cp.service_cost_mu},
                          {"t_mid_day", cp.t_mid_day},
                          {"period_length", cp.period_length},
                          {"period_count", cp.period_count}};
    return doc.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << text;
    if (!f) throw Error("write failed for " + path);
}

Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

void save_instance(const Instance& instance, const std::string& path) {
    write_file(path, serialize_instance(instance));
}

}  // namespace tdppt
