#include "tdppt/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <set>

#include <fmt/format.h>

#include "json_fields.hpp"
#include "models/common.hpp"
#include "tdppt/instance_io.hpp"
#include "tdppt/models/full.hpp"
#include "tdppt/models/vrptw.hpp"
#include "tdppt/validator.hpp"

namespace tdppt {

using milp::SolveStatus;
using models::T2Tag;

const char* to_string(Method m) {
    switch (m) {
        case Method::Full: return "full";
        case Method::D1: return "d1";
        case Method::D2: return "d2";
        case Method::D3: return "d3";
        case Method::Vrptw: return "vrptw";
    }
    return "?";
}

Method parse_method(const std::string& s) {
    for (Method m : {Method::Full, Method::D1, Method::D2, Method::D3, Method::Vrptw})
        if (s == to_string(m)) return m;
    throw Error("unknown method: " + s);
}

void RunConfig::check() const {
    bool decomposed = method == Method::D1 || method == Method::D2 || method == Method::D3;
    if (decomposed && !t2_obj) throw Error(fmt::format("method {} needs a tier-2 objective", to_string(method)));
    if (!decomposed && t2_obj) throw Error(fmt::format("method {} takes no tier-2 objective", to_string(method)));
    if (method == Method::D3 && t2_obj == T2Tag::Obj3) throw Error("d3 does not support obj3");
    if (beta && *beta < 0) throw Error("beta must be nonnegative");
    if (mu && *mu < 0) throw Error("mu must be nonnegative");
    if (rel_gap < 0) throw Error("gap must be nonnegative");
    for (double t : {limits.full, limits.first_stage, limits.other_stage, limits.per_stop})
        if (!(t > 0)) throw Error("time limits must be positive");
}

std::string RunConfig::label() const {
    std::string s = to_string(method);
    if (t2_obj) s += std::string("-") + models::to_string(*t2_obj);
    return s;
}

RunConfig parse_run_label(const std::string& label) {
    RunConfig c;
    auto dash = label.find('-');
    c.method = parse_method(label.substr(0, dash));
    if (dash != std::string::npos) c.t2_obj = models::parse_t2_tag(label.substr(dash + 1));
    c.check();
    return c;
}

Instance configured_instance(const Instance& in, const RunConfig& config) {
    Instance out = in;
    if (config.beta) out.cost_params.freighter_cost_scale = *config.beta;
    if (config.mu) out.cost_params.service_cost_mu = *config.mu;
    return out;
}

RunMetrics plan_metrics(const Instance& in, const Plan& plan) {
    RunMetrics m;
    CostBreakdown c = route_costs(in, plan);
    m.t1_cost = c.t1_cost;
    m.t3_cost = c.t3_cost;
    m.service_cost = c.service_cost;
    m.total = c.total;
    std::set<std::string> ins, outs, trips;
    for (const auto& it : plan.itineraries) {
        ins.insert(it.drop_in_stop);
        outs.insert(it.drop_out_stop);
        trips.insert(it.trip);
    }
    m.drop_in_used = static_cast<int>(ins.size());
    m.drop_out_used = static_cast<int>(outs.size());
    m.trips_used = static_cast<int>(trips.size());
    m.trucks_used = static_cast<int>(plan.truck_routes.size());
    m.freighters_used = static_cast<int>(plan.freighter_routes.size());
    double n = static_cast<double>(plan.itineraries.size());
    auto per = [n](int k) { return k > 0 ? n / k : 0.0; };
    m.packages_per_truck = per(m.trucks_used);
    m.packages_per_freighter = per(m.freighters_used);
    m.packages_per_trip = per(m.trips_used);
    m.service = plan.service;
    return m;
}

namespace {

using Clock = std::chrono::steady_clock;

class Runner {
public:
    Runner(const Instance& in, const RunConfig& cfg, const milp::Backend& backend, ServiceCosts service)
        : in_(in), cp_(in), cfg_(cfg), backend_(backend), service_(service) {
        routing_.symmetry_breaking = cfg.symmetry_breaking;
        routing_.service = service;
        obj_ = models::T2Objective::from(in, cfg.t2_obj.value_or(T2Tag::Obj2));
    }

    RunResult run() {
        auto start = Clock::now();
        switch (cfg_.method) {
            case Method::Full: full(); break;
            case Method::D1: d1(); break;
            case Method::D2: d2(); break;
            case Method::D3: d3(); break;
            case Method::Vrptw: vrptw(); break;
        }
        double wall = std::chrono::duration<double>(Clock::now() - start).count();
        if (cfg_.method == Method::Vrptw) {
            out_.metrics.t1_cost = out_.vrptw->total_cost;
            out_.metrics.total = out_.vrptw->total_cost;
            out_.metrics.trucks_used = static_cast<int>(out_.vrptw->routes.size());
            out_.metrics.packages_per_truck =
                out_.metrics.trucks_used ? double(in_.customers.size()) / out_.metrics.trucks_used : 0.0;
            out_.metrics.violations = validate_vrptw_plan(in_, *out_.vrptw).size();
        } else {
            auto stages = std::move(out_.metrics.stages);
            out_.metrics = plan_metrics(in_, out_.plan);
            out_.metrics.stages = std::move(stages);
            out_.metrics.violations = validate_plan(in_, out_.plan).size();
        }
        out_.metrics.wall_time = wall;
        out_.metrics.optimal = true;
        for (const auto& s : out_.metrics.stages) out_.metrics.optimal = out_.metrics.optimal && s.status == "optimal";
        persist();
        return std::move(out_);
    }

private:
    // Solves one model; failures become StageFailure naming the stage.
    milp::SolveResult solve(const std::string& stage, const milp::MilpModel& model, double limit,
                            const std::string& infeasible_cause = "model infeasible") {
        milp::SolveLimits lim{limit, cfg_.rel_gap};
        milp::SolveResult res = milp::solve(model, backend_, lim);
        out_.metrics.stages.push_back(StageMetric{stage, milp::to_string(res.status),
                                                  res.has_solution() ? res.objective : 0.0, res.wall_time});
        switch (res.status) {
            case SolveStatus::Optimal:
            case SolveStatus::Feasible: return res;
            case SolveStatus::Infeasible: throw StageFailure(stage, infeasible_cause);
            case SolveStatus::Timeout: throw StageFailure(stage, "stage timeout, no incumbent");
            case SolveStatus::Error: throw StageFailure(stage, "backend error: " + res.diagnostics);
        }
        return res;
    }

    template <class F>
    auto guarded(const std::string& stage, F&& f) -> decltype(f()) {
        try {
            return f();
        } catch (const models::StageInfeasible& e) {
            throw StageFailure(stage, e.what());
        } catch (const milp::DecodeError& e) {
            throw StageFailure(stage, std::string("decode: ") + e.what());
        }
    }

    void full() {
        models::FullOptions opt{cfg_.symmetry_breaking, service_};
        auto fm = models::build_full(in_, cp_, opt);
        auto res = solve("FULL", fm.model, cfg_.limits.full);
        out_.plan = guarded("FULL", [&] { return models::decode_full(in_, fm, res); });
        out_.plan.method = cfg_.label();
    }

    void vrptw() {
        auto vm = models::build_vrptw(in_, cfg_.symmetry_breaking);
        auto res = solve("VRPTW", vm.model, cfg_.limits.full);
        out_.vrptw = guarded("VRPTW", [&] { return models::decode_vrptw(in_, vm, res); });
    }

    models::T1Solution tier1(const models::TierHandoff& h, double limit) {
        auto tm = guarded("T1", [&] { return models::build_t1_from_handoff(in_, cp_, h, routing_); });
        auto res = solve("T1", tm.model, limit);
        return guarded("T1", [&] { return models::decode_t1(in_, cp_, tm, res); });
    }

    // One stop-wise model per drop-out stop in use.
    models::T3Solution tier3_stopwise(const models::TierHandoff& h) {
        std::map<std::string, std::vector<std::string>> by_stop;
        for (const auto& c : in_.customers) by_stop[h.b_out.at(c.id)].push_back(c.id);
        models::T3Solution all;
        for (const auto& [stop, customers] : by_stop) {
            std::string stage = "T3[" + stop + "]";
            auto tm = guarded(stage, [&] { return models::build_t3_stopwise(in_, cp_, stop, customers, h, routing_); });
            auto res = solve(stage, tm.model, cfg_.limits.per_stop);
            auto part = guarded(stage, [&] { return models::decode_t3(in_, tm, res); });
            all.freighter_of.insert(part.freighter_of.begin(), part.freighter_of.end());
            all.stop_of.insert(part.stop_of.begin(), part.stop_of.end());
            all.routes.insert(all.routes.end(), part.routes.begin(), part.routes.end());
        }
        return all;
    }

    void d2() {
        auto t2 = guarded("T2", [&] { return models::build_d2_t2(in_, cp_, obj_); });
        auto res = solve("T2", t2.model, cfg_.limits.first_stage);
        auto h = guarded("T2", [&] { return models::decode_t2(in_, cp_, t2, res, {}); });
        out_.handoffs.emplace_back("T2", h);
        auto t1 = tier1(h, cfg_.limits.other_stage);
        auto t3 = tier3_stopwise(h);
        assemble(h, t1, t3);
    }

    void d1() {
        models::TierHandoff h;
        h.tau = models::preprocess_midday(in_, cp_);
        auto t1m = models::build_d1_t1(in_, cp_, h.tau, routing_);
        auto res = solve("T1", t1m.model, cfg_.limits.first_stage);
        auto t1 = guarded("T1", [&] { return models::decode_t1(in_, cp_, t1m, res); });
        for (const auto& c : in_.customers) {
            const std::string& stop = t1.stop_of.at(c.id);
            h.b_in[c.id] = stop;
            for (const auto& r : t1.routes)
                if (r.truck == t1.truck_of.at(c.id))
                    for (const auto& v : r.visits)
                        if (v.stop == stop) h.t_in[c.id] = v.time;
        }
        out_.handoffs.emplace_back("T1", h);

        auto t2 = guarded("T2", [&] { return models::build_d1_t2(in_, cp_, h, obj_); });
        auto res2 = solve("T2", t2.model, cfg_.limits.other_stage);
        h = guarded("T2", [&] { return models::decode_t2(in_, cp_, t2, res2, h); });
        out_.handoffs.emplace_back("T2", h);
        auto t3 = tier3_stopwise(h);
        assemble(h, t1, t3);

        // Trucks keep the times the tier-1 stage fixed.
        std::map<std::pair<std::string, std::string>, double> at;
        for (const auto& r : t1.routes)
            for (const auto& v : r.visits) at[{r.truck, v.stop}] = v.time;
        for (auto& r : out_.plan.truck_routes)
            for (auto& v : r.visits) v.time = at.at({r.truck, v.stop});
        for (auto& it : out_.plan.itineraries) it.drop_in_time = at.at({it.truck, it.drop_in_stop});
    }

    void d3() {
        models::TierHandoff h;
        h.t_first = models::first_arrivals(in_, cp_);
        auto t3m = guarded("T3", [&] { return models::build_d3_t3(in_, cp_, h.t_first, routing_); });
        auto res = solve("T3", t3m.model, cfg_.limits.first_stage);
        auto t3 = guarded("T3", [&] { return models::decode_t3(in_, t3m, res); });
        auto repair = models::repair_d3_times(in_, t3.routes);
        for (const auto& w : repair.warnings) out_.warnings.push_back("repair: " + w);
        h.b_out = t3.stop_of;
        h.t_out = repair.t_out;
        out_.handoffs.emplace_back("T3", h);

        auto t2 = guarded("T2", [&] { return models::build_d3_t2(in_, cp_, h, obj_); });
        auto res2 = solve("T2", t2.model, cfg_.limits.other_stage, "T2 capacity shortfall at stop");
        h = guarded("T2", [&] { return models::decode_t2(in_, cp_, t2, res2, h); });
        out_.handoffs.emplace_back("T2", h);
        auto t1 = tier1(h, cfg_.limits.other_stage);
        assemble(h, t1, t3);

        // Freighters keep the repaired schedule.
        std::map<std::string, const FreighterRoute*> timed;
        for (const auto& r : repair.routes) timed[r.freighter] = &r;
        std::map<std::string, double> delivered;
        for (auto& r : out_.plan.freighter_routes) {
            const FreighterRoute& src = *timed.at(r.freighter);
            r.departure = src.departure;
            for (std::size_t k = 0; k < r.visits.size(); ++k) {
                r.visits[k].time = src.visits[k].time;
                delivered[r.visits[k].customer] = r.visits[k].time;
            }
        }
        for (auto& it : out_.plan.itineraries) it.delivery_time = delivered.at(it.customer);
    }

    void assemble(const models::TierHandoff& h, const models::T1Solution& t1, const models::T3Solution& t3) {
        const InstanceIndex& ix = cp_.index;
        std::vector<models::Assignment> as(in_.customers.size());
        for (std::size_t i = 0; i < in_.customers.size(); ++i) {
            const std::string& cid = in_.customers[i].id;
            as[i].truck = ix.truck_at(t1.truck_of.at(cid));
            as[i].drop_in = ix.stop_at(h.b_in.at(cid));
            as[i].trip = ix.trip_at(h.trip.at(cid));
            as[i].drop_out = ix.stop_at(h.b_out.at(cid));
            as[i].freighter = ix.freighter_at(t3.freighter_of.at(cid));
        }
        std::vector<std::pair<std::size_t, std::vector<std::size_t>>> trucks, freighters;
        for (const auto& r : t1.routes) {
            std::vector<std::size_t> seq;
            for (const auto& v : r.visits) seq.push_back(ix.stop_at(v.stop));
            trucks.emplace_back(ix.truck_at(r.truck), seq);
        }
        for (const auto& r : t3.routes) {
            std::vector<std::size_t> seq;
            for (const auto& v : r.visits) seq.push_back(ix.customer_at(v.customer));
            freighters.emplace_back(ix.freighter_at(r.freighter), seq);
        }
        out_.plan = models::assemble_plan(in_, cfg_.label(), as, trucks, freighters, service_);
    }

    void persist() const {
        if (cfg_.artifacts_dir.empty()) return;
        namespace fs = std::filesystem;
        fs::create_directories(cfg_.artifacts_dir);
        auto path = [&](const std::string& name) { return (fs::path(cfg_.artifacts_dir) / name).string(); };
        save_instance(in_, path("instance.json"));
        for (std::size_t k = 0; k < out_.handoffs.size(); ++k)
            write_file(path(fmt::format("handoff-{}-{}.json", k + 1, out_.handoffs[k].first)),
                       models::serialize_handoff(out_.handoffs[k].second));
        if (out_.vrptw)
            write_file(path("plan.json"), serialize_vrptw_plan(*out_.vrptw));
        else
            write_file(path("plan.json"), serialize_plan(out_.plan));
        write_file(path("metrics.json"), metrics_to_json(cfg_.label(), out_));
    }

    const Instance& in_;
    Compatibility cp_;
    const RunConfig& cfg_;
    const milp::Backend& backend_;
    ServiceCosts service_;
    models::RoutingOptions routing_;
    models::T2Objective obj_;
    RunResult out_;
};

std::mutex reference_mutex;
std::map<std::pair<std::size_t, std::string>, std::pair<double, double>> reference_cache;

}  // namespace

ServiceCosts service_costs(const Instance& in, const RunConfig& config, const milp::Backend& backend) {
    double mu = config.mu.value_or(in.cost_params.service_cost_mu);
    if (mu == 0.0 || config.method == Method::Vrptw) return {};
    RunConfig ref = config;
    ref.mu = 0.0;
    ref.artifacts_dir.clear();
    Instance base = configured_instance(in, ref);
    auto key = std::make_pair(std::hash<std::string>{}(serialize_instance(base)), ref.label());
    std::pair<double, double> means;
    {
        std::lock_guard<std::mutex> lock(reference_mutex);
        auto it = reference_cache.find(key);
        if (it != reference_cache.end()) means = it->second;
        else {
            RunResult r = Runner(base, ref, backend, {}).run();
            const RunMetrics& m = r.metrics;
            means = {m.trucks_used ? m.t1_cost / m.trucks_used : 0.0,
                     m.freighters_used ? m.t3_cost / m.freighters_used : 0.0};
            reference_cache.emplace(key, means);
        }
    }
    return ServiceCosts{mu * means.first, mu * means.second};
}

std::string metrics_to_json(const std::string& label, const RunResult& result) {
    detail::json m;
    const RunMetrics& r = result.metrics;
    m["method"] = label;
    m["t1_cost"] = r.t1_cost;
    m["t3_cost"] = r.t3_cost;
    m["service_cost"] = r.service_cost;
    m["total"] = r.total;
    m["wall_time"] = r.wall_time;
    m["drop_in_used"] = r.drop_in_used;
    m["drop_out_used"] = r.drop_out_used;
    m["trucks_used"] = r.trucks_used;
    m["freighters_used"] = r.freighters_used;
    m["trips_used"] = r.trips_used;
    m["packages_per_truck"] = r.packages_per_truck;
    m["packages_per_freighter"] = r.packages_per_freighter;
    m["packages_per_trip"] = r.packages_per_trip;
    m["violations"] = r.violations;
    m["optimal"] = r.optimal;
    m["lambda1"] = r.service.lambda1;
    m["lambda3"] = r.service.lambda3;
    m["stages"] = detail::json::array();
    for (const auto& s : r.stages)
        m["stages"].push_back(
            {{"name", s.name}, {"status", s.status}, {"objective", s.objective}, {"wall_time", s.wall_time}});
    m["warnings"] = result.warnings;
    return m.dump(2) + "\n";
}

RunResult run_method(const Instance& raw, const RunConfig& config, const milp::Backend& backend) {
    config.check();
    Instance in = configured_instance(raw, config);
    ServiceCosts service;
    try {
        service = service_costs(raw, config, backend);
    } catch (const StageFailure& e) {
        throw StageFailure("reference " + e.stage(), e.cause());
    }
    return Runner(in, config, backend, service).run();
}

}  // namespace tdppt
