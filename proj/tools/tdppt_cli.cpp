#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "tdppt/generator.hpp"
#include "tdppt/instance_io.hpp"
#include "tdppt/milp/backend.hpp"
#include "tdppt/models/full.hpp"
#include "tdppt/models/tiers.hpp"
#include "tdppt/models/vrptw.hpp"
#include "tdppt/pipeline.hpp"
#include "tdppt/report.hpp"
#include "tdppt/validator.hpp"

namespace fs = std::filesystem;
using namespace tdppt;

namespace {

struct Global {
    std::string backend = "cbc";
    std::optional<double> time_limit;
    std::optional<double> gap;
};

const std::vector<std::string> kAllMethods = {"full",    "d1-obj1", "d1-obj2", "d1-obj3", "d2-obj1",
                                              "d2-obj2", "d2-obj3", "d3-obj1", "d3-obj2", "vrptw"};

RunConfig make_config(const Global& g, const std::string& method, const std::string& t2_obj) {
    RunConfig cfg = parse_run_label(t2_obj.empty() ? method : method + "-" + t2_obj);
    if (g.time_limit) cfg.limits = StageLimits{*g.time_limit, *g.time_limit, *g.time_limit, *g.time_limit};
    if (g.gap) cfg.rel_gap = *g.gap;
    return cfg;
}

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    write_file(path, text);
}

std::vector<std::string> instance_files(const std::vector<std::string>& inputs) {
    std::vector<std::string> files;
    for (const auto& p : inputs) {
        if (fs::is_directory(p)) {
            std::vector<std::string> here;
            for (const auto& e : fs::directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".json") here.push_back(e.path().string());
            std::sort(here.begin(), here.end());
            files.insert(files.end(), here.begin(), here.end());
        } else {
            files.push_back(p);
        }
    }
    if (files.empty()) throw Error("no instance files found");
    return files;
}

int cmd_gen(const GenParams& gp, const std::string& out) {
    Instance in = generate_instance(gp);
    write_or_print(out, serialize_instance(in));
    if (!out.empty() && out != "-")
        std::cerr << fmt::format("wrote {} ({} customers, {} stops, {} trips)\n", out, in.customers.size(),
                                 in.stops.size(), in.trips.size());
    return 0;
}

struct SolveArgs {
    std::string instance, method = "full", t2_obj, out, metrics, artifacts;
    std::optional<double> beta, mu;
    bool no_symmetry = false;
};

int cmd_solve(const Global& g, const SolveArgs& a) {
    Instance in = load_instance(a.instance);
    RunConfig cfg = make_config(g, a.method, a.t2_obj);
    cfg.beta = a.beta;
    cfg.mu = a.mu;
    cfg.symmetry_breaking = !a.no_symmetry;
    cfg.artifacts_dir = a.artifacts;
    auto backend = milp::make_backend(g.backend);
    RunResult r = run_method(in, cfg, *backend);
    if (!a.out.empty()) write_or_print(a.out, r.vrptw ? serialize_vrptw_plan(*r.vrptw) : serialize_plan(r.plan));
    if (!a.metrics.empty()) write_or_print(a.metrics, metrics_to_json(cfg.label(), r));
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << fmt::format("{} {}: total {:.4f} (t1 {:.4f}, t3 {:.4f}, service {:.4f}), violations {}, {:.2f}s\n",
                             in.id, cfg.label(), r.metrics.total, r.metrics.t1_cost, r.metrics.t3_cost,
                             r.metrics.service_cost, r.metrics.violations, r.metrics.wall_time);
    return r.metrics.violations == 0 ? 0 : 1;
}

int cmd_validate(const std::string& instance, const std::string& plan_path, const std::string& out) {
    Instance in = load_instance(instance);
    std::string text = read_file(plan_path);
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error("plan document is not a JSON object");
    std::vector<Violation> v;
    nlohmann::json report;
    if (doc.value("schema", "") == kVrptwPlanSchema) {
        VrptwPlan p = parse_vrptw_plan(text);
        v = validate_vrptw_plan(in, p);
        report["total"] = vrptw_cost(in, p);
    } else {
        Plan p = parse_plan(text);
        v = validate_plan(in, p);
        CostBreakdown c = recompute_costs(in, p);
        report["t1_cost"] = c.t1_cost;
        report["t3_cost"] = c.t3_cost;
        report["service_cost"] = c.service_cost;
        report["total"] = c.total;
    }
    report["valid"] = v.empty();
    report["violations"] = nlohmann::json::parse(violations_to_json(v));
    write_or_print(out, report.dump(2) + "\n");
    return v.empty() ? 0 : 1;
}

int cmd_export_lp(const Global& g, const SolveArgs& a) {
    Instance raw = load_instance(a.instance);
    RunConfig cfg = make_config(g, a.method, a.t2_obj);
    cfg.beta = a.beta;
    Instance in = configured_instance(raw, cfg);
    Compatibility cp(in);
    models::RoutingOptions ro{!a.no_symmetry, {}};
    auto obj = models::T2Objective::from(in, cfg.t2_obj.value_or(models::T2Tag::Obj2));
    milp::MilpModel model;
    switch (cfg.method) {
        case Method::Full: model = models::build_full(in, cp, {!a.no_symmetry, {}}).model; break;
        case Method::Vrptw: model = models::build_vrptw(in, !a.no_symmetry).model; break;
        case Method::D2: model = models::build_d2_t2(in, cp, obj).model; break;
        case Method::D1: model = models::build_d1_t1(in, cp, models::preprocess_midday(in, cp), ro).model; break;
        case Method::D3: model = models::build_d3_t3(in, cp, models::first_arrivals(in, cp), ro).model; break;
    }
    write_or_print(a.out, milp::write_lp(model));
    return 0;
}

struct CompareArgs {
    std::vector<std::string> instances;
    std::vector<std::string> methods = kAllMethods;
    std::vector<double> betas, mus;
    std::string out = "report.csv", series_dir, artifacts;
};

void print_summary(const std::vector<ReportRow>& rows) {
    std::cout << fmt::format("{:<10} {:>5} {:>7} {:>5} {:>12} {:>12}\n", "method", "runs", "solved", "best",
                             "mean dev %", "mean total");
    for (const auto& s : summarize(rows))
        std::cout << fmt::format("{:<10} {:>5} {:>7} {:>5} {:>12.3f} {:>12.3f}\n", s.method, s.runs, s.solved,
                                 s.best_count, 100 * s.mean_deviation, s.mean_total);
}

int cmd_compare(const Global& g, const CompareArgs& a) {
    std::vector<Instance> instances;
    for (const auto& f : instance_files(a.instances)) instances.push_back(load_instance(f));
    std::vector<RunConfig> configs;
    for (const auto& m : a.methods) {
        RunConfig c = parse_run_label(m);
        configs.push_back(make_config(g, to_string(c.method), c.t2_obj ? models::to_string(*c.t2_obj) : ""));
    }
    auto backend = milp::make_backend(g.backend);
    CompareOptions opt{a.betas, a.mus, a.artifacts};
    auto rows = compare_methods(instances, configs, *backend, opt);
    for (const auto& p : emit_report(rows, a.out, a.series_dir)) std::cerr << "wrote " << p << "\n";
    print_summary(rows);
    return 0;
}

int cmd_report(const std::string& in, const std::string& out, const std::string& series_dir) {
    auto rows = rows_from_csv(read_file(in));
    rank_rows(rows);
    for (const auto& p : emit_report(rows, out.empty() ? in : out, series_dir)) std::cerr << "wrote " << p << "\n";
    print_summary(rows);
    return 0;
}

void print_error(const std::string& kind, const std::string& message, const std::string& stage = {}) {
    nlohmann::json d{{"error", kind}, {"message", message}};
    if (!stage.empty()) d["stage"] = stage;
    std::cerr << d.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-tier parcel delivery over public transit: instance generation, MILP models, decompositions"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--backend", g.backend, "MILP backend")->check(CLI::IsMember({"cbc", "highs"}));
    app.add_option("--time-limit", g.time_limit, "seconds per model (all stages)")->check(CLI::PositiveNumber);
    app.add_option("--gap", g.gap, "relative optimality gap")->check(CLI::NonNegativeNumber);

    GenParams gp;
    std::string gen_out;
    std::optional<int> trucks, max_freighters;
    auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
    gen->add_option("--customers", gp.n_customers)->check(CLI::PositiveNumber);
    gen->add_option("--lines", gp.n_lines)->check(CLI::PositiveNumber);
    gen->add_option("--seed", gp.seed);
    gen->add_option("--min-stops", gp.min_stops_per_line);
    gen->add_option("--max-stops", gp.max_stops_per_line);
    gen->add_option("--trips-per-line", gp.trips_per_line);
    gen->add_option("--freighter-capacity", gp.freighter_capacity)->check(CLI::PositiveNumber);
    gen->add_option("--trucks", trucks, "override the fleet rule")->check(CLI::PositiveNumber);
    gen->add_option("--max-freighters", max_freighters, "cap freighters per stop")->check(CLI::PositiveNumber);
    gen->add_option("--out", gen_out, "instance file (stdout when omitted)");

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "solve an instance with one method");
    solve->add_option("--instance", sa.instance)->required()->check(CLI::ExistingFile);
    solve->add_option("--method", sa.method)->check(CLI::IsMember({"full", "d1", "d2", "d3", "vrptw"}));
    solve->add_option("--t2-obj", sa.t2_obj)->check(CLI::IsMember({"obj1", "obj2", "obj3"}));
    solve->add_option("--out", sa.out, "plan file");
    solve->add_option("--metrics", sa.metrics, "metrics file");
    solve->add_option("--artifacts", sa.artifacts, "directory for instance, handoffs, plan and metrics");
    solve->add_option("--beta", sa.beta)->check(CLI::NonNegativeNumber);
    solve->add_option("--mu", sa.mu)->check(CLI::NonNegativeNumber);
    solve->add_flag("--no-symmetry", sa.no_symmetry);

    std::string v_instance, v_plan, v_out;
    auto* validate = app.add_subcommand("validate", "check a plan against an instance");
    validate->add_option("--instance", v_instance)->required()->check(CLI::ExistingFile);
    validate->add_option("--plan", v_plan)->required()->check(CLI::ExistingFile);
    validate->add_option("--out", v_out, "violation report (stdout when omitted)");

    CompareArgs ca;
    auto* compare = app.add_subcommand("compare", "run several methods over instances and write a report");
    compare->add_option("--instances", ca.instances, "instance files or directories")->required();
    compare->add_option("--methods", ca.methods, "run labels such as full, d2-obj2, vrptw");
    compare->add_option("--betas", ca.betas, "freighter cost scales to sweep");
    compare->add_option("--mus", ca.mus, "service-cost multipliers to sweep");
    compare->add_option("--out", ca.out, "report CSV");
    compare->add_option("--series-dir", ca.series_dir, "directory for plot-data series");
    compare->add_option("--artifacts", ca.artifacts, "per-run artifacts root");

    SolveArgs ea;
    auto* export_lp = app.add_subcommand("export-lp", "write the (first-stage) model of a method as an LP file");
    export_lp->add_option("--instance", ea.instance)->required()->check(CLI::ExistingFile);
    export_lp->add_option("--method", ea.method)->check(CLI::IsMember({"full", "d1", "d2", "d3", "vrptw"}));
    export_lp->add_option("--t2-obj", ea.t2_obj)->check(CLI::IsMember({"obj1", "obj2", "obj3"}));
    export_lp->add_option("--beta", ea.beta)->check(CLI::NonNegativeNumber);
    export_lp->add_flag("--no-symmetry", ea.no_symmetry);
    export_lp->add_option("--out", ea.out, "LP file (stdout when omitted)");

    std::string r_in, r_out, r_series;
    auto* report = app.add_subcommand("report", "re-rank a report CSV and write plot-data series");
    report->add_option("--in", r_in)->required()->check(CLI::ExistingFile);
    report->add_option("--out", r_out, "ranked CSV (defaults to rewriting --in)");
    report->add_option("--series-dir", r_series);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*gen) {
            gp.n_trucks = trucks;
            gp.max_freighters_per_stop = max_freighters;
            return cmd_gen(gp, gen_out);
        }
        if (*solve) return cmd_solve(g, sa);
        if (*validate) return cmd_validate(v_instance, v_plan, v_out);
        if (*compare) return cmd_compare(g, ca);
        if (*export_lp) return cmd_export_lp(g, ea);
        if (*report) return cmd_report(r_in, r_out, r_series);
    } catch (const StageFailure& e) {
        print_error("stage_failure", e.cause(), e.stage());
        return 1;
    } catch (const InstanceError& e) {
        print_error("instance", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("runtime", e.what());
        return 1;
    }
    return 2;
}
