#include "tdppt/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "tdppt/instance_io.hpp"

namespace tdppt {

namespace {

const std::vector<std::string> kColumns = {
    "instance",        "method",          "t2_obj",           "beta",         "mu",
    "status",          "t1_cost",         "t3_cost",          "service_cost", "total",
    "runtime",         "drop_in_used",    "drop_out_used",    "trucks_used",  "freighters_used",
    "trips_used",      "pkg_per_truck",   "pkg_per_freighter", "pkg_per_trip", "violations",
    "deviation",       "best",            "failure"};

std::string num(double v) { return fmt::format("{:.6f}", v); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw Error("csv: unterminated quote");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

double to_double(const std::string& s, const std::string& column) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(fmt::format("csv: column {} is not a number: '{}'", column, s));
    }
}

std::string sweep_suffix(double beta, double mu) { return fmt::format("@beta={:g},mu={:g}", beta, mu); }

}  // namespace

std::string ReportRow::series_name(bool with_sweep) const {
    return with_sweep ? method + sweep_suffix(beta, mu) : method;
}

ReportRow make_row(const Instance& in, const RunConfig& config, const RunResult& result) {
    ReportRow r;
    const RunMetrics& m = result.metrics;
    r.instance_id = in.id;
    r.method = config.label();
    r.t2_obj = config.t2_obj ? models::to_string(*config.t2_obj) : "";
    r.beta = config.beta.value_or(in.cost_params.freighter_cost_scale);
    r.mu = config.mu.value_or(in.cost_params.service_cost_mu);
    r.status = m.optimal ? "optimal" : "feasible";
    r.t1_cost = m.t1_cost;
    r.t3_cost = m.t3_cost;
    r.service_cost = m.service_cost;
    r.total = m.total;
    r.runtime = m.wall_time;
    r.drop_in_used = m.drop_in_used;
    r.drop_out_used = m.drop_out_used;
    r.trucks_used = m.trucks_used;
    r.freighters_used = m.freighters_used;
    r.trips_used = m.trips_used;
    r.packages_per_truck = m.packages_per_truck;
    r.packages_per_freighter = m.packages_per_freighter;
    r.packages_per_trip = m.packages_per_trip;
    r.violations = m.violations;
    return r;
}

std::vector<ReportRow> compare_methods(const std::vector<Instance>& instances, const std::vector<RunConfig>& configs,
                                       const milp::Backend& backend, const CompareOptions& options) {
    if (instances.empty()) throw Error("compare needs at least one instance");
    std::vector<std::optional<double>> betas(options.betas.begin(), options.betas.end());
    std::vector<std::optional<double>> mus(options.mus.begin(), options.mus.end());
    if (betas.empty()) betas.push_back(std::nullopt);
    if (mus.empty()) mus.push_back(std::nullopt);
    const bool sweep = options.betas.size() > 1 || options.mus.size() > 1;

    std::vector<ReportRow> rows;
    for (const Instance& in : instances)
        for (const auto& beta : betas)
            for (const auto& mu : mus)
                for (RunConfig cfg : configs) {
                    cfg.beta = beta;
                    cfg.mu = mu;
                    if (!options.artifacts_root.empty()) {
                        std::string leaf = cfg.label();
                        if (sweep) leaf += sweep_suffix(beta.value_or(in.cost_params.freighter_cost_scale),
                                                        mu.value_or(in.cost_params.service_cost_mu));
                        cfg.artifacts_dir = (std::filesystem::path(options.artifacts_root) / in.id / leaf).string();
                    }
                    try {
                        rows.push_back(make_row(in, cfg, run_method(in, cfg, backend)));
                    } catch (const Error& e) {
                        ReportRow r;
                        r.instance_id = in.id;
                        r.method = cfg.label();
                        r.t2_obj = cfg.t2_obj ? models::to_string(*cfg.t2_obj) : "";
                        r.beta = beta.value_or(in.cost_params.freighter_cost_scale);
                        r.mu = mu.value_or(in.cost_params.service_cost_mu);
                        r.status = "failed";
                        r.failure = e.what();
                        rows.push_back(std::move(r));
                    }
                }
    rank_rows(rows);
    return rows;
}

void rank_rows(std::vector<ReportRow>& rows) {
    using Key = std::tuple<std::string, double, double>;
    std::map<Key, double> best;
    auto tiered = [](const ReportRow& r) { return r.method != "vrptw"; };
    for (const auto& r : rows) {
        if (!r.solved() || !tiered(r)) continue;
        Key k{r.instance_id, r.beta, r.mu};
        auto it = best.find(k);
        if (it == best.end() || r.total < it->second) best[k] = r.total;
    }
    for (auto& r : rows) {
        r.deviation.reset();
        r.best = false;
        if (!r.solved() || !tiered(r)) continue;
        double b = best.at(Key{r.instance_id, r.beta, r.mu});
        r.deviation = b > 0 ? (r.total - b) / b : 0.0;
        r.best = r.total <= b + 1e-6;
    }
}

std::vector<MethodSummary> summarize(const std::vector<ReportRow>& rows) {
    std::map<std::string, MethodSummary> by;
    std::map<std::string, int> with_dev;
    for (const auto& r : rows) {
        auto& s = by[r.method];
        s.method = r.method;
        ++s.runs;
        if (!r.solved()) continue;
        ++s.solved;
        s.mean_total += r.total;
        if (r.best) ++s.best_count;
        if (r.deviation) {
            s.mean_deviation += *r.deviation;
            ++with_dev[r.method];
        }
    }
    std::vector<MethodSummary> out;
    for (auto& [name, s] : by) {
        if (s.solved) s.mean_total /= s.solved;
        if (with_dev[name]) s.mean_deviation /= with_dev[name];
        out.push_back(s);
    }
    return out;
}

std::string rows_to_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    for (std::size_t c = 0; c < kColumns.size(); ++c) os << (c ? "," : "") << kColumns[c];
    os << "\n";
    for (const auto& r : rows) {
        std::vector<std::string> f = {csv_field(r.instance_id),
                                      csv_field(r.method),
                                      r.t2_obj,
                                      num(r.beta),
                                      num(r.mu),
                                      r.status,
                                      num(r.t1_cost),
                                      num(r.t3_cost),
                                      num(r.service_cost),
                                      num(r.total),
                                      num(r.runtime),
                                      std::to_string(r.drop_in_used),
                                      std::to_string(r.drop_out_used),
                                      std::to_string(r.trucks_used),
                                      std::to_string(r.freighters_used),
                                      std::to_string(r.trips_used),
                                      num(r.packages_per_truck),
                                      num(r.packages_per_freighter),
                                      num(r.packages_per_trip),
                                      std::to_string(r.violations),
                                      r.deviation ? num(*r.deviation) : "",
                                      r.best ? "1" : "0",
                                      csv_field(r.failure)};
        for (std::size_t c = 0; c < f.size(); ++c) os << (c ? "," : "") << f[c];
        os << "\n";
    }
    return os.str();
}

std::vector<ReportRow> rows_from_csv(const std::string& text) {
    auto table = parse_csv(text);
    if (table.empty()) throw Error("csv: empty report");
    std::map<std::string, std::size_t> col;
    for (std::size_t c = 0; c < table[0].size(); ++c) col[table[0][c]] = c;
    for (const auto& name : kColumns)
        if (!col.count(name)) throw Error("csv: missing column " + name);
    std::vector<ReportRow> rows;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const auto& t = table[i];
        if (t.size() != table[0].size()) throw Error(fmt::format("csv: row {} has {} fields", i + 1, t.size()));
        auto s = [&](const char* name) -> const std::string& { return t[col.at(name)]; };
        auto d = [&](const char* name) { return to_double(s(name), name); };
        auto n = [&](const char* name) { return static_cast<int>(std::lround(d(name))); };
        ReportRow r;
        r.instance_id = s("instance");
        r.method = s("method");
        r.t2_obj = s("t2_obj");
        r.beta = d("beta");
        r.mu = d("mu");
        r.status = s("status");
        r.t1_cost = d("t1_cost");
        r.t3_cost = d("t3_cost");
        r.service_cost = d("service_cost");
        r.total = d("total");
        r.runtime = d("runtime");
        r.drop_in_used = n("drop_in_used");
        r.drop_out_used = n("drop_out_used");
        r.trucks_used = n("trucks_used");
        r.freighters_used = n("freighters_used");
        r.trips_used = n("trips_used");
        r.packages_per_truck = d("pkg_per_truck");
        r.packages_per_freighter = d("pkg_per_freighter");
        r.packages_per_trip = d("pkg_per_trip");
        r.violations = static_cast<std::size_t>(n("violations"));
        if (!s("deviation").empty()) r.deviation = d("deviation");
        r.best = s("best") == "1";
        r.failure = s("failure");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<std::string> emit_report(const std::vector<ReportRow>& rows, const std::string& csv_path,
                                     const std::string& series_dir) {
    if (rows.empty()) throw Error("report needs at least one row");
    namespace fs = std::filesystem;
    std::vector<std::string> written;
    if (fs::path(csv_path).has_parent_path()) fs::create_directories(fs::path(csv_path).parent_path());
    write_file(csv_path, rows_to_csv(rows));
    written.push_back(csv_path);
    if (series_dir.empty()) return written;
    fs::create_directories(series_dir);

    std::set<std::pair<double, double>> points;
    for (const auto& r : rows) points.insert({r.beta, r.mu});
    const bool with_sweep = points.size() > 1;

    std::vector<std::string> instances;
    std::set<std::string> series;
    for (const auto& r : rows) {
        if (std::find(instances.begin(), instances.end(), r.instance_id) == instances.end())
            instances.push_back(r.instance_id);
        series.insert(r.series_name(with_sweep));
    }

    // One wide table per quantity: a row per instance, a column per series.
    auto table = [&](const std::string& file, auto quantity) {
        std::map<std::pair<std::string, std::string>, std::string> cell;
        for (const auto& r : rows)
            if (r.solved()) cell[{r.instance_id, r.series_name(with_sweep)}] = num(quantity(r));
        std::ostringstream os;
        os << "instance";
        for (const auto& s : series) os << "," << csv_field(s);
        os << "\n";
        for (const auto& id : instances) {
            os << csv_field(id);
            for (const auto& s : series) {
                auto it = cell.find({id, s});
                os << "," << (it == cell.end() ? "" : it->second);
            }
            os << "\n";
        }
        std::string path = (fs::path(series_dir) / file).string();
        write_file(path, os.str());
        written.push_back(path);
    };
    table("total_cost.csv", [](const ReportRow& r) { return r.total; });
    table("t1_cost.csv", [](const ReportRow& r) { return r.t1_cost; });
    table("t3_cost.csv", [](const ReportRow& r) { return r.t3_cost; });
    table("packages_per_truck.csv", [](const ReportRow& r) { return r.packages_per_truck; });
    table("packages_per_freighter.csv", [](const ReportRow& r) { return r.packages_per_freighter; });
    table("packages_per_trip.csv", [](const ReportRow& r) { return r.packages_per_trip; });
    table("drop_in_used.csv", [](const ReportRow& r) { return double(r.drop_in_used); });
    table("drop_out_used.csv", [](const ReportRow& r) { return double(r.drop_out_used); });

    std::ostringstream tally;
    tally << "method,runs,solved,best_count,mean_deviation,mean_total\n";
    for (const auto& s : summarize(rows))
        tally << csv_field(s.method) << "," << s.runs << "," << s.solved << "," << s.best_count << ","
              << num(s.mean_deviation) << "," << num(s.mean_total) << "\n";
    std::string path = (fs::path(series_dir) / "best_tally.csv").string();
    write_file(path, tally.str());
    written.push_back(path);
    return written;
}

}  // namespace tdppt
