#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdppt/instance.hpp"
#include "tdppt/milp/backend.hpp"
#include "tdppt/pipeline.hpp"

namespace tdppt {

struct ReportRow {
    std::string instance_id;
    std::string method;  // run label, e.g. "d2-obj2"
    std::string t2_obj;  // empty for full / vrptw
    double beta = 0.0;
    double mu = 0.0;
    std::string status;  // optimal | feasible | failed
    double t1_cost = 0.0;
    double t3_cost = 0.0;
    double service_cost = 0.0;
    double total = 0.0;
    double runtime = 0.0;
    int drop_in_used = 0;
    int drop_out_used = 0;
    int trucks_used = 0;
    int freighters_used = 0;
    int trips_used = 0;
    double packages_per_truck = 0.0;
    double packages_per_freighter = 0.0;
    double packages_per_trip = 0.0;
    std::size_t violations = 0;
    std::optional<double> deviation;  // relative to the best tiered method on the same instance and sweep point
    bool best = false;
    std::string failure;

    bool solved() const { return status == "optimal" || status == "feasible"; }
    // Series key: the label, plus the sweep point when one is set.
    std::string series_name(bool with_sweep) const;
};

ReportRow make_row(const Instance& in, const RunConfig& config, const RunResult& result);

struct CompareOptions {
    std::vector<double> betas;  // empty: the instance's own value
    std::vector<double> mus;
    std::string artifacts_root;  // per-run artifacts under <root>/<instance>/<label>[...]
};

// Runs every config on every instance under every sweep point. Failures are
// recorded per cell; the sweep never aborts.
std::vector<ReportRow> compare_methods(const std::vector<Instance>& instances, const std::vector<RunConfig>& configs,
                                       const milp::Backend& backend, const CompareOptions& options = {});

// Fills deviation and best flags. The baseline is not a tiered method and is
// left out of both.
void rank_rows(std::vector<ReportRow>& rows);

struct MethodSummary {
    std::string method;
    int runs = 0;
    int solved = 0;
    int best_count = 0;
    double mean_deviation = 0.0;  // over solved rows with a deviation
    double mean_total = 0.0;
};
std::vector<MethodSummary> summarize(const std::vector<ReportRow>& rows);

std::string rows_to_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_csv(const std::string& text);

// Writes <csv_path> plus series files into <series_dir>:
// total_cost.csv, t1_cost.csv, t3_cost.csv, packages_per_truck.csv,
// packages_per_freighter.csv, packages_per_trip.csv, drop_in_used.csv,
// drop_out_used.csv and best_tally.csv. Returns the written paths.
std::vector<std::string> emit_report(const std::vector<ReportRow>& rows, const std::string& csv_path,
                                     const std::string& series_dir);

}  // namespace tdppt
