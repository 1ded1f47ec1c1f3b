#include <doctest.h>

#include <filesystem>
#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "tdppt/instance_io.hpp"
#include "tdppt/report.hpp"

using namespace tdppt;

namespace {

ReportRow row(const std::string& inst, const std::string& method, double total) {
    ReportRow r;
    r.instance_id = inst;
    r.method = method;
    r.status = "optimal";
    r.total = total;
    r.t1_cost = total / 2;
    r.beta = 0.5;
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("ranking and tally") {
    std::vector<ReportRow> rows = {row("i1", "full", 10), row("i1", "d2-obj2", 12), row("i1", "vrptw", 5),
                                   row("i2", "full", 20), row("i2", "d2-obj2", 20), row("i2", "vrptw", 4)};
    rank_rows(rows);
    // the baseline never counts as best and has no deviation
    CHECK_FALSE(rows[2].best);
    CHECK_FALSE(rows[2].deviation);
    CHECK(rows[0].best);
    CHECK(*rows[0].deviation == doctest::Approx(0));
    CHECK(*rows[1].deviation == doctest::Approx(0.2));
    CHECK(rows[3].best);
    CHECK(rows[4].best);

    // recompute the tally independently
    std::map<std::string, int> want;
    for (const std::string inst : {"i1", "i2"}) {
        double best = 1e300;
        for (const auto& r : rows)
            if (r.instance_id == inst && r.method != "vrptw") best = std::min(best, r.total);
        for (const auto& r : rows)
            if (r.instance_id == inst && r.method != "vrptw" && r.total <= best + 1e-6) ++want[r.method];
    }
    for (const auto& s : summarize(rows)) {
        CHECK(s.runs == 2);
        CHECK(s.best_count == want[s.method]);
        if (s.method == "d2-obj2") CHECK(s.mean_deviation == doctest::Approx(0.1));
    }

    SUBCASE("failed rows are left out") {
        rows[0].status = "failed";
        rank_rows(rows);
        CHECK(rows[1].best);
        CHECK_FALSE(rows[0].deviation);
        for (const auto& s : summarize(rows))
            if (s.method == "full") CHECK(s.solved == 1);
    }
}

TEST_CASE("CSV round trip") {
    std::vector<ReportRow> rows = {row("i,1", "full", 10.125), row("i\"2", "d1-obj3", 7)};
    rows[1].status = "failed";
    rows[1].failure = "T2: model infeasible";
    rows[0].deviation = 0.25;
    rows[0].best = true;
    rows[0].drop_in_used = 3;
    auto back = rows_from_csv(rows_to_csv(rows));
    REQUIRE(back.size() == 2);
    CHECK(back[0].instance_id == "i,1");
    CHECK(back[1].instance_id == "i\"2");
    CHECK(back[0].total == doctest::Approx(10.125));
    CHECK(*back[0].deviation == doctest::Approx(0.25));
    CHECK(back[0].best);
    CHECK(back[0].drop_in_used == 3);
    CHECK(back[1].failure == rows[1].failure);
    CHECK_FALSE(back[1].deviation);
    CHECK(rows_to_csv(back) == rows_to_csv(rows));
}

TEST_CASE("report files") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "tdppt-report-test";
    fs::remove_all(dir);
    std::vector<ReportRow> rows;
    for (const std::string inst : {"i1", "i2"})
        for (const std::string m : {"full", "d2-obj2", "d3-obj1"}) rows.push_back(row(inst, m, 10));
    rank_rows(rows);
    auto written = emit_report(rows, (dir / "report.csv").string(), (dir / "series").string());
    CHECK(written.size() == 10);
    CHECK(lines_of(read_file((dir / "report.csv").string())).size() == 7);
    auto total = lines_of(read_file((dir / "series" / "total_cost.csv").string()));
    REQUIRE(total.size() == 3);
    CHECK(total[0] == "instance,d2-obj2,d3-obj1,full");
    auto tally = lines_of(read_file((dir / "series" / "best_tally.csv").string()));
    CHECK(tally.size() == 4);

    SUBCASE("one method") {
        std::vector<ReportRow> single = {row("i1", "full", 3)};
        emit_report(single, (dir / "one.csv").string(), (dir / "one").string());
        auto t = lines_of(read_file((dir / "one" / "total_cost.csv").string()));
        CHECK(t == std::vector<std::string>{"instance,full", "i1,3.000000"});
    }
    SUBCASE("sweep points become separate series") {
        rows[0].mu = 0.5;
        emit_report(rows, (dir / "sweep.csv").string(), (dir / "sweep").string());
        auto t = lines_of(read_file((dir / "sweep" / "total_cost.csv").string()));
        CHECK(t[0].find("full@beta=0.5,mu=0.5") != std::string::npos);
    }
    CHECK_THROWS_AS(emit_report({}, (dir / "x.csv").string(), ""), Error);
    fs::remove_all(dir);
}

TEST_CASE("comparison grid") {
    auto backend = milp::make_backend("cbc");
    Instance a = fixtures::micro1();
    Instance b = fixtures::micro1();
    b.id = "micro-1b";
    b.customers[0].location = {54, 0};
    std::vector<RunConfig> cfgs = {parse_run_label("full"), parse_run_label("d2-obj2"), parse_run_label("d1-obj1")};
    auto rows = compare_methods({a, b}, cfgs, *backend);
    REQUIRE(rows.size() == 6);
    int failed = 0;
    for (const auto& r : rows) {
        if (r.method == "d1-obj1") {
            CHECK(r.status == "failed");
            CHECK_FALSE(r.failure.empty());
            ++failed;
        } else {
            CHECK(r.solved());
            CHECK(r.violations == 0);
            CHECK(r.best);
        }
    }
    CHECK(failed == 2);

    CompareOptions sweep;
    sweep.betas = {0.25, 1.0};
    auto swept = compare_methods({a}, {parse_run_label("full")}, *backend, sweep);
    REQUIRE(swept.size() == 2);
    CHECK(swept[1].t3_cost == doctest::Approx(4 * swept[0].t3_cost));
    CHECK(swept[0].best);
    CHECK(swept[1].best);
}
