#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#include "fixtures.hpp"
#include "tdppt/instance_io.hpp"
#include "tdppt/plan.hpp"

using namespace tdppt;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args) {
    std::string cmd = std::string(TDPPT_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch() {
    fs::path d = fs::temp_directory_path() / "tdppt-cli-test";
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(cli("").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("solve --method full").code == 2);
    CHECK(cli("--help").code == 0);
}

TEST_CASE("gen writes a valid instance") {
    fs::path d = scratch();
    auto r = cli("gen --customers 10 --lines 1 --seed 7 --out " + (d / "i.json").string());
    CHECK(r.code == 0);
    Instance in = load_instance((d / "i.json").string());
    CHECK(in.customers.size() >= 10);
    auto again = cli("gen --customers 10 --lines 1 --seed 7 --out " + (d / "j.json").string());
    CHECK(read_file((d / "i.json").string()) == read_file((d / "j.json").string()));
}

TEST_CASE("solve, validate and export on MICRO-1") {
    fs::path d = scratch();
    save_instance(fixtures::micro1(), (d / "m.json").string());
    const std::string inst = " --instance " + (d / "m.json").string();

    auto r = cli("solve" + inst + " --method d2 --t2-obj obj2 --out " + (d / "plan.json").string() + " --metrics " +
                 (d / "metrics.json").string());
    CHECK(r.code == 0);
    Plan p = parse_plan(read_file((d / "plan.json").string()));
    CHECK(p.cost.total == doctest::Approx(22.8284).epsilon(1e-5));
    auto metrics = nlohmann::json::parse(read_file((d / "metrics.json").string()));
    CHECK(metrics.at("violations") == 0);
    CHECK(metrics.at("stages").size() == 3);

    auto v = cli("validate" + inst + " --plan " + (d / "plan.json").string());
    CHECK(v.code == 0);

    p.itineraries[0].drop_out_stop = "A";
    write_file((d / "bad.json").string(), serialize_plan(p));
    auto bad = cli("validate" + inst + " --plan " + (d / "bad.json").string());
    CHECK(bad.code == 1);
    CHECK(bad.out.find("STOP_DISTINCT") != std::string::npos);

    auto e1 = cli("export-lp" + inst + " --method full --out " + (d / "a.lp").string());
    auto e2 = cli("export-lp" + inst + " --method full --out " + (d / "b.lp").string());
    CHECK(e1.code == 0);
    CHECK(e2.code == 0);
    std::string lp = read_file((d / "a.lp").string());
    CHECK(lp == read_file((d / "b.lp").string()));
    CHECK(lp.find("Subject To") != std::string::npos);
}

TEST_CASE("runtime failures report JSON") {
    fs::path d = scratch();
    save_instance(fixtures::micro1(), (d / "m.json").string());
    auto r = cli("solve --instance " + (d / "m.json").string() + " --method d1 --t2-obj obj2 --out " +
                 (d / "p.json").string());
    CHECK(r.code == 1);
    auto brace = r.out.find('{');
    REQUIRE(brace != std::string::npos);
    auto doc = nlohmann::json::parse(r.out.substr(brace));
    CHECK(doc.at("stage") == "T2");
    CHECK(doc.at("message").get<std::string>().find("stranded") != std::string::npos);

    auto missing = cli("solve --instance " + (d / "nope.json").string() + " --method full --out x.json");
    CHECK(missing.code == 2);
    auto obj3 = cli("solve --instance " + (d / "m.json").string() + " --method d3 --t2-obj obj3 --out x.json");
    CHECK(obj3.code == 1);
}

TEST_CASE("compare and report") {
    fs::path d = scratch();
    save_instance(fixtures::micro1(), (d / "m.json").string());
    auto r = cli("compare --instances " + (d / "m.json").string() + " --methods full d2-obj2 vrptw --out " +
                 (d / "r.csv").string() + " --series-dir " + (d / "series").string());
    CHECK(r.code == 0);
    CHECK(fs::exists(d / "series" / "best_tally.csv"));
    auto again = cli("report --in " + (d / "r.csv").string() + " --out " + (d / "r2.csv").string() +
                     " --series-dir " + (d / "series2").string());
    CHECK(again.code == 0);
    CHECK(read_file((d / "series" / "total_cost.csv").string()) ==
          read_file((d / "series2" / "total_cost.csv").string()));
    fs::remove_all(d);
}
