#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "tdppt/milp/backend.hpp"
#include "tdppt/models/full.hpp"

using namespace tdppt;
using namespace tdppt::milp;

namespace {

const Backend& cbc() {
    static auto b = make_backend("cbc");
    return *b;
}

MilpModel one_var(double lower_rhs) {
    MilpModel m("toy");
    VarRef x = m.add_binary("x");
    m.add_constraint("lower", LinExpr(x), Sense::Ge, lower_rhs);
    m.set_objective(LinExpr(x));
    return m;
}

}  // namespace

TEST_CASE("LP text") {
    MilpModel m = one_var(1);
    std::string lp = write_lp(m);
    CHECK(lp.find("Minimize") != std::string::npos);
    CHECK(lp.find("Subject To") != std::string::npos);
    CHECK(lp.find("Binary") != std::string::npos);
    CHECK(write_lp(m) == lp);

    Instance in = fixtures::micro1();
    Compatibility cp(in);
    auto a = models::build_full(in, cp), b = models::build_full(in, cp);
    CHECK(write_lp(a.model) == write_lp(b.model));
}

TEST_CASE("LP names are sanitized and unique") {
    MilpModel m;
    m.add_continuous("t[c1,A]");
    m.add_continuous("t(c1,A)");
    m.add_continuous(std::string(100, 'v'));
    m.add_continuous("x with space");
    LpNames n = lp_names(m);
    std::set<std::string> seen(n.vars.begin(), n.vars.end());
    CHECK(seen.size() == 4);
    for (const auto& s : n.vars) {
        CHECK(s.size() <= kMaxLpName);
        CHECK(s.find(' ') == std::string::npos);
        CHECK(s.find('[') == std::string::npos);
    }
    CHECK(lp_names(m).vars == n.vars);
}

TEST_CASE("model checks") {
    MilpModel m;
    VarRef x = m.add_continuous("x");
    CHECK_THROWS_AS(m.add_continuous("x"), Error);
    CHECK_THROWS_AS(m.at("nope"), Error);
    CHECK(m.at("x") == x);
    LinExpr e;
    e.add(x, 2).add(x, 3).add_constant(4);
    e.canonicalize();
    REQUIRE(e.terms().size() == 1);
    CHECK(e.terms()[0].second == 5);
    m.add_constraint("c", e, Sense::Le, 10);
    CHECK(m.constraints()[0].rhs == doctest::Approx(6));
    LinExpr bad;
    bad.add(VarRef{7});
    m.add_constraint("bad", bad, Sense::Le, 1);
    CHECK_THROWS_AS(m.check(), Error);
}

TEST_CASE("solves through the external solver") {
    SUBCASE("trivial optimum") {
        auto r = solve(one_var(1), cbc(), {});
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(r.objective == doctest::Approx(1));
        CHECK(r.values[0] == 1.0);
    }
    SUBCASE("infeasible") {
        MilpModel m = one_var(1);
        m.add_constraint("upper", LinExpr(VarRef{0}), Sense::Le, 0);
        CHECK(solve(m, cbc(), {}).status == SolveStatus::Infeasible);
    }
    SUBCASE("integer rounding and reported objective agree") {
        MilpModel m("knap");
        LinExpr obj, cap;
        const double w[] = {3, 4, 5, 6}, v[] = {4, 5, 7, 8};
        for (int k = 0; k < 4; ++k) {
            VarRef x = m.add_binary(fmt::format("x[{}]", k));
            obj.add(x, -v[k]);
            cap.add(x, w[k]);
        }
        m.add_constraint("cap", cap, Sense::Le, 10);
        m.set_objective(obj);
        auto r = solve(m, cbc(), {});
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(r.objective == doctest::Approx(-13));
        CHECK(m.objective().evaluate(r.values) == doctest::Approx(r.objective).epsilon(1e-9));
    }
    SUBCASE("MICRO-1 through the LP file") {
        Instance in = fixtures::micro1();
        Compatibility cp(in);
        auto full = models::build_full(in, cp);
        auto r = solve(full.model, cbc(), {});
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(r.objective == doctest::Approx(20 + std::sqrt(8.0)).epsilon(1e-6));
        CHECK(full.model.objective().evaluate(r.values) == doctest::Approx(r.objective).epsilon(1e-9));
    }
    SUBCASE("limits are validated") {
        CHECK_THROWS_AS(solve(one_var(1), cbc(), {0, 1e-6}), Error);
        CHECK_THROWS_AS(solve(one_var(1), cbc(), {10, -1}), Error);
    }
}

TEST_CASE("second backend agrees") {
    if (std::system("python3 -c 'import highspy' >/dev/null 2>&1") != 0) {
        MESSAGE("highspy not importable; skipped");
        return;
    }
    auto highs = make_backend("highs");
    Instance in = fixtures::micro1();
    Compatibility cp(in);
    auto r = solve(models::build_full(in, cp).model, *highs, {});
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(20 + std::sqrt(8.0)).epsilon(1e-6));
}

TEST_CASE("solution files") {
    MilpModel m = one_var(1);
    LpNames n = lp_names(m);
    auto raw = parse_solution("Optimal - objective value 1.00000000\n      0 " + n.vars[0] + "  1  0\n");
    CHECK(raw.status == SolveStatus::Optimal);
    auto res = finish_result(m, n, raw);
    CHECK(res.values[0] == 1.0);
    CHECK(parse_solution("Infeasible - objective value 0\n").status == SolveStatus::Infeasible);
    CHECK(parse_solution("Stopped on time - objective value 1e50\n").status == SolveStatus::Timeout);
    CHECK(parse_solution("Stopped on time - objective value 3\n      0 " + n.vars[0] + " 1 0\n").status ==
          SolveStatus::Feasible);
    auto js = parse_solution(R"({"status": "optimal", "objective": 1, "values": {")" + n.vars[0] + R"(": 0.9999999}})");
    CHECK(js.status == SolveStatus::Optimal);
    CHECK(finish_result(m, n, js).values[0] == 1.0);
}

TEST_CASE("big-M") {
    CostParams p;
    BigM d = big_m(p);
    CHECK(d.value == 1000);
    CHECK_FALSE(d.lifted);
    CHECK(d.value >= p.horizon());
    p.period_count = 2000 / 30 + 1;
    BigM lifted = big_m(p);
    CHECK(lifted.lifted);
    CHECK(lifted.value == doctest::Approx(p.horizon() + 1));
    CHECK_FALSE(lifted.warning.empty());
    CHECK(big_m(CostParams{}, 200).value == doctest::Approx(900 + 200 + 1));
}
