#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tdppt/instance.hpp"

namespace tdppt::milp {

enum class VarKind { Binary, Integer, Continuous };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarRef {
    std::size_t index = 0;

    bool operator==(const VarRef&) const = default;
    auto operator<=>(const VarRef&) const = default;
};

struct Variable {
    std::string name;  // structured symbol, e.g. "r[c1,A,d0]"
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = kInf;
};

class LinExpr {
public:
    LinExpr() = default;
    LinExpr(VarRef v, double coef = 1.0) { add(v, coef); }  // NOLINT: implicit on purpose

    LinExpr& add(VarRef v, double coef = 1.0);
    LinExpr& add(const LinExpr& other, double scale = 1.0);
    LinExpr& add_constant(double c) {
        constant_ += c;
        return *this;
    }

    // Merges duplicate variables and drops zero coefficients. Terms end up
    // sorted by variable index.
    void canonicalize();

    const std::vector<std::pair<VarRef, double>>& terms() const { return terms_; }
    double constant() const { return constant_; }
    bool empty() const { return terms_.empty(); }
    double evaluate(const std::vector<double>& values) const;

private:
    std::vector<std::pair<VarRef, double>> terms_;
    double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double k, LinExpr e);

enum class Sense { Le, Eq, Ge };

struct LinConstraint {
    std::string name;
    LinExpr expr;  // constant folded into rhs on insertion
    Sense sense = Sense::Le;
    double rhs = 0.0;
};

class MilpModel {
public:
    explicit MilpModel(std::string formulation = {}, std::string instance_id = {});

    VarRef add_var(const std::string& name, VarKind kind, double lower = 0.0, double upper = kInf);
    VarRef add_binary(const std::string& name) { return add_var(name, VarKind::Binary, 0.0, 1.0); }
    VarRef add_continuous(const std::string& name, double lower = 0.0, double upper = kInf) {
        return add_var(name, VarKind::Continuous, lower, upper);
    }
    VarRef add_integer(const std::string& name, double lower = 0.0, double upper = kInf) {
        return add_var(name, VarKind::Integer, lower, upper);
    }

    // expr (sense) rhs; the expression's constant moves to the right-hand side.
    void add_constraint(const std::string& name, LinExpr expr, Sense sense, double rhs);
    void set_objective(LinExpr objective);

    std::optional<VarRef> find(const std::string& name) const;
    VarRef at(const std::string& name) const;

    const std::vector<Variable>& variables() const { return vars_; }
    const Variable& variable(VarRef v) const { return vars_.at(v.index); }
    const std::vector<LinConstraint>& constraints() const { return cons_; }
    const LinExpr& objective() const { return objective_; }

    std::size_t num_vars() const { return vars_.size(); }
    std::size_t count_prefix(const std::string& family) const;  // variables named family[...]
    std::size_t count_constraints(const std::string& prefix) const;

    std::map<std::string, std::string> metadata;

    // Throws when a constraint refers to an undeclared variable or a
    // coefficient is not finite.
    void check() const;

private:
    std::vector<Variable> vars_;
    std::unordered_map<std::string, std::size_t> by_name_;
    std::vector<LinConstraint> cons_;
    LinExpr objective_;
};

enum class SolveStatus { Optimal, Feasible, Infeasible, Timeout, Error };

const char* to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::Error;
    std::vector<double> values;  // indexed by VarRef::index
    double objective = kInf;
    double best_bound = -kInf;
    double wall_time = 0.0;
    std::string diagnostics;

    bool has_solution() const { return status == SolveStatus::Optimal || status == SolveStatus::Feasible; }
    double value(VarRef v) const { return values.at(v.index); }
};

struct SolveLimits {
    double time_limit = 60.0;  // seconds
    double rel_gap = 1e-6;

    void check() const;
};

// Big-M actually used by the builders: the configured value, lifted when it
// cannot dominate the horizon plus the longest travel time.
struct BigM {
    double value = 1000.0;
    bool lifted = false;
    std::string warning;
};

BigM big_m(const CostParams& params, double max_travel = 0.0);
BigM big_m(const Instance& instance);

}  // namespace tdppt::milp
