#include "tdppt/milp/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace tdppt::milp {

LinExpr& LinExpr::add(VarRef v, double coef) {
    terms_.emplace_back(v, coef);
    return *this;
}

LinExpr& LinExpr::add(const LinExpr& other, double scale) {
    for (const auto& [v, c] : other.terms_) terms_.emplace_back(v, c * scale);
    constant_ += scale * other.constant_;
    return *this;
}

void LinExpr::canonicalize() {
    std::stable_sort(terms_.begin(), terms_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<VarRef, double>> merged;
    for (const auto& t : terms_) {
        if (!merged.empty() && merged.back().first == t.first)
            merged.back().second += t.second;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
    terms_ = std::move(merged);
}

double LinExpr::evaluate(const std::vector<double>& values) const {
    double s = constant_;
    for (const auto& [v, c] : terms_) s += c * values.at(v.index);
    return s;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a.add(b); }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a.add(b, -1.0); }
LinExpr operator*(double k, LinExpr e) {
    LinExpr out;
    out.add(e, k);
    return out;
}

MilpModel::MilpModel(std::string formulation, std::string instance_id) {
    metadata["formulation"] = std::move(formulation);
    metadata["instance"] = std::move(instance_id);
}

VarRef MilpModel::add_var(const std::string& name, VarKind kind, double lower, double upper) {
    if (kind == VarKind::Binary) {
        lower = std::max(lower, 0.0);
        upper = std::min(upper, 1.0);
    }
    if (lower > upper) throw Error(fmt::format("variable {} has empty bounds", name));
    auto [it, fresh] = by_name_.emplace(name, vars_.size());
    if (!fresh) throw Error("duplicate variable name " + name);
    vars_.push_back(Variable{name, kind, lower, upper});
    return VarRef{it->second};
}

void MilpModel::add_constraint(const std::string& name, LinExpr expr, Sense sense, double rhs) {
    expr.canonicalize();
    double folded = rhs - expr.constant();
    LinExpr body;
    for (const auto& [v, c] : expr.terms()) body.add(v, c);
    cons_.push_back(LinConstraint{name, std::move(body), sense, folded});
}

void MilpModel::set_objective(LinExpr objective) {
    objective.canonicalize();
    objective_ = std::move(objective);
}

std::optional<VarRef> MilpModel::find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return VarRef{it->second};
}

VarRef MilpModel::at(const std::string& name) const {
    auto v = find(name);
    if (!v) throw Error("no variable named " + name);
    return *v;
}

std::size_t MilpModel::count_prefix(const std::string& family) const {
    std::string head = family + "[";
    return static_cast<std::size_t>(std::count_if(vars_.begin(), vars_.end(), [&](const Variable& v) {
        return v.name.compare(0, head.size(), head) == 0;
    }));
}

std::size_t MilpModel::count_constraints(const std::string& prefix) const {
    return static_cast<std::size_t>(std::count_if(cons_.begin(), cons_.end(), [&](const LinConstraint& c) {
        return c.name.compare(0, prefix.size(), prefix) == 0;
    }));
}

void MilpModel::check() const {
    auto check_expr = [&](const LinExpr& e, const std::string& where) {
        for (const auto& [v, c] : e.terms()) {
            if (v.index >= vars_.size()) throw Error(where + " references an undeclared variable");
            if (!std::isfinite(c)) throw Error(where + " has a non-finite coefficient");
        }
    };
    for (const auto& c : cons_) {
        check_expr(c.expr, "constraint " + c.name);
        if (!std::isfinite(c.rhs)) throw Error("constraint " + c.name + " has a non-finite right-hand side");
    }
    check_expr(objective_, "objective");
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Feasible: return "feasible";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Timeout: return "timeout";
        case SolveStatus::Error: return "error";
    }
    return "error";
}

void SolveLimits::check() const {
    if (!(time_limit > 0)) throw Error("time_limit must be positive");
    if (!(rel_gap > 0)) throw Error("rel_gap must be positive");
}

BigM big_m(const CostParams& params, double max_travel) {
    BigM m;
    m.value = params.big_m;
    double required = params.horizon() + max_travel;
    if (m.value < required) {
        m.warning = fmt::format("big-M {} cannot dominate horizon {} plus travel {}; raised to {}", m.value,
                                params.horizon(), max_travel, required + 1);
        m.value = required + 1;
        m.lifted = true;
    }
    return m;
}

BigM big_m(const Instance& instance) { return big_m(instance.cost_params, max_travel_time(instance)); }

}  // namespace tdppt::milp
