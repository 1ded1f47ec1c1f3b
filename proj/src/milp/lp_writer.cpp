#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "tdppt/milp/backend.hpp"

namespace tdppt::milp {

namespace {

std::string sanitize(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (char ch : name) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c == '_')
            out.push_back(ch);
        else if (ch == '[' || ch == ',')
            out.push_back('_');
        // closing brackets and anything else are dropped
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '_')
        out.insert(out.begin(), 'n');
    return out;
}

std::vector<std::string> assign(const std::vector<std::string>& raw, char fallback) {
    std::vector<std::string> out(raw.size());
    std::set<std::string> taken;
    std::vector<std::size_t> deferred;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        std::string s = sanitize(raw[i]);
        // Positional names are reserved so the fallback never collides.
        bool positional = s.size() > 1 && s[0] == fallback &&
                          s.find_first_not_of("0123456789", 1) == std::string::npos;
        if (s.size() > kMaxLpName || positional || !taken.insert(s).second) {
            deferred.push_back(i);
            continue;
        }
        out[i] = std::move(s);
    }
    for (std::size_t i : deferred) {
        std::string s = fmt::format("{}{}", fallback, i);
        while (!taken.insert(s).second) s += "_";
        out[i] = std::move(s);
    }
    return out;
}

std::string num(double v) { return fmt::format("{:.15g}", v); }

void write_terms(std::ostringstream& os, const LinExpr& e, const LpNames& names, const std::string& zero) {
    if (e.empty()) {
        os << " 0 " << zero;
        return;
    }
    int on_line = 0;
    for (const auto& [v, c] : e.terms()) {
        if (on_line == 8) {
            os << "\n   ";
            on_line = 0;
        }
        os << (c < 0 ? " - " : " + ") << num(std::fabs(c)) << ' ' << names.vars[v.index];
        ++on_line;
    }
}

}  // namespace

LpNames lp_names(const MilpModel& model) {
    std::vector<std::string> v, r;
    for (const auto& var : model.variables()) v.push_back(var.name);
    for (const auto& con : model.constraints()) r.push_back("R_" + con.name);
    return LpNames{assign(v, 'v'), assign(r, 'c')};
}

std::string write_lp(const MilpModel& model) { return write_lp(model, lp_names(model)); }

std::string write_lp(const MilpModel& model, const LpNames& names) {
    model.check();
    const std::string zero = "zero__";
    bool need_zero = model.objective().empty();
    for (const auto& c : model.constraints()) need_zero = need_zero || c.expr.empty();

    std::ostringstream os;
    os << "\\ formulation: " << model.metadata.at("formulation") << "\n";
    os << "\\ instance: " << model.metadata.at("instance") << "\n";
    os << "Minimize\n obj:";
    write_terms(os, model.objective(), names, zero);
    os << "\nSubject To\n";
    for (std::size_t i = 0; i < model.constraints().size(); ++i) {
        const auto& c = model.constraints()[i];
        os << ' ' << names.rows[i] << ':';
        write_terms(os, c.expr, names, zero);
        os << (c.sense == Sense::Le ? " <= " : c.sense == Sense::Ge ? " >= " : " = ") << num(c.rhs) << '\n';
    }

    os << "Bounds\n";
    const auto& vars = model.variables();
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const Variable& v = vars[i];
        if (v.kind == VarKind::Binary) continue;
        const std::string& n = names.vars[i];
        bool lo_inf = std::isinf(v.lower), hi_inf = std::isinf(v.upper);
        if (lo_inf && hi_inf)
            os << ' ' << n << " free\n";
        else if (hi_inf)
            os << ' ' << n << " >= " << num(v.lower) << '\n';
        else if (lo_inf)
            os << " -inf <= " << n << " <= " << num(v.upper) << '\n';
        else if (v.lower == v.upper)
            os << ' ' << n << " = " << num(v.lower) << '\n';
        else
            os << ' ' << num(v.lower) << " <= " << n << " <= " << num(v.upper) << '\n';
    }
    if (need_zero) os << ' ' << zero << " = 0\n";

    auto section = [&](const char* head, VarKind kind) {
        bool any = false;
        int on_line = 0;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (vars[i].kind != kind) continue;
            if (!any) os << head << '\n';
            any = true;
            os << ' ' << names.vars[i];
            if (++on_line == 10) {
                os << '\n';
                on_line = 0;
            }
        }
        if (any && on_line != 0) os << '\n';
    };
    section("Binary", VarKind::Binary);
    section("General", VarKind::Integer);
    os << "End\n";
    return os.str();
}

}  // namespace tdppt::milp
