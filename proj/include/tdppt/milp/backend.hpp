#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tdppt/milp/model.hpp"

namespace tdppt::milp {

// LP-file names for every variable and constraint. Symbols that the format
// cannot carry are sanitized; collisions and over-long names fall back to
// positional names. Stable for a given model.
struct LpNames {
    std::vector<std::string> vars;
    std::vector<std::string> rows;
};

inline constexpr std::size_t kMaxLpName = 64;

LpNames lp_names(const MilpModel& model);

// CPLEX-LP text. Deterministic.
std::string write_lp(const MilpModel& model);
std::string write_lp(const MilpModel& model, const LpNames& names);

// Parsed solution file before it is mapped back onto model variables.
struct RawSolution {
    SolveStatus status = SolveStatus::Error;
    bool has_values = false;
    double objective = kInf;
    std::vector<std::pair<std::string, double>> values;
    std::string message;
};

// "<status line>" followed by "index name value reduced-cost" rows, as
// written by CBC.
RawSolution parse_listing_solution(const std::string& text);
// JSON document {"status", "objective", "best_bound", "values": {name: value}}.
RawSolution parse_structured_solution(const std::string& text);
// Dispatches on the first non-blank character.
RawSolution parse_solution(const std::string& text);

// Maps raw values onto the model, snaps integral variables within 1e-6 and
// recomputes the objective from the snapped values. Variables the solver did
// not report take the value of their nearest bound to zero.
SolveResult finish_result(const MilpModel& model, const LpNames& names, const RawSolution& raw);

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    virtual SolveResult solve(const MilpModel& model, const SolveLimits& limits) const = 0;
};

// Runs an external solver binary on a temporary LP file.
class CbcBackend : public Backend {
public:
    explicit CbcBackend(std::string binary = {});
    std::string name() const override { return "cbc"; }
    SolveResult solve(const MilpModel& model, const SolveLimits& limits) const override;
    const std::string& binary() const { return binary_; }

private:
    std::string binary_;
};

// Runs a HiGHS driver that reads an LP file and writes the structured
// solution document (tools/highs_shim.py works).
class HighsBackend : public Backend {
public:
    explicit HighsBackend(std::string command = {});
    std::string name() const override { return "highs"; }
    SolveResult solve(const MilpModel& model, const SolveLimits& limits) const override;

private:
    std::string command_;
};

// "cbc" or "highs". The binary comes from TDPPT_SOLVER_BIN, then PATH, then
// the location found at configure time.
std::unique_ptr<Backend> make_backend(const std::string& name = "cbc");

SolveResult solve(const MilpModel& model, const Backend& backend, const SolveLimits& limits);

// Thrown by decoders when a binary or integer variable is not integral.
class DecodeError : public Error {
public:
    using Error::Error;
};

inline constexpr double kIntegralityTol = 1e-6;

// True when the variable's value is 1 within the integrality tolerance.
bool is_one(const SolveResult& result, VarRef v);

}  // namespace tdppt::milp
