#include "tdppt/milp/backend.hpp"

#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>
#include <json.hpp>

namespace tdppt::milp {

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return {};
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string tail(const std::string& s, std::size_t n = 2000) {
    return s.size() <= n ? s : s.substr(s.size() - n);
}

struct ScratchDir {
    fs::path path;
    ScratchDir() {
        std::string tmpl = (fs::temp_directory_path() / "tdppt-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw Error("cannot create scratch directory");
        path = tmpl;
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct ProcessOutcome {
    int exit_code = -1;
    bool killed = false;
    bool spawn_failed = false;
};

// fork/exec with stdout+stderr captured to `log`, killed after `deadline` seconds.
ProcessOutcome run_process(const std::vector<std::string>& argv, const fs::path& log, double deadline) {
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_t pid = fork();
    if (pid < 0) return ProcessOutcome{-1, false, true};
    if (pid == 0) {
        int fd = open(log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (fd >= 0) {
            dup2(fd, STDOUT_FILENO);
            dup2(fd, STDERR_FILENO);
            close(fd);
        }
        execvp(args[0], args.data());
        _exit(127);
    }

    ProcessOutcome out;
    auto start = std::chrono::steady_clock::now();
    for (;;) {
        int status = 0;
        pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            if (WIFEXITED(status)) out.exit_code = WEXITSTATUS(status);
            if (WIFSIGNALED(status)) out.exit_code = 128 + WTERMSIG(status);
            if (out.exit_code == 127) out.spawn_failed = true;
            return out;
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > deadline) {
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            out.killed = true;
            return out;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(elapsed < 1.0 ? 2 : 20));
    }
}

std::string find_on_path(const std::string& exe) {
    const char* path = std::getenv("PATH");
    if (!path) return {};
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty()) continue;
        fs::path p = fs::path(dir) / exe;
        if (access(p.c_str(), X_OK) == 0) return p.string();
    }
    return {};
}

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

double parse_after(const std::string& text, const std::string& key) {
    auto p = text.rfind(key);
    if (p == std::string::npos) return NAN;
    try {
        return std::stod(text.substr(p + key.size()));
    } catch (...) {
        return NAN;
    }
}

}  // namespace

RawSolution parse_listing_solution(const std::string& text) {
    RawSolution raw;
    std::istringstream is(text);
    std::string head;
    while (head.empty() && std::getline(is, head)) {
        auto b = head.find_first_not_of(" \t\r");
        head = b == std::string::npos ? "" : head.substr(b);
    }
    raw.message = head;
    auto obj_pos = head.find("objective value");
    if (obj_pos != std::string::npos) {
        try {
            raw.objective = std::stod(head.substr(obj_pos + 15));
        } catch (...) {
        }
    }

    if (head.rfind("Optimal", 0) == 0) {
        raw.status = SolveStatus::Optimal;
        raw.has_values = true;
    } else if (head.find("nfeasible") != std::string::npos) {
        raw.status = SolveStatus::Infeasible;
    } else if (head.rfind("Stopped", 0) == 0) {
        bool none = head.find("no integer solution") != std::string::npos || !(std::fabs(raw.objective) < 1e49);
        raw.status = none ? SolveStatus::Timeout : SolveStatus::Feasible;
        raw.has_values = !none;
    } else if (head.find("nbounded") != std::string::npos) {
        raw.status = SolveStatus::Error;
        raw.message = "unbounded: " + head;
    } else {
        raw.status = SolveStatus::Error;
        raw.message = "unrecognized solution header: " + head;
    }
    if (!raw.has_values) return raw;

    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> toks;
        while (ls >> tok) toks.push_back(tok);
        if (!toks.empty() && toks.front() == "**") toks.erase(toks.begin());
        if (toks.size() < 3) continue;
        try {
            raw.values.emplace_back(toks[1], std::stod(toks[2]));
        } catch (...) {
            throw Error("malformed solution line: " + line);
        }
    }
    return raw;
}

RawSolution parse_structured_solution(const std::string& text) {
    RawSolution raw;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        raw.message = std::string("malformed solution document: ") + e.what();
        return raw;
    }
    std::string st = doc.value("status", "error");
    static const std::unordered_map<std::string, SolveStatus> table{
        {"optimal", SolveStatus::Optimal},       {"feasible", SolveStatus::Feasible},
        {"infeasible", SolveStatus::Infeasible}, {"timeout", SolveStatus::Timeout},
        {"error", SolveStatus::Error}};
    auto it = table.find(st);
    raw.status = it == table.end() ? SolveStatus::Error : it->second;
    raw.message = doc.value("message", st);
    if (doc.contains("objective") && doc["objective"].is_number()) raw.objective = doc["objective"].get<double>();
    if (doc.contains("values") && doc["values"].is_object()) {
        for (auto v = doc["values"].begin(); v != doc["values"].end(); ++v)
            if (v->is_number()) raw.values.emplace_back(v.key(), v->get<double>());
        raw.has_values = raw.status == SolveStatus::Optimal || raw.status == SolveStatus::Feasible;
    }
    return raw;
}

RawSolution parse_solution(const std::string& text) {
    auto b = text.find_first_not_of(" \t\r\n");
    if (b != std::string::npos && text[b] == '{') return parse_structured_solution(text);
    return parse_listing_solution(text);
}

SolveResult finish_result(const MilpModel& model, const LpNames& names, const RawSolution& raw) {
    SolveResult res;
    res.status = raw.status;
    res.diagnostics = raw.message;
    if (!raw.has_values) {
        if (res.status == SolveStatus::Optimal || res.status == SolveStatus::Feasible) {
            res.status = SolveStatus::Error;
            res.diagnostics = "solver reported a solution without values";
        }
        return res;
    }

    std::unordered_map<std::string, std::size_t> by_lp;
    for (std::size_t i = 0; i < names.vars.size(); ++i) by_lp.emplace(names.vars[i], i);

    const auto& vars = model.variables();
    res.values.assign(vars.size(), NAN);
    for (const auto& [n, v] : raw.values) {
        auto it = by_lp.find(n);
        if (it != by_lp.end()) res.values[it->second] = v;
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        double& x = res.values[i];
        if (std::isnan(x)) x = std::clamp(0.0, vars[i].lower, vars[i].upper);
        if (vars[i].kind != VarKind::Continuous) {
            double r = std::round(x);
            if (std::fabs(x - r) <= kIntegralityTol) x = r;
        }
    }
    res.objective = model.objective().evaluate(res.values);
    return res;
}

bool is_one(const SolveResult& result, VarRef v) {
    double x = result.value(v);
    if (std::fabs(x - 1.0) <= kIntegralityTol) return true;
    if (std::fabs(x) <= kIntegralityTol) return false;
    throw DecodeError(fmt::format("fractional binary value {} at variable #{}", x, v.index));
}

CbcBackend::CbcBackend(std::string binary) : binary_(std::move(binary)) {
    if (binary_.empty()) {
        if (const char* env = std::getenv("TDPPT_SOLVER_BIN"); env && *env) binary_ = env;
    }
    if (binary_.empty()) binary_ = find_on_path("cbc");
#ifdef TDPPT_DEFAULT_CBC
    if (binary_.empty()) binary_ = TDPPT_DEFAULT_CBC;
#endif
}

SolveResult CbcBackend::solve(const MilpModel& model, const SolveLimits& limits) const {
    limits.check();
    auto start = std::chrono::steady_clock::now();
    SolveResult res;
    if (binary_.empty()) {
        res.diagnostics = "no CBC binary configured (set TDPPT_SOLVER_BIN)";
        return res;
    }
    ScratchDir dir;
    LpNames names = lp_names(model);
    fs::path lp = dir.path / "model.lp", sol = dir.path / "model.sol", log = dir.path / "solver.log";
    {
        std::ofstream f(lp);
        f << write_lp(model, names);
    }
    std::vector<std::string> argv{binary_, lp.string(), "sec", fmt::format("{}", limits.time_limit),
                                  "ratio", fmt::format("{}", limits.rel_gap), "allowableGap", "1e-9",
                                  "solve", "solu", sol.string()};
    ProcessOutcome run = run_process(argv, log, limits.time_limit * 1.5 + 30.0);
    std::string out = slurp(log);

    if (run.spawn_failed) {
        res.diagnostics = "cannot start solver " + binary_;
    } else if (run.killed) {
        res.status = SolveStatus::Timeout;
        res.diagnostics = "solver killed by watchdog";
    } else if (!fs::exists(sol)) {
        res.diagnostics = fmt::format("solver exited with code {} and no solution file\n{}", run.exit_code, tail(out));
    } else {
        res = finish_result(model, names, parse_listing_solution(slurp(sol)));
        double bound = parse_after(out, "Lower bound:");
        if (res.status == SolveStatus::Optimal)
            res.best_bound = std::isnan(bound) ? res.objective : bound;
        else if (!std::isnan(bound))
            res.best_bound = bound;
        if (res.status == SolveStatus::Error) res.diagnostics += "\n" + tail(out);
    }
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

HighsBackend::HighsBackend(std::string command) : command_(std::move(command)) {
    if (command_.empty()) {
        if (const char* env = std::getenv("TDPPT_SOLVER_BIN"); env && *env) command_ = env;
    }
#ifdef TDPPT_HIGHS_SHIM
    if (command_.empty()) command_ = std::string("python3 ") + TDPPT_HIGHS_SHIM;
#endif
}

SolveResult HighsBackend::solve(const MilpModel& model, const SolveLimits& limits) const {
    limits.check();
    auto start = std::chrono::steady_clock::now();
    SolveResult res;
    auto argv = split_words(command_);
    if (argv.empty()) {
        res.diagnostics = "no HiGHS driver configured (set TDPPT_SOLVER_BIN)";
        return res;
    }
    ScratchDir dir;
    LpNames names = lp_names(model);
    fs::path lp = dir.path / "model.lp", sol = dir.path / "model.json", log = dir.path / "solver.log";
    {
        std::ofstream f(lp);
        f << write_lp(model, names);
    }
    argv.insert(argv.end(), {lp.string(), sol.string(), "--time-limit", fmt::format("{}", limits.time_limit),
                             "--gap", fmt::format("{}", limits.rel_gap)});
    ProcessOutcome run = run_process(argv, log, limits.time_limit * 1.5 + 30.0);
    if (run.spawn_failed) {
        res.diagnostics = "cannot start " + command_;
    } else if (run.killed) {
        res.status = SolveStatus::Timeout;
        res.diagnostics = "solver killed by watchdog";
    } else if (!fs::exists(sol)) {
        res.diagnostics = fmt::format("driver exited with code {}\n{}", run.exit_code, tail(slurp(log)));
    } else {
        std::string text = slurp(sol);
        res = finish_result(model, names, parse_structured_solution(text));
        try {
            auto doc = nlohmann::json::parse(text);
            if (doc.contains("best_bound") && doc["best_bound"].is_number())
                res.best_bound = doc["best_bound"].get<double>();
        } catch (...) {
        }
        if (res.status == SolveStatus::Optimal && !std::isfinite(res.best_bound)) res.best_bound = res.objective;
    }
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

std::unique_ptr<Backend> make_backend(const std::string& name) {
    if (name == "cbc") return std::make_unique<CbcBackend>();
    if (name == "highs") return std::make_unique<HighsBackend>();
    throw Error("unknown backend " + name);
}

SolveResult solve(const MilpModel& model, const Backend& backend, const SolveLimits& limits) {
    return backend.solve(model, limits);
}

}  // namespace tdppt::milp
