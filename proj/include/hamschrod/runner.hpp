#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>

#include "hamschrod/config.hpp"

namespace hamschrod {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int divergence = 2;
inline constexpr int backend = 3;
inline constexpr int io = 4;
inline constexpr int internal = 5;
}  // namespace exit_code

/// One exit code per error kind; anything unrecognised is an internal failure.
inline int exit_code_for(const std::string& kind) {
    static const std::pair<const char*, int> table[] = {
        {"ParseError", exit_code::config},         {"ValidationError", exit_code::config},
        {"ConfigError", exit_code::config},        {"DomainError", exit_code::config},
        {"SchemeError", exit_code::config},        {"LinearityError", exit_code::config},
        {"OrderError", exit_code::config},         {"GuessError", exit_code::config},
        {"EmptyCurveError", exit_code::config},    {"DivergenceError", exit_code::divergence},
        {"AllDivergedError", exit_code::divergence}, {"NaNError", exit_code::backend},
        {"EigenFailure", exit_code::backend},      {"WrapError", exit_code::backend},
        {"IoError", exit_code::io},
    };
    for (const auto& [k, code] : table)
        if (kind == k) return code;
    return exit_code::internal;
}

/// JSON-lines diagnostics on a stream (standard error for the CLI).
class DiagnosticLog {
public:
    explicit DiagnosticLog(std::ostream& os) : os_(os) {}

    void emit(io::json line) { os_ << line.dump() << "\n" << std::flush; }

    void info(const std::string& event, io::json fields = io::json::object()) {
        io::json line{{"level", "info"}, {"event", event}};
        line.update(fields);
        emit(std::move(line));
    }

    void warning(const std::string& kind, const std::string& message) {
        emit({{"level", "warning"}, {"kind", kind}, {"message", message}});
    }

    void error(const std::string& kind, const std::string& message, int code) {
        emit({{"level", "error"}, {"kind", kind}, {"message", message}, {"exit_code", code}});
    }

private:
    std::ostream& os_;
};

namespace detail {

inline void write_json(const std::filesystem::path& p, const io::json& j) { io::write_text(p, j.dump(2) + "\n"); }

inline HamConfig ham_with_log(const RunConfig& cfg, DiagnosticLog& log) {
    HamConfig h = cfg.ham;
    h.warn = [&log](const std::string& kind, const std::string& msg) { log.warning(kind, msg); };
    return h;
}

inline void write_solution(const std::filesystem::path& out, const std::string& stem, const HamResult& r,
                           const EvolutionProblem& p) {
    io::write_text(out / (stem + ".csv"), io::field_csv(r.solution, p.grid));
}

inline void log_orders(DiagnosticLog& log, const HamResult& r, const std::string& backend) {
    for (const auto& rec : r.history) {
        log.info("order", {{"backend", backend},
                           {"iteration", rec.iteration},
                           {"m", rec.m},
                           {"residual_norm_after", rec.residual_norm_after},
                           {"f_m_norm", rec.f_m_norm}});
    }
}

inline void run_ham(const RunConfig& cfg, const std::filesystem::path& out, DiagnosticLog& log) {
    const auto& p = *cfg.problem;
    const HamResult r = ham_solve(p, ham_with_log(cfg, log));
    log_orders(log, r, to_string(cfg.ham.backend));
    write_solution(out, "solution", r, p);
    write_json(out / "history.json", io::history_json(r.history));
    const auto rep = convergence_report(r.history);
    write_json(out / "report.json", io::report_json(rep));
    if (!r.schrod.empty()) {
        io::json d = io::json::array();
        for (const auto& s : r.schrod) d.push_back(io::diagnostics_json(s));
        write_json(out / "schrod_diagnostics.json", d);
    }
    log.info("done", {{"residual_norm", r.residual_norm}, {"verdict", to_string(rep.verdict)}});
}

inline void run_sweep(const RunConfig& cfg, const std::filesystem::path& out, DiagnosticLog& log) {
    const auto& p = *cfg.problem;
    const HamConfig base = ham_with_log(cfg, log);
    const C0Curve curve = residual_curve(p, base, cfg.sweep.grid());
    io::write_text(out / "curve.csv", io::curve_csv(curve));
    for (const auto& s : curve.samples) {
        if (!std::isfinite(s.residual_norm)) log.warning("DivergenceError", "c0 = " + io::format_double(s.c0) + " diverged");
    }
    const double best = select_c0(curve);
    HamConfig chosen = base;
    chosen.c0 = best;
    const HamResult r = ham_solve(p, chosen);
    write_solution(out, "solution", r, p);
    write_json(out / "history.json", io::history_json(r.history));
    write_json(out / "selection.json", {{"c0", best}, {"residual_norm", r.residual_norm}, {"M", curve.M}});
    log.info("done", {{"c0", best}, {"residual_norm", r.residual_norm}});
}

inline void run_compare(const RunConfig& cfg, const std::filesystem::path& out, DiagnosticLog& log) {
    const auto& p = *cfg.problem;
    HamConfig classical = ham_with_log(cfg, log);
    classical.backend = Backend::classical;
    HamConfig schrod = classical;
    schrod.backend = Backend::schrodingerise;
    schrod.schrod = cfg.schrod.value_or(SchrodConfig{});

    const HamResult a = ham_solve(p, classical);
    log_orders(log, a, "classical");
    const HamResult b = ham_solve(p, schrod);
    log_orders(log, b, "schrodingerise");
    write_solution(out, "solution", a, p);
    write_solution(out, "solution_schrod", b, p);
    write_json(out / "history.json", io::history_json(a.history));
    write_json(out / "history_schrod.json", io::history_json(b.history));

    const FieldSeries diff = a.solution - b.solution;
    const double max_norm = diff.max_abs();
    const double l2 = l2_norm(diff, p.grid.h(), p.time.dt());
    write_json(out / "diff.json", {{"max_norm", max_norm}, {"l2", l2}});
    log.info("done", {{"max_norm", max_norm}, {"l2", l2}});
}

inline void run_schrodingerise(const RunConfig& cfg, const std::filesystem::path& out, DiagnosticLog& log) {
    SchrodDiagnostics diag;
    const FieldSeries u = schrodingerise_solve(*cfg.system, cfg.schrod.value_or(SchrodConfig{}), &diag);
    io::write_text(out / "solution.csv", io::system_csv(u));
    if (diag.slot_error > 1e-6)
        log.warning("SlotDrift", "homogenization slot off by " + io::format_double(diag.slot_error) + "; raise N_p");
    write_json(out / "diagnostics.json", io::diagnostics_json(diag));
    log.info("done", io::diagnostics_json(diag));
}

}  // namespace detail

/// Executes a parsed configuration, writing artifacts under `out`. Errors propagate.
inline void execute(const RunConfig& cfg, const std::filesystem::path& out, DiagnosticLog& log) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory '" + out.string() + "': " + ec.message());
    const auto start = std::chrono::steady_clock::now();
    log.info("start", {{"command", to_string(cfg.command)}, {"outputs", out.string()}});
    switch (cfg.command) {
        case Command::run: detail::run_ham(cfg, out, log); break;
        case Command::sweep_c0: detail::run_sweep(cfg, out, log); break;
        case Command::compare_backends: detail::run_compare(cfg, out, log); break;
        case Command::schrodingerise: detail::run_schrodingerise(cfg, out, log); break;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log.info("finished", {{"seconds", secs}});
}

/// Whole CLI flow: read, parse, execute, map failures to exit codes.
inline int run_command(Command command, const std::filesystem::path& config_path,
                       const std::optional<std::filesystem::path>& out_dir, std::ostream& err) {
    DiagnosticLog log(err);
    try {
        const RunConfig cfg = parse_config(io::read_text(config_path), command);
        execute(cfg, out_dir.value_or(std::filesystem::path(cfg.outputs)), log);
        return exit_code::ok;
    } catch (const Error& e) {
        const int code = exit_code_for(e.kind());
        log.error(e.kind(), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        log.error("InternalError", e.what(), exit_code::internal);
        return exit_code::internal;
    }
}

}  // namespace hamschrod
