#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamschrod/builtins.hpp"
#include "hamschrod/convergence.hpp"
#include "hamschrod/io.hpp"

// Strict JSON run configuration. Structural problems (malformed JSON, unknown keys,
// wrong types) raise ParseError naming the JSON pointer; value problems are collected
// and raised together as one ValidationError.
//
//   {
//     "command": "run" | "sweep-c0" | "compare-backends" | "schrodingerise",
//     "problem": "burgers" | {"builtin": "heat", "n": 16, "n_steps": 200, "t_final": 0.5} | inline,
//     "ham":     {"c0": -1, "M": 10, "iterations": 0, "backend": "classical", "linear_op": [terms],
//                 "guard": {"enabled": true, "factor": 10, "window": 3}},
//     "schrod":  {"N_p": 1024, "L_p": 20, "p_star": 0.5, "mu_margin": 0.1, "profile": "smooth", "tail_eps": 1e-12},
//     "sweep":   {"c0_min": -2, "c0_max": -0.05, "points": 40} or {"values": [...]},
//     "system":  LinearSystem JSON (schrodingerise command),
//     "outputs": "out"
//   }
//
// Inline problem: {"tag", "grid": {"x_min", "x_max", "n", "periodic"}, "time": {"t_final", "n_steps"},
// "scheme", "nonlinearity": [terms], "initial": [modes], "forcing": [modes],
// "boundary": {"kind": "periodic" | "dirichlet", "value": number}}.
// A term is {"coefficient": c, "factors": [{"derivative": k} | {"known": [modes]}]};
// a mode is {"shape": "constant" | "sin" | "cos", "amplitude", "k", "rate"}.

namespace hamschrod {

enum class Command { run, sweep_c0, compare_backends, schrodingerise };

inline std::string to_string(Command c) {
    switch (c) {
        case Command::run: return "run";
        case Command::sweep_c0: return "sweep-c0";
        case Command::compare_backends: return "compare-backends";
        default: return "schrodingerise";
    }
}

inline std::optional<Command> parse_command(const std::string& s) {
    if (s == "run") return Command::run;
    if (s == "sweep-c0") return Command::sweep_c0;
    if (s == "compare-backends") return Command::compare_backends;
    if (s == "schrodingerise") return Command::schrodingerise;
    return std::nullopt;
}

struct SweepConfig {
    double c0_min = -2.0;
    double c0_max = -0.05;
    int points = 40;
    std::vector<double> values;  // explicit list; overrides the range when non-empty

    std::vector<double> grid() const { return values.empty() ? c0_grid(c0_min, c0_max, points) : values; }
};

struct RunConfig {
    Command command = Command::run;
    std::optional<EvolutionProblem> problem;
    HamConfig ham;
    std::optional<SchrodConfig> schrod;
    SweepConfig sweep;
    std::optional<LinearSystem> system;
    std::string outputs = "out";
};

namespace detail {

inline std::string escape_pointer(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

/// Strict view of one JSON object: every key must be consumed or it is reported.
class Reader {
public:
    Reader(const io::json& j, std::string pointer, std::vector<std::string>& violations)
        : j_(j), ptr_(std::move(pointer)), violations_(violations) {
        if (!j_.is_object()) throw ParseError(where() + ": expected an object");
    }

    std::string at(const std::string& key) const { return ptr_ + "/" + escape_pointer(key); }
    std::string where() const { return ptr_.empty() ? "/" : ptr_; }

    bool has(const std::string& key) {
        seen_.push_back(key);
        return j_.contains(key);
    }

    const io::json* child(const std::string& key) {
        if (!has(key)) return nullptr;
        return &j_.at(key);
    }

    std::optional<double> number(const std::string& key) {
        const auto* c = child(key);
        if (!c) return std::nullopt;
        if (!c->is_number()) throw ParseError(at(key) + ": expected a number");
        return c->get<double>();
    }

    std::optional<int> integer(const std::string& key) {
        const auto* c = child(key);
        if (!c) return std::nullopt;
        if (!c->is_number_integer()) throw ParseError(at(key) + ": expected an integer");
        return c->get<int>();
    }

    std::optional<bool> boolean(const std::string& key) {
        const auto* c = child(key);
        if (!c) return std::nullopt;
        if (!c->is_boolean()) throw ParseError(at(key) + ": expected true or false");
        return c->get<bool>();
    }

    std::optional<std::string> string(const std::string& key) {
        const auto* c = child(key);
        if (!c) return std::nullopt;
        if (!c->is_string()) throw ParseError(at(key) + ": expected a string");
        return c->get<std::string>();
    }

    void fail(const std::string& key, const std::string& message) { violations_.push_back(at(key) + ": " + message); }

    /// Rejects keys that were never asked for.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
                throw ParseError(at(it.key()) + ": unknown key '" + it.key() + "'");
            }
        }
    }

    std::vector<std::string>& violations() { return violations_; }

private:
    const io::json& j_;
    std::string ptr_;
    std::vector<std::string>& violations_;
    std::vector<std::string> seen_;
};

inline const io::json& require_array(const io::json* j, const std::string& pointer) {
    if (!j->is_array()) throw ParseError(pointer + ": expected an array");
    return *j;
}

inline ClosedForm parse_closed_form(const io::json& j, const std::string& pointer, std::vector<std::string>& v) {
    ClosedForm cf;
    require_array(&j, pointer);
    for (std::size_t i = 0; i < j.size(); ++i) {
        Reader r(j[i], pointer + "/" + std::to_string(i), v);
        ClosedForm::Mode m;
        const std::string shape = r.string("shape").value_or("constant");
        if (shape == "constant") m.shape = ClosedForm::Shape::constant;
        else if (shape == "sin") m.shape = ClosedForm::Shape::sin;
        else if (shape == "cos") m.shape = ClosedForm::Shape::cos;
        else r.fail("shape", "unknown shape '" + shape + "' (constant, sin, cos)");
        m.amplitude = r.number("amplitude").value_or(1.0);
        m.k = r.number("k").value_or(m.shape == ClosedForm::Shape::constant ? 0.0 : 1.0);
        m.rate = r.number("rate").value_or(0.0);
        r.finish();
        cf.modes.push_back(m);
    }
    return cf;
}

inline OperatorExpr parse_operator(const io::json& j, const std::string& pointer, std::vector<std::string>& v) {
    OperatorExpr expr;
    require_array(&j, pointer);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string tp = pointer + "/" + std::to_string(i);
        Reader r(j[i], tp, v);
        OperatorTerm term;
        term.coefficient = r.number("coefficient").value_or(1.0);
        if (const auto* fs = r.child("factors")) {
            require_array(fs, r.at("factors"));
            for (std::size_t f = 0; f < fs->size(); ++f) {
                const std::string fp = r.at("factors") + "/" + std::to_string(f);
                Reader fr((*fs)[f], fp, v);
                const auto order = fr.integer("derivative");
                const auto* kn = fr.child("known");
                if (order.has_value() == (kn != nullptr)) {
                    throw ParseError(fp + ": a factor needs exactly one of 'derivative' or 'known'");
                }
                if (order) {
                    if (*order < 0 || *order > kMaxDerivativeOrder) {
                        fr.fail("derivative", "order must lie in [0, " + std::to_string(kMaxDerivativeOrder) + "]");
                    }
                    term.factors.push_back(state(*order));
                } else {
                    term.factors.push_back(known(parse_closed_form(*kn, fr.at("known"), v)));
                }
                fr.finish();
            }
        }
        r.finish();
        expr.terms.push_back(std::move(term));
    }
    return expr;
}

inline std::optional<Builtin> parse_problem(const io::json& j, std::vector<std::string>& v) {
    const std::string pointer = "/problem";
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (!is_builtin(name)) {
            v.push_back(pointer + ": unknown builtin '" + name + "'");
            return std::nullopt;
        }
        return make_builtin(name);
    }
    Reader r(j, pointer, v);
    if (const auto name = r.string("builtin")) {
        BuiltinOverrides o;
        o.n = r.integer("n");
        o.n_steps = r.integer("n_steps");
        o.t_final = r.number("t_final");
        r.finish();
        const std::size_t before = v.size();
        if (!is_builtin(*name)) r.fail("builtin", "unknown builtin '" + *name + "'");
        if (o.n && *o.n < 4) r.fail("n", "needs at least 4 nodes");
        if (o.n_steps && *o.n_steps < 1) r.fail("n_steps", "needs at least one step");
        if (o.t_final && !(*o.t_final > 0.0)) r.fail("t_final", "must be positive");
        if (v.size() != before) return std::nullopt;
        return make_builtin(*name, o);
    }

    const std::size_t before = v.size();
    const std::string tag = r.string("tag").value_or("inline");
    const auto* gj = r.child("grid");
    const auto* tj = r.child("time");
    if (!gj) throw ParseError(pointer + "/grid: missing");
    if (!tj) throw ParseError(pointer + "/time: missing");
    Reader g(*gj, r.at("grid"), v);
    const double x_min = g.number("x_min").value_or(0.0);
    const double x_max = g.number("x_max").value_or(2.0 * std::numbers::pi);
    const int n = g.integer("n").value_or(64);
    const bool periodic = g.boolean("periodic").value_or(true);
    g.finish();
    if (!(x_max > x_min)) g.fail("x_max", "must exceed x_min");
    if (n < 4) g.fail("n", "needs at least 4 nodes");
    Reader t(*tj, r.at("time"), v);
    const auto t_final = t.number("t_final");
    const auto n_steps = t.integer("n_steps");
    t.finish();
    if (!t_final) throw ParseError(r.at("time") + "/t_final: missing");
    if (!n_steps) throw ParseError(r.at("time") + "/n_steps: missing");
    if (!(*t_final > 0.0)) t.fail("t_final", "must be positive");
    if (*n_steps < 1) t.fail("n_steps", "needs at least one step");

    const auto scheme_name = r.string("scheme");
    const auto* nj = r.child("nonlinearity");
    if (!nj) throw ParseError(pointer + "/nonlinearity: missing");
    OperatorExpr N = parse_operator(*nj, r.at("nonlinearity"), v);
    const auto* ij = r.child("initial");
    if (!ij) throw ParseError(pointer + "/initial: missing");
    const ClosedForm initial = parse_closed_form(*ij, r.at("initial"), v);
    std::optional<ClosedForm> forcing;
    if (const auto* fj = r.child("forcing")) forcing = parse_closed_form(*fj, r.at("forcing"), v);
    BoundarySpec boundary = BoundarySpec::periodic();
    if (const auto* bj = r.child("boundary")) {
        Reader b(*bj, r.at("boundary"), v);
        const std::string kind = b.string("kind").value_or("periodic");
        const auto value = b.number("value");
        b.finish();
        if (kind == "dirichlet") {
            if (!value) b.fail("value", "dirichlet boundary needs a value");
            else boundary = BoundarySpec::dirichlet(*value);
        } else if (kind != "periodic") {
            b.fail("kind", "unknown boundary kind '" + kind + "'");
        }
    }
    r.finish();
    if (scheme_name && *scheme_name != "spectral" && *scheme_name != "central_fd") {
        r.fail("scheme", "unknown scheme '" + *scheme_name + "'");
    }
    if (v.size() != before) return std::nullopt;

    EvolutionProblem p = make_problem(tag, SpatialGrid(x_min, x_max, n, periodic), TimeGrid(*t_final, *n_steps), N,
                                      initial.as_function(),
                                      forcing ? forcing->as_function() : SpaceTimeFunction{}, boundary);
    if (scheme_name) p.scheme = *scheme_name == "spectral" ? Scheme::spectral : Scheme::central_fd;
    const auto report = validate_problem(p);
    for (const auto& f : report.failures) v.push_back(pointer + ": " + f);
    if (!report.ok()) return std::nullopt;
    return Builtin{std::move(p), N.linear_part()};
}

}  // namespace detail

/// Parses and validates a run configuration. `command` (from the command line) wins
/// over the document's own "command", which must agree with it when both are given.
inline RunConfig parse_config(const std::string& text, std::optional<Command> command = std::nullopt) {
    io::json doc;
    try {
        doc = io::json::parse(text);
    } catch (const io::json::parse_error& e) {
        throw ParseError(std::string("/: malformed JSON: ") + e.what());
    }
    std::vector<std::string> v;
    detail::Reader top(doc, "", v);
    RunConfig cfg;

    const auto cmd_name = top.string("command");
    std::optional<Command> doc_cmd;
    if (cmd_name) {
        doc_cmd = parse_command(*cmd_name);
        if (!doc_cmd) top.fail("command", "unknown command '" + *cmd_name + "'");
    }
    if (command && doc_cmd && *command != *doc_cmd) {
        top.fail("command", "document says '" + *cmd_name + "' but '" + to_string(*command) + "' was requested");
    }
    if (command) cfg.command = *command;
    else if (doc_cmd) cfg.command = *doc_cmd;
    else top.fail("command", "no command given");

    cfg.outputs = top.string("outputs").value_or("out");

    std::optional<Builtin> builtin;
    if (const auto* pj = top.child("problem")) builtin = detail::parse_problem(*pj, v);
    bool linear_op_given = false;

    if (const auto* hj = top.child("ham")) {
        detail::Reader h(*hj, "/ham", v);
        if (auto c0 = h.number("c0")) {
            cfg.ham.c0 = *c0;
            if (*c0 == 0.0) h.fail("c0", "must be nonzero");
        }
        if (auto M = h.integer("M")) {
            cfg.ham.M = *M;
            if (*M < 1) h.fail("M", "must be >= 1");
        }
        if (auto K = h.integer("iterations")) {
            cfg.ham.iterations = *K;
            if (*K < 0) h.fail("iterations", "must be >= 0");
        }
        if (auto b = h.string("backend")) {
            if (*b == "classical") cfg.ham.backend = Backend::classical;
            else if (*b == "schrodingerise") cfg.ham.backend = Backend::schrodingerise;
            else h.fail("backend", "unknown backend '" + *b + "' (classical, schrodingerise)");
        }
        if (const auto* lj = h.child("linear_op")) {
            cfg.ham.linear_op = detail::parse_operator(*lj, h.at("linear_op"), v);
            linear_op_given = true;
            if (!cfg.ham.linear_op->is_linear()) h.fail("linear_op", "every term needs exactly one state factor");
        }
        if (const auto* gj = h.child("guard")) {
            detail::Reader g(*gj, h.at("guard"), v);
            cfg.ham.guard.enabled = g.boolean("enabled").value_or(true);
            cfg.ham.guard.factor = g.number("factor").value_or(10.0);
            cfg.ham.guard.window = g.integer("window").value_or(3);
            g.finish();
            if (!(cfg.ham.guard.factor > 1.0)) g.fail("factor", "must exceed 1");
            if (cfg.ham.guard.window < 1) g.fail("window", "must be >= 1");
        }
        h.finish();
    }

    if (const auto* sj = top.child("schrod")) {
        detail::Reader s(*sj, "/schrod", v);
        SchrodConfig sc;
        sc.N_p = s.integer("N_p").value_or(sc.N_p);
        sc.L_p = s.number("L_p").value_or(sc.L_p);
        sc.p_star = s.number("p_star").value_or(0.0);
        sc.mu_margin = s.number("mu_margin").value_or(sc.mu_margin);
        sc.tail_eps = s.number("tail_eps").value_or(sc.tail_eps);
        if (auto prof = s.string("profile")) {
            if (*prof == "smooth") sc.profile = WarpProfile::smooth;
            else if (*prof == "abs_exp") sc.profile = WarpProfile::abs_exp;
            else s.fail("profile", "unknown profile '" + *prof + "' (smooth, abs_exp)");
        }
        s.finish();
        try {
            sc.validate();
            cfg.schrod = sc;
        } catch (const ConfigError& e) {
            v.push_back("/schrod: " + std::string(e.what()));
        }
    }

    if (const auto* wj = top.child("sweep")) {
        detail::Reader w(*wj, "/sweep", v);
        cfg.sweep.c0_min = w.number("c0_min").value_or(cfg.sweep.c0_min);
        cfg.sweep.c0_max = w.number("c0_max").value_or(cfg.sweep.c0_max);
        cfg.sweep.points = w.integer("points").value_or(cfg.sweep.points);
        if (const auto* vals = w.child("values")) {
            cfg.sweep.values = io::detail::number_list(*vals, w.at("values"));
            for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i) {
                if (cfg.sweep.values[i] == 0.0) v.push_back(w.at("values") + "/" + std::to_string(i) + ": c0 must be nonzero");
            }
        }
        w.finish();
        if (cfg.sweep.points < 1) w.fail("points", "must be >= 1");
        if (cfg.sweep.values.empty() && cfg.sweep.c0_min <= 0.0 && cfg.sweep.c0_max >= 0.0) {
            // A range through zero is fine as long as no grid point lands on it.
            for (double c : cfg.sweep.grid())
                if (c == 0.0) w.fail("c0_min", "the sweep grid contains c0 = 0");
        }
    }

    if (const auto* yj = top.child("system")) cfg.system = io::linear_system_from_json(*yj, "/system");
    top.finish();

    if (builtin) {
        cfg.problem = std::move(builtin->problem);
        if (!linear_op_given) cfg.ham.linear_op = std::move(builtin->linear_op);
    }
    if (cfg.command == Command::schrodingerise) {
        if (!cfg.system) v.push_back("/system: the schrodingerise command needs a linear system");
    } else if (!cfg.problem && !doc.contains("problem")) {
        v.push_back("/problem: missing");
    }
    if (cfg.ham.backend == Backend::schrodingerise && !cfg.schrod) {
        v.push_back("/schrod: backend schrodingerise requires a schrod block");
    }
    if (cfg.command == Command::schrodingerise && !cfg.schrod) cfg.schrod = SchrodConfig{};
    cfg.ham.schrod = cfg.schrod;

    if (!v.empty()) {
        std::string msg;
        for (const auto& line : v) msg += (msg.empty() ? "" : "\n") + line;
        throw ValidationError(msg);
    }
    return cfg;
}

}  // namespace hamschrod
