#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "support/generators.hpp"

using namespace hamschrod;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hamschrod_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Runs the CLI and returns its exit status; stderr goes to dir/stderr.log.
int cli(const std::string& command, const fs::path& config, const fs::path& out, const fs::path& dir) {
    const std::string cmd = std::string(HAMSCHROD_CLI_PATH) + " " + command + " --config '" + config.string() +
                            "' --out '" + out.string() + "' 2> '" + (dir / "stderr.log").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.json";
    io::write_text(p, text);
    return p;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

}  // namespace

TEST(ParseConfig, MinimalBurgersGetsDefaults) {
    const auto cfg = parse_config(R"({"command": "run", "problem": "burgers"})");
    EXPECT_EQ(cfg.command, Command::run);
    EXPECT_EQ(cfg.ham.c0, -1.0);
    EXPECT_EQ(cfg.ham.M, 10);
    EXPECT_EQ(cfg.ham.backend, Backend::classical);
    ASSERT_TRUE(cfg.problem);
    EXPECT_EQ(cfg.problem->grid.n(), 128);
    EXPECT_EQ(cfg.problem->time.n_steps(), 1000);
    EXPECT_TRUE(cfg.ham.linear_op.has_value());
}

TEST(ParseConfig, ZeroC0IsValidationError) {
    try {
        parse_config(R"({"command": "run", "problem": "heat", "ham": {"c0": 0}})");
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("/ham/c0"), std::string::npos) << e.what();
    }
}

TEST(ParseConfig, UnknownKeyIsParseError) {
    try {
        parse_config(R"({"command": "run", "problem": "heat", "ham": {"cO": -1}})");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("cO"), std::string::npos) << e.what();
    }
}

TEST(ParseConfig, CollectsEveryViolation) {
    try {
        parse_config(R"({"command": "run", "problem": "heat", "ham": {"c0": 0, "M": 0}})");
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("/ham/c0"), std::string::npos);
        EXPECT_NE(msg.find("/ham/M"), std::string::npos);
    }
}

TEST(ParseConfig, TypeMismatchNamesPointer) {
    try {
        parse_config(R"({"command": "run", "problem": {"builtin": "heat", "n": "many"}})");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("/problem/n"), std::string::npos) << e.what();
    }
}

TEST(ParseConfig, MalformedJson) { EXPECT_THROW(parse_config("{"), ParseError); }

TEST(ParseConfig, SchrodBackendNeedsBlock) {
    EXPECT_THROW(parse_config(R"({"command": "run", "problem": "heat", "ham": {"backend": "schrodingerise"}})"),
                 ValidationError);
    const auto cfg = parse_config(
        R"({"command": "run", "problem": "heat", "ham": {"backend": "schrodingerise"}, "schrod": {"N_p": 512}})");
    ASSERT_TRUE(cfg.ham.schrod);
    EXPECT_EQ(cfg.ham.schrod->N_p, 512);
}

TEST(ParseConfig, InlineProblem) {
    const auto cfg = parse_config(R"({
        "command": "run",
        "problem": {
            "tag": "kdv-like",
            "grid": {"n": 32},
            "time": {"t_final": 0.1, "n_steps": 10},
            "nonlinearity": [
                {"coefficient": -1.0, "factors": [{"derivative": 3}]},
                {"coefficient": -6.0, "factors": [{"derivative": 0}, {"derivative": 1}]}
            ],
            "initial": [{"shape": "sin", "amplitude": 0.1}],
            "forcing": [{"shape": "cos", "k": 2, "rate": -1}]
        }
    })");
    ASSERT_TRUE(cfg.problem);
    EXPECT_EQ(cfg.problem->tag, "kdv-like");
    EXPECT_EQ(cfg.problem->nonlinearity.terms.size(), 2u);
    ASSERT_TRUE(cfg.ham.linear_op);
    EXPECT_EQ(cfg.ham.linear_op->terms.size(), 1u);
    EXPECT_NEAR(cfg.problem->forcing[10].values[0].real(), std::exp(-0.1), 1e-15);
}

TEST(ParseConfig, CommandLineMustAgreeWithDocument) {
    EXPECT_THROW(parse_config(R"({"command": "run", "problem": "heat"})", Command::sweep_c0), ValidationError);
    EXPECT_EQ(parse_config(R"({"problem": "heat"})", Command::sweep_c0).command, Command::sweep_c0);
}

TEST(ParseConfig, LinearSystemRoundTrip) {
    testgen::Gen gen(5);
    const TimeGrid time(0.5, 3);
    LinearSystem sys{gen.complex_matrix(3), {}, gen.complex_vector(3), time};
    for (int k = 0; k < 4; ++k) sys.b.push_back(gen.complex_vector(3));
    const auto back = io::linear_system_from_json(io::linear_system_json(sys));
    EXPECT_EQ(back.A, sys.A);
    EXPECT_EQ(back.a, sys.a);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(back.b[k], sys.b[k]);
    EXPECT_EQ(back.time, sys.time);
}

TEST(ExitCodes, EveryErrorKindHasOneCode) {
    const std::vector<std::pair<std::string, int>> expect{
        {"ParseError", 1},      {"ValidationError", 1}, {"ConfigError", 1},      {"DomainError", 1},
        {"SchemeError", 1},     {"LinearityError", 1},  {"OrderError", 1},       {"GuessError", 1},
        {"EmptyCurveError", 1}, {"DivergenceError", 2}, {"AllDivergedError", 2}, {"NaNError", 3},
        {"EigenFailure", 3},    {"WrapError", 3},       {"IoError", 4},
    };
    for (const auto& [kind, code] : expect) EXPECT_EQ(exit_code_for(kind), code) << kind;
    EXPECT_EQ(exit_code_for("SomethingElse"), exit_code::internal);
}

TEST(Cli, HeatRunWritesArtifacts) {
    const auto dir = scratch("run");
    const auto cfg = write_config(dir, R"({"command": "run", "problem": {"builtin": "heat", "n": 16, "n_steps": 50},
                                          "ham": {"M": 2}})");
    ASSERT_EQ(cli("run", cfg, dir / "out", dir), 0) << io::read_text(dir / "stderr.log");
    const std::string csv = io::read_text(dir / "out" / "solution.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x,value_re,value_im");
    EXPECT_EQ(count_lines(csv), 1 + 51 * 16);
    const auto history = io::json::parse(io::read_text(dir / "out" / "history.json"));
    ASSERT_EQ(history.size(), 2u);
    EXPECT_TRUE(history[0].contains("residual_norm_after"));
    EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
    // Diagnostics are JSON lines.
    std::istringstream log(io::read_text(dir / "stderr.log"));
    std::string line;
    while (std::getline(log, line)) EXPECT_TRUE(io::json::accept(line)) << line;
}

TEST(Cli, BurgersDefaultRunShape) {
    const auto dir = scratch("burgers");
    const auto cfg = write_config(dir, R"({"command": "run", "problem": "burgers"})");
    ASSERT_EQ(cli("run", cfg, dir / "out", dir), 0) << io::read_text(dir / "stderr.log");
    EXPECT_EQ(count_lines(io::read_text(dir / "out" / "solution.csv")), 1 + 1001 * 128);
}

TEST(Cli, DeterministicOutput) {
    const auto dir = scratch("determinism");
    const auto cfg = write_config(dir, R"({"command": "run", "problem": {"builtin": "burgers", "n": 32, "n_steps": 100},
                                          "ham": {"M": 4}})");
    ASSERT_EQ(cli("run", cfg, dir / "a", dir), 0);
    ASSERT_EQ(cli("run", cfg, dir / "b", dir), 0);
    EXPECT_EQ(io::read_text(dir / "a" / "solution.csv"), io::read_text(dir / "b" / "solution.csv"));
    EXPECT_EQ(io::read_text(dir / "a" / "history.json"), io::read_text(dir / "b" / "history.json"));
}

TEST(Cli, DivergenceExitsTwo) {
    const auto dir = scratch("divergence");
    const auto cfg = write_config(dir, R"({"command": "run", "problem": {"builtin": "heat", "n": 16, "n_steps": 50},
                                          "ham": {"c0": -50, "M": 6}})");
    EXPECT_EQ(cli("run", cfg, dir / "out", dir), 2);
    EXPECT_NE(io::read_text(dir / "stderr.log").find("DivergenceError"), std::string::npos);
}

TEST(Cli, ValidationExitsOne) {
    const auto dir = scratch("validation");
    const auto cfg = write_config(dir, R"({"command": "run", "problem": "heat", "ham": {"c0": 0}})");
    EXPECT_EQ(cli("run", cfg, dir / "out", dir), 1);
    EXPECT_NE(io::read_text(dir / "stderr.log").find("/ham/c0"), std::string::npos);
}

TEST(Cli, MissingConfigExitsFour) {
    const auto dir = scratch("missing");
    EXPECT_EQ(cli("run", dir / "nope.json", dir / "out", dir), 4);
}

TEST(Cli, BackendFailureExitsThree) {
    const auto dir = scratch("wrap");
    // A fast-decaying system on a tiny p-domain cannot fit one step.
    const auto cfg = write_config(dir, R"({"command": "schrodingerise",
        "schrod": {"N_p": 256, "L_p": 10},
        "system": {"A_re": [[-5, 0], [0, -5]], "a_re": [1, 1], "time": {"t_final": 10, "n_steps": 1}}})");
    EXPECT_EQ(cli("schrodingerise", cfg, dir / "out", dir), 3);
    EXPECT_NE(io::read_text(dir / "stderr.log").find("WrapError"), std::string::npos);
}

TEST(Cli, SchrodingeriseSystem) {
    const auto dir = scratch("schrodingerise");
    const auto cfg = write_config(dir, R"({"command": "schrodingerise", "schrod": {"N_p": 4096},
        "system": {"A_re": [[-1, 0.5], [0, -0.5]], "a_re": [1, 0], "b_re": [0, 1], "time": {"t_final": 0.5, "n_steps": 10}}})");
    ASSERT_EQ(cli("schrodingerise", cfg, dir / "out", dir), 0) << io::read_text(dir / "stderr.log");
    const auto diag = io::json::parse(io::read_text(dir / "out" / "diagnostics.json"));
    for (const char* key : {"N_p", "L_p", "mu", "p_star", "slot_error", "wrap_margin"}) EXPECT_TRUE(diag.contains(key)) << key;
    EXPECT_LT(diag["slot_error"].get<double>(), 1e-6);
    EXPECT_EQ(count_lines(io::read_text(dir / "out" / "solution.csv")), 1 + 11 * 2);
}

TEST(Cli, CompareBackendsOnHeat) {
    const auto dir = scratch("compare");
    const auto cfg = write_config(dir, R"({"command": "compare-backends", "problem": "heat", "ham": {"M": 2}})");
    ASSERT_EQ(cli("compare-backends", cfg, dir / "out", dir), 0) << io::read_text(dir / "stderr.log");
    const auto diff = io::json::parse(io::read_text(dir / "out" / "diff.json"));
    EXPECT_LE(diff["max_norm"].get<double>(), 1e-4);
    EXPECT_TRUE(fs::exists(dir / "out" / "solution_schrod.csv"));
}

TEST(Cli, SweepWritesCurve) {
    const auto dir = scratch("sweep");
    const auto cfg = write_config(dir, R"({"command": "sweep-c0", "problem": {"builtin": "heat", "n": 16, "n_steps": 50},
                                          "ham": {"M": 2}, "sweep": {"c0_min": -1.5, "c0_max": -0.5, "points": 5}})");
    ASSERT_EQ(cli("sweep-c0", cfg, dir / "out", dir), 0) << io::read_text(dir / "stderr.log");
    const std::string curve = io::read_text(dir / "out" / "curve.csv");
    EXPECT_EQ(curve.substr(0, curve.find('\n')), "c0,residual_norm");
    EXPECT_EQ(count_lines(curve), 6);
    const auto sel = io::json::parse(io::read_text(dir / "out" / "selection.json"));
    EXPECT_EQ(sel["c0"].get<double>(), -1.0);
}
