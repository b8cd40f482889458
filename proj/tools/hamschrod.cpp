// hamschrod <command> --config <path> [--out <dir>]

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hamschrod/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"HAM deformation solver with classical and Schrodingerised linear backends"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<hamschrod::Command> chosen;

    for (auto cmd : {hamschrod::Command::run, hamschrod::Command::sweep_c0, hamschrod::Command::compare_backends,
                     hamschrod::Command::schrodingerise}) {
        const char* help = "";
        switch (cmd) {
            case hamschrod::Command::run: help = "solve the configured problem and write solution.csv, history.json"; break;
            case hamschrod::Command::sweep_c0: help = "residual-vs-c0 curve, then a run at the best c0"; break;
            case hamschrod::Command::compare_backends: help = "classical vs Schrodingerised deformation solves"; break;
            case hamschrod::Command::schrodingerise: help = "Schrodingerised solve of a bare linear system"; break;
        }
        auto* sub = app.add_subcommand(hamschrod::to_string(cmd), help);
        sub->add_option("--config,-c", config_path, "JSON run configuration")->required();
        sub->add_option("--out,-o", out_dir, "output directory (default: the config's \"outputs\")");
        sub->callback([&chosen, cmd] { chosen = cmd; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : hamschrod::exit_code::config;
    }

    std::optional<std::filesystem::path> out;
    if (!out_dir.empty()) out = out_dir;
    return hamschrod::run_command(*chosen, config_path, out, std::cerr);
}
