// posverif: experiment runner.
//
//   posverif <completeness|attack|nonlocal|poq|trace> [--n N] [--k K]
//            [--lambda L] [--trials T] [--seed S] [--pos num/den]
//            [--name NAME] [--out PATH] [--format csv|json] [--config FILE]
//
// Settings are layered: defaults, then the config file, then POSVERIF_SEED
// (seed only, when the file sets none), then flags.
// Exit status: 0 every row passed, 1 some row failed, 2 bad configuration.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "posverif/cli/experiment.hpp"
#include "posverif/error.hpp"

namespace {

constexpr int kConfigError = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw posverif::Error(posverif::Errc::ConfigInvalid, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw posverif::Error(posverif::Errc::ConfigInvalid, "cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and experiment runner for position verification from proofs of quantumness"};
    app.require_subcommand(1);

    std::map<std::string, std::string> flags;
    std::string config_path;
    const std::vector<std::pair<std::string, std::string>> options = {
        {"n", "puzzle size"},
        {"k", "parallel repetitions"},
        {"lambda", "random-oracle input width"},
        {"trials", "Monte Carlo trials per row"},
        {"seed", "master seed"},
        {"pos", "prover position as num/den"},
        {"name", "attack or strategy name"},
        {"out", "output file (default stdout)"},
        {"format", "csv or json"},
    };
    for (const char* sub : {"completeness", "attack", "nonlocal", "poq", "trace"}) {
        auto* cmd = app.add_subcommand(sub);
        for (const auto& [key, help] : options) {
            cmd->add_option_function<std::string>(
                "--" + key, [&flags, key = key](const std::string& v) { flags[key] = v; }, help);
        }
        cmd->add_option("--config", config_path, "file of key = value lines");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        posverif::cli::ExperimentConfig config;
        config.experiment = app.get_subcommands().front()->get_name();
        bool seed_set = false;
        if (!config_path.empty()) {
            for (const auto& [key, value] : posverif::cli::parse_config_lines(read_file(config_path))) {
                posverif::cli::apply_setting(config, key, value);
                seed_set = seed_set || key == "seed";
            }
        }
        if (const char* env = std::getenv("POSVERIF_SEED"); env && !seed_set)
            posverif::cli::apply_setting(config, "seed", env);
        for (const auto& [key, value] : flags) posverif::cli::apply_setting(config, key, value);
        config.validate();

        if (config.experiment == "trace") {
            write_output(config.out, posverif::cli::cmd_trace(config));
            return 0;
        }
        const auto rows = posverif::cli::run_rows(config);
        write_output(config.out, posverif::cli::render(rows, config.format));
        for (const auto& r : rows)
            if (!r.pass) std::cerr << "FAIL " << r.experiment << ": rate " << r.rate << " theory " << r.theory << "\n";
        return posverif::cli::exit_code(rows);
    } catch (const posverif::Error& e) {
        std::cerr << "posverif: " << e.what() << "\n";
        return kConfigError;
    }
}
