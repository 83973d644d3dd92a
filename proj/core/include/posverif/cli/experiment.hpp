#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "posverif/spacetime/rational.hpp"
#include "posverif/stats.hpp"

namespace posverif::cli {

enum class Format { Csv, Json };

struct ExperimentConfig {
    /// completeness | attack | nonlocal | poq | trace
    std::string experiment;
    unsigned n = 8;
    unsigned k = 1;
    unsigned lambda = 16;
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    /// Unset: completeness sweeps the standard positions and trace uses 3/2.
    std::optional<spacetime::Rational> position;
    /// Attack or strategy name.
    std::string name;
    /// Empty means standard output.
    std::string out;
    Format format = Format::Csv;

    /// Throws ConfigInvalid.
    void validate() const;
};

/// Sets one field from its textual form. Keys: experiment, n, k, lambda,
/// trials, seed, pos, name, out, format. Throws ConfigInvalid.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Reads `key = value` lines in order. Blank lines and lines starting with
/// '#' are skipped. Throws ConfigInvalid on any other line without '='.
std::vector<std::pair<std::string, std::string>> parse_config_lines(const std::string& text);
void apply_config_text(ExperimentConfig& config, const std::string& text);

struct ResultRow {
    std::string experiment;
    unsigned n = 0;
    unsigned k = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double rate = 0;
    double ci_low = 0;
    double ci_high = 0;
    double theory = 0;
    bool pass = false;
};

/// pass = the Wilson interval covers `theory`.
ResultRow make_row(std::string experiment, unsigned n, unsigned k, const Estimate& e, double theory);

// Closed forms for the theory column.
double completeness_theory(unsigned n, unsigned k);
/// Throws UnknownAttack.
double attack_theory(const std::string& attack, unsigned n, unsigned k);
struct StrategyTheory {
    double win;
    double two_of_two;
};
/// Throws UnknownStrategy.
StrategyTheory strategy_theory(const std::string& strategy, unsigned n);

/// Positions swept when none is configured: 1, 5/4, 3/2, 7/4, 199/100.
std::vector<spacetime::Rational> standard_positions();

std::vector<ResultRow> cmd_completeness(const ExperimentConfig& config);
ResultRow cmd_attack(const ExperimentConfig& config);
/// Win rate, 2-of-2 rate and the reduction check for one strategy.
std::vector<ResultRow> cmd_nonlocal(const ExperimentConfig& config);
/// Quantum prover, classical stand-in and transcript order.
std::vector<ResultRow> cmd_poq(const ExperimentConfig& config);
/// One seeded honest trial as JSON lines.
std::string cmd_trace(const ExperimentConfig& config);

/// Dispatches on config.experiment (not trace).
std::vector<ResultRow> run_rows(const ExperimentConfig& config);

/// Columns: experiment,n,k,trials,successes,rate,ci_low,ci_high,theory,pass
std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_json(const std::vector<ResultRow>& rows);
std::string render(const std::vector<ResultRow>& rows, Format format);

/// 0 if every row passes, 1 otherwise.
int exit_code(const std::vector<ResultRow>& rows);

}  // namespace posverif::cli
