#include "posverif/cli/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "posverif/adversary/adversary.hpp"
#include "posverif/error.hpp"
#include "posverif/nonlocal/game.hpp"
#include "posverif/protocol/poq.hpp"
#include "posverif/protocol/prpv.hpp"

namespace posverif::cli {

using spacetime::Rational;

namespace {

const std::vector<std::string> kExperiments = {"completeness", "attack", "nonlocal", "poq", "trace"};

// Interval endpoints are computed in floating point; a closed form of exactly
// 0 or 1 must not miss by rounding.
constexpr double kCoverSlack = 1e-12;

template <typename T>
T parse_unsigned(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (value.empty() || ec != std::errc() || ptr != end)
        throw Error(Errc::ConfigInvalid, key + ": expected a non-negative integer, got '" + value + "'");
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

protocol::PRPVConfig prpv_config(const ExperimentConfig& c, const Rational& position) {
    protocol::PRPVConfig p;
    p.n = c.n;
    p.k = c.k;
    p.lambda = c.lambda;
    p.seed = c.seed;
    p.prover_position = position;
    p.validate();
    return p;
}

std::string tagged(const std::string& experiment, const std::string& detail) {
    return experiment + "[" + detail + "]";
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
    bool known = false;
    for (const auto& e : kExperiments) known = known || e == experiment;
    if (!known) throw Error(Errc::ConfigInvalid, "unknown experiment '" + experiment + "'");
    if (n < puzzle::kMinN || n > puzzle::kMaxN) throw Error(Errc::ConfigInvalid, "n must be in [2, 12]");
    if (k < 1 || k > 64) throw Error(Errc::ConfigInvalid, "k must be in [1, 64]");
    if (lambda < protocol::kMinLambda || lambda > protocol::kMaxLambda)
        throw Error(Errc::ConfigInvalid, "lambda must be in [8, 64]");
    if (trials == 0) throw Error(Errc::ConfigInvalid, "trials must be positive");
    if (position && !protocol::valid_prover_position(*position))
        throw Error(Errc::ConfigInvalid, "prover position " + position->str() + " outside [1, 2)");
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "experiment") c.experiment = value;
    else if (key == "n") c.n = parse_unsigned<unsigned>(key, value);
    else if (key == "k") c.k = parse_unsigned<unsigned>(key, value);
    else if (key == "lambda") c.lambda = parse_unsigned<unsigned>(key, value);
    else if (key == "trials") c.trials = parse_unsigned<std::size_t>(key, value);
    else if (key == "seed") c.seed = parse_unsigned<std::uint64_t>(key, value);
    else if (key == "pos") c.position = Rational::parse(value);
    else if (key == "name") c.name = value;
    else if (key == "out") c.out = value;
    else if (key == "format") {
        if (value == "csv") c.format = Format::Csv;
        else if (value == "json") c.format = Format::Json;
        else throw Error(Errc::ConfigInvalid, "format must be csv or json, got '" + value + "'");
    } else {
        throw Error(Errc::ConfigInvalid, "unknown key '" + key + "'");
    }
}

std::vector<std::pair<std::string, std::string>> parse_config_lines(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    unsigned lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::ConfigInvalid, "line " + std::to_string(lineno) + ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

void apply_config_text(ExperimentConfig& c, const std::string& text) {
    for (const auto& [key, value] : parse_config_lines(text)) apply_setting(c, key, value);
}

ResultRow make_row(std::string experiment, unsigned n, unsigned k, const Estimate& e, double theory) {
    ResultRow r;
    r.experiment = std::move(experiment);
    r.n = n;
    r.k = k;
    r.trials = e.trials;
    r.successes = e.successes;
    r.rate = e.rate;
    r.ci_low = e.ci_low;
    r.ci_high = e.ci_high;
    r.theory = theory;
    r.pass = e.ci_low - kCoverSlack <= theory && theory <= e.ci_high + kCoverSlack;
    return r;
}

double completeness_theory(unsigned n, unsigned k) {
    return std::pow(1.0 - std::ldexp(1.0, -static_cast<int>(n) - 1), static_cast<double>(k));
}

double attack_theory(const std::string& attack, unsigned n, unsigned k) {
    if (attack == "guess" || attack == "forward_compiled_guess")
        return std::ldexp(1.0, -static_cast<int>(k)) * completeness_theory(n, k);
    if (attack == "teleport") return completeness_theory(n, k);
    if (attack == "classical_forward") return std::pow(0.75, static_cast<double>(k));
    throw Error(Errc::UnknownAttack, "unknown attack '" + attack + "'");
}

StrategyTheory strategy_theory(const std::string& strategy, unsigned n) {
    const double two_n = std::ldexp(1.0, -static_cast<int>(n));
    // honest_to_B: on b = 0 C guesses one of two preimages out of 2^(n+1);
    // on b = 1 B's d is nonzero except with chance 2^-n and C's bit is a coin.
    if (strategy == "honest_to_B") return {0.5 * two_n + 0.25 * (1 - two_n), 0.5};
    if (strategy == "measure_and_guess") return {0.75, 0.5};
    if (strategy == "brute_force") return {1.0, 1.0};
    if (strategy == "always_fail") return {0.0, 0.0};
    throw Error(Errc::UnknownStrategy, "unknown strategy '" + strategy + "'");
}

std::vector<Rational> standard_positions() {
    return {Rational(1), Rational(5, 4), Rational(3, 2), Rational(7, 4), Rational(199, 100)};
}

std::vector<ResultRow> cmd_completeness(const ExperimentConfig& c) {
    c.validate();
    const auto positions = c.position ? std::vector<Rational>{*c.position} : standard_positions();
    std::vector<ResultRow> rows;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto& pos = positions[i];
        // Row i draws its trials from master seed trial_seed(seed, i).
        auto p = prpv_config(c, pos);
        p.seed = trial_seed(c.seed, i);
        const auto e = protocol::estimate_acceptance(p, protocol::honest_prover(p), c.trials);
        rows.push_back(make_row(tagged("completeness", "pos=" + pos.str()), c.n, c.k, e, completeness_theory(c.n, c.k)));
    }
    return rows;
}

ResultRow cmd_attack(const ExperimentConfig& c) {
    c.validate();
    const std::string name = c.name.empty() ? "guess" : c.name;
    const double theory = attack_theory(name, c.n, c.k);
    const auto adv = adversary::make_attack(name, c.n, c.k);
    const auto p = prpv_config(c, c.position.value_or(Rational(3, 2)));
    const auto e = protocol::estimate_acceptance(p, adv.factory(), c.trials);
    return make_row(tagged("attack", name), c.n, c.k, e, theory);
}

std::vector<ResultRow> cmd_nonlocal(const ExperimentConfig& c) {
    c.validate();
    const std::string name = c.name.empty() ? "measure_and_guess" : c.name;
    const auto theory = strategy_theory(name, c.n);
    const auto strategy = nonlocal::make_strategy(name);
    const auto tau = nonlocal::estimate_win_rate(c.n, *strategy, c.trials, c.seed);
    const auto p2 = nonlocal::estimate_2of2_rate(c.n, nonlocal::reduce_to_2of2(strategy), c.trials,
                                                 SplitMix64::mix(c.seed + 1));
    std::vector<ResultRow> rows;
    rows.push_back(make_row(tagged("nonlocal", name), c.n, 1, tau, theory.win));
    rows.push_back(make_row(tagged("two_of_two", name), c.n, 1, p2, theory.two_of_two));
    // Theory is the lower bound 2*tau - 1; pass is the 5-sigma inequality.
    ResultRow check = make_row(tagged("reduction", name), c.n, 1, p2, 2 * tau.rate - 1);
    check.pass = nonlocal::reduction_inequality_holds(tau, p2);
    rows.push_back(check);
    return rows;
}

std::vector<ResultRow> cmd_poq(const ExperimentConfig& c) {
    c.validate();
    const auto poq = protocol::poq_transform(prpv_config(c, Rational(3, 2)));
    std::vector<ResultRow> rows;
    rows.push_back(make_row(tagged("poq", "quantum"), c.n, c.k, poq.estimate(protocol::quantum_interactive(), c.trials),
                            completeness_theory(c.n, c.k)));
    rows.push_back(make_row(tagged("poq", "classical"), c.n, c.k,
                            poq.estimate(protocol::classical_interactive(protocol::memorize_and_guess()), c.trials),
                            std::pow(0.75, static_cast<double>(c.k))));

    SplitMix64 rng(c.seed);
    const auto run = poq.run(protocol::quantum_interactive(), rng);
    const std::vector<std::string> expected = {protocol::kLabelPk, protocol::kLabelY, protocol::kLabelChallenge,
                                               protocol::kLabelAns};
    bool ordered = run.transcript.size() == expected.size();
    for (std::size_t i = 0; ordered && i < expected.size(); ++i) ordered = run.transcript[i].first == expected[i];
    rows.push_back(make_row(tagged("poq", "transcript_order"), c.n, c.k, wilson(ordered ? 1 : 0, 1), 1.0));
    rows.back().pass = ordered;
    return rows;
}

std::string cmd_trace(const ExperimentConfig& c) {
    c.validate();
    const auto p = prpv_config(c, c.position.value_or(Rational(3, 2)));
    SplitMix64 rng(c.seed);
    return protocol::run_prpv(p, protocol::honest_prover(p), rng).trace.to_jsonl();
}

std::vector<ResultRow> run_rows(const ExperimentConfig& c) {
    c.validate();
    if (c.experiment == "completeness") return cmd_completeness(c);
    if (c.experiment == "attack") return {cmd_attack(c)};
    if (c.experiment == "nonlocal") return cmd_nonlocal(c);
    if (c.experiment == "poq") return cmd_poq(c);
    throw Error(Errc::ConfigInvalid, "experiment '" + c.experiment + "' produces no rows");
}

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "experiment,n,k,trials,successes,rate,ci_low,ci_high,theory,pass\n";
    for (const auto& r : rows) {
        out += r.experiment + "," + std::to_string(r.n) + "," + std::to_string(r.k) + "," + std::to_string(r.trials) +
               "," + std::to_string(r.successes) + "," + fixed(r.rate) + "," + fixed(r.ci_low) + "," +
               fixed(r.ci_high) + "," + fixed(r.theory) + "," + (r.pass ? "true" : "false") + "\n";
    }
    return out;
}

std::string to_json(const std::vector<ResultRow>& rows) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["experiment"] = r.experiment;
        j["n"] = r.n;
        j["k"] = r.k;
        j["trials"] = r.trials;
        j["successes"] = r.successes;
        j["rate"] = r.rate;
        j["ci_low"] = r.ci_low;
        j["ci_high"] = r.ci_high;
        j["theory"] = r.theory;
        j["pass"] = r.pass;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string render(const std::vector<ResultRow>& rows, Format format) {
    return format == Format::Csv ? to_csv(rows) : to_json(rows);
}

int exit_code(const std::vector<ResultRow>& rows) {
    for (const auto& r : rows)
        if (!r.pass) return 1;
    return 0;
}

}  // namespace posverif::cli
