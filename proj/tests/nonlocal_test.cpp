#include <gtest/gtest.h>

#include <cmath>

#include "posverif/nonlocal/game.hpp"
#include "test_util.hpp"

using namespace posverif;
using namespace posverif::nonlocal;
using puzzle::Equation;
using puzzle::Preimage;

namespace {

constexpr unsigned kN = 8;
constexpr std::size_t kTrials = 10000;

double pow2(int e) { return std::ldexp(1.0, e); }

// Closed forms from the per-branch analysis of each strategy.
double honest_to_b_rate(unsigned n) {
    // b = 0: C's random (b', v) is right with chance 2/2^(n+1);
    // b = 1: B fails only on d = 0, C's random c matches half the time.
    return 0.5 * pow2(-static_cast<int>(n)) + 0.5 * (1 - pow2(-static_cast<int>(n))) * 0.5;
}

/// Wilson interval written out independently of the library.
std::pair<double, double> wilson_oracle(double k, double n) {
    const double z = 1.959963984540054;
    const double p = k / n;
    const double a = p + z * z / (2 * n);
    const double b = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    return {(a - b) / (1 + z * z / n), (a + b) / (1 + z * z / n)};
}

/// A stage C that touches B's register.
class Snooper final : public NonlocalStrategy {
public:
    std::string name() const override { return "snooper"; }
    Commitment stage_a(const KeyAccess& key, SplitMix64& rng) const override {
        auto ob = key.obligate(rng);
        Commitment c{ob.y, {}, {ob.y}};
        c.state.add(std::move(ob.state), kPartyB);
        return c;
    }
    Answer stage_b(qsim::RegisterView&, const Tape& tape, bool, SplitMix64&) const override {
        return Preimage{false, tape[0]};
    }
    Answer stage_c(qsim::RegisterView& view, const Tape& tape, bool, SplitMix64& rng) const override {
        view.measure("preimage", rng);
        return Preimage{false, tape[0]};
    }
};

}  // namespace

TEST(Stats, WilsonMatchesOracle) {
    for (auto [k, n] : {std::pair{50, 100}, {0, 10}, {10, 10}, {9980, 10000}, {1, 3}}) {
        const auto e = wilson(k, n);
        const auto [lo, hi] = wilson_oracle(k, n);
        EXPECT_NEAR(e.ci_low, std::max(0.0, lo), 1e-12);
        EXPECT_NEAR(e.ci_high, std::min(1.0, hi), 1e-12);
        EXPECT_LE(e.ci_low, e.rate);
        EXPECT_LE(e.rate, e.ci_high);
    }
    EXPECT_NEAR(wilson(50, 100).ci_low, 0.4038, 1e-4);
    EXPECT_NEAR(wilson(0, 10).ci_high, 0.2775, 1e-4);
    EXPECT_ERRC(wilson(0, 0), Errc::InvalidTrials);
    EXPECT_ERRC(wilson(3, 2), Errc::InvalidTrials);
}

TEST(Stats, CountIndependentOfWorkers) {
    auto trial = [](std::uint64_t s, std::size_t) { return SplitMix64(s).coin(); };
    const auto one = count_successes(5000, 42, trial, 1);
    EXPECT_EQ(count_successes(5000, 42, trial, 4), one);
    EXPECT_EQ(count_successes(5000, 42, trial, 7), one);
    EXPECT_NE(count_successes(5000, 43, trial, 4), one);
}

TEST(Stats, ExceptionsPropagate) {
    auto trial = [](std::uint64_t, std::size_t i) -> bool {
        if (i == 17) throw Error(Errc::RegisterViolation, "boom");
        return true;
    };
    EXPECT_ERRC(count_successes(100, 1, trial, 4), Errc::RegisterViolation);
}

TEST(Nonlocal, StrategyRegistry) {
    for (const auto& name : strategy_names()) EXPECT_EQ(make_strategy(name)->name(), name);
    EXPECT_ERRC(make_strategy("nosuch"), Errc::UnknownStrategy);
}

TEST(Nonlocal, TrialsMustBePositive) {
    EXPECT_ERRC(estimate_win_rate(kN, *always_fail(), 0, 1), Errc::InvalidTrials);
}

TEST(Nonlocal, AlwaysFailRateZero) {
    const auto e = estimate_win_rate(kN, *always_fail(), kTrials, 1);
    EXPECT_EQ(e.successes, 0u);
    EXPECT_EQ(e.ci_low, 0.0);
    EXPECT_LT(e.ci_high, 4.0 / kTrials);
}

TEST(Nonlocal, HonestToBRate) {
    const auto e = estimate_win_rate(kN, *honest_to_b(), kTrials, 2);
    EXPECT_TRUE(e.covers(honest_to_b_rate(kN))) << e.rate;
    EXPECT_TRUE(e.covers(0.25)) << e.rate;
}

TEST(Nonlocal, MeasureAndGuessHitsThreeQuarters) {
    const auto e = estimate_win_rate(kN, *measure_and_guess(), kTrials, 3);
    EXPECT_TRUE(e.covers(0.75)) << e.rate;
    EXPECT_LT(e.ci_high, 0.78);
}

TEST(Nonlocal, BruteForceBreaksTheCeiling) {
    for (unsigned n : {2u, 5u, 8u}) {
        const auto e = estimate_win_rate(n, *brute_force(), 2000, 4 + n);
        EXPECT_GT(e.rate, 0.9);
        // The exhaustive search always finds the claw.
        EXPECT_EQ(e.successes, e.trials);
    }
}

TEST(Nonlocal, CeilingForNonBruteForceStrategies) {
    for (const auto& name : strategy_names()) {
        if (name == "brute_force") continue;
        EXPECT_LT(estimate_win_rate(kN, *make_strategy(name), kTrials, 5).ci_high, 0.78) << name;
    }
}

TEST(Nonlocal, BranchStructureOfMeasureAndGuess) {
    const auto strat = measure_and_guess();
    SplitMix64 rng(6);
    for (int i = 0; i < 500; ++i) {
        const auto r = play_nonlocal(4, *strat, rng);
        if (!r.challenge) EXPECT_TRUE(r.win);
        else EXPECT_EQ(r.b_ok, r.c_ok);  // both read the same tape
        EXPECT_EQ(r.win, r.b_ok && r.c_ok);
    }
}

TEST(Nonlocal, SmallNRatesMatchClosedForms) {
    // With n = 2 the sampled rates converge quickly; compare to the closed forms.
    EXPECT_TRUE(estimate_win_rate(2, *honest_to_b(), 20000, 8).covers(honest_to_b_rate(2)));
    EXPECT_TRUE(estimate_win_rate(2, *measure_and_guess(), 20000, 9).covers(0.75));
}

TEST(Nonlocal, Deterministic) {
    const auto a = estimate_win_rate(kN, *measure_and_guess(), 2000, 10);
    const auto b = estimate_win_rate(kN, *measure_and_guess(), 2000, 10);
    EXPECT_EQ(a.successes, b.successes);
}

TEST(Nonlocal, StageTouchingOtherSideRaises) {
    SplitMix64 rng(11);
    Snooper s;
    EXPECT_ERRC(play_nonlocal(3, s, rng), Errc::RegisterViolation);
}

TEST(Nonlocal, CanaryCannotSignal) {
    // C applies b-dependent operations to its half of an entangled state;
    // B's marginal, averaged over C's measurement outcomes, must be exactly
    // the same for both values of b.
    SplitMix64 rng(12);
    for (int round = 0; round < 20; ++round) {
        const auto joint = testutil::random_state({{"R", 2}, {"S", 2}}, rng);
        std::map<BitString, double> marginal[2];
        for (bool b : {false, true}) {
            qsim::SharedState st;
            st.add(joint, {{"R", kPartyB}, {"S", kPartyC}});
            qsim::RegisterView c(st, kPartyC);
            qsim::RegisterView bview(st, kPartyB);
            if (b) {
                c.hadamard("S");
                c.apply_z("S", BitString::parse("10"));
            } else {
                c.apply_x("S", BitString::parse("11"));
            }
            EXPECT_ERRC(c.distribution("R"), Errc::RegisterViolation);
            EXPECT_ERRC(bview.hadamard("S"), Errc::RegisterViolation);
            // Average B's conditional marginal over every outcome C could see.
            const auto& factor = st.factor("S");
            for (const auto& [outcome, p] : factor.distribution("S")) {
                auto branch = factor;
                branch.collapse("S", outcome);
                for (const auto& [r, q] : branch.distribution("R")) marginal[b][r] += p * q;
            }
            const auto unmeasured = bview.distribution("R");
            for (const auto& [r, q] : unmeasured) EXPECT_NEAR(q, marginal[b][r], 1e-12);
        }
        ASSERT_EQ(marginal[0].size(), marginal[1].size());
        for (const auto& [k, p] : marginal[0]) EXPECT_NEAR(p, marginal[1].at(k), 1e-12);
    }
}

TEST(TwoOfTwo, TrapdoorSolverAlwaysWins) {
    SplitMix64 rng(13);
    for (int i = 0; i < 200; ++i) {
        const auto [pk, td] = puzzle::keygen(6, rng);
        const Trapdoor* held = &td;
        TwoOfTwoSolver solver = [held](const KeyAccess&, SplitMix64& r) {
            const auto& key = held->key();
            const BitString x0(key.n, r.bits(key.n));
            const BitString y = held->handle().eval(false, x0);
            const BitString d(key.n, 1 + r.below(width_mask(key.n)));
            const BitString x1 = held->inv(true, y);
            return TwoOfTwoOutput{y, Preimage{false, x0}, Equation{d.dot(x0 ^ x1), d}};
        };
        EXPECT_TRUE(play_2of2(td, solver, rng));
    }
}

TEST(TwoOfTwo, ZeroEquationAlwaysLoses) {
    TwoOfTwoSolver solver = [](const KeyAccess& key, SplitMix64& r) {
        auto ob = key.obligate(r);
        const auto bit = ob.state.measure("bit", r).outcome;
        const auto v = ob.state.measure("preimage", r).outcome;
        return TwoOfTwoOutput{ob.y, Preimage{bit.bit(0), v}, Equation{false, BitString::zeros(key.handle().n())}};
    };
    EXPECT_EQ(estimate_2of2_rate(kN, solver, 1000, 14).successes, 0u);
}

TEST(TwoOfTwo, ReducedRates) {
    const auto mg = estimate_2of2_rate(kN, reduce_to_2of2(measure_and_guess()), kTrials, 15);
    EXPECT_TRUE(mg.covers(0.5)) << mg.rate;
    EXPECT_EQ(estimate_2of2_rate(kN, reduce_to_2of2(brute_force()), 2000, 16).rate, 1.0);
    EXPECT_EQ(estimate_2of2_rate(kN, reduce_to_2of2(always_fail()), 2000, 17).successes, 0u);
    // B answers 0 honestly, C's random equation is right half the time.
    const auto hb = estimate_2of2_rate(kN, reduce_to_2of2(honest_to_b()), kTrials, 18);
    EXPECT_TRUE(hb.covers(0.5)) << hb.rate;
}

TEST(TwoOfTwo, ReductionInequalityForEveryStrategy) {
    for (const auto& name : strategy_names()) {
        const auto strat = make_strategy(name);
        const auto tau = estimate_win_rate(kN, *strat, kTrials, 19);
        const auto p2 = estimate_2of2_rate(kN, reduce_to_2of2(strat), kTrials, 20);
        EXPECT_TRUE(reduction_inequality_holds(tau, p2)) << name << " tau=" << tau.rate << " p'=" << p2.rate;
    }
}

TEST(TwoOfTwo, InequalityCheckRejectsViolations) {
    EXPECT_FALSE(reduction_inequality_holds(wilson(9500, 10000), wilson(5000, 10000)));
    EXPECT_TRUE(reduction_inequality_holds(wilson(7500, 10000), wilson(5000, 10000)));
    EXPECT_TRUE(reduction_inequality_holds(wilson(0, 10000), wilson(0, 10000)));
}
