#include <gtest/gtest.h>

#include <cmath>

#include "posverif/adversary/adversary.hpp"
#include "test_util.hpp"

using namespace posverif;
using namespace posverif::adversary;
using protocol::PRPVConfig;
using protocol::Reason;
using spacetime::Rational;

namespace {

PRPVConfig config(unsigned n, unsigned k, std::uint64_t seed = 7) {
    PRPVConfig c;
    c.n = n;
    c.k = k;
    c.seed = seed;
    return c;
}

double completeness(unsigned n, unsigned k) { return std::pow(1 - std::ldexp(1.0, -static_cast<int>(n) - 1), k); }

/// Wraps a strategy and lets A1 touch a register of A0's at t = 1.
class Snooping final : public AdversaryStrategy {
public:
    explicit Snooping(std::shared_ptr<const AdversaryStrategy> inner) : inner_(std::move(inner)) {}
    Setup u0(const TrialContext& t, SplitMix64& rng) const override {
        Setup s = inner_->u0(t, rng);
        s.state.add(qsim::new_state({{"kept", 1}}), kA0);
        return s;
    }
    U1Out u1(HandlerEnv& env, const Bytes& first) const override { return inner_->u1(env, first); }
    U2Out u2(HandlerEnv& env, const Bytes& challenge) const override {
        env.view.measure("kept", env.rng);
        return inner_->u2(env, challenge);
    }
    U3Out u3(HandlerEnv& env, const Bytes& s, const Bytes& m) const override { return inner_->u3(env, s, m); }
    Bytes u4(HandlerEnv& env, const Bytes& r, const Bytes& m) const override { return inner_->u4(env, r, m); }

private:
    std::shared_ptr<const AdversaryStrategy> inner_;
};

}  // namespace

TEST(Pack, round_trip_and_malformed) {
    const std::vector<Bytes> parts = {{}, {1, 2, 3}, {0xFF}};
    EXPECT_EQ(unpack(pack(parts)), parts);
    Bytes bad = pack(parts);
    bad.pop_back();
    EXPECT_ERRC(unpack(bad), Errc::DecodeError);
}

TEST(Attacks, registry) {
    for (const auto& name : attack_names()) EXPECT_NO_THROW(make_attack(name, 4, 2)) << name;
    EXPECT_ERRC(make_attack("nope", 4, 1), Errc::UnknownAttack);
    EXPECT_EQ(make_attack("teleport", 4, 2).cls(), AdversaryClass::RL);
    EXPECT_EQ(make_attack("forward_compiled_guess", 4, 2).cls(), AdversaryClass::RF);
}

TEST(Attacks, guess_meets_every_deadline) {
    SplitMix64 rng(3);
    const auto run = run_attack(config(6, 1), guessing_attack(6, 1), rng);
    const auto& t = run.result.trace;
    using protocol::kV0;
    using protocol::kV1;
    EXPECT_EQ(t.deliveries(kV0, "y").front()->time, Rational(0));
    EXPECT_EQ(t.deliveries(kV1, "y").front()->time, Rational(3));
    EXPECT_EQ(t.deliveries(kV0, "ans").front()->time, Rational(4));
    EXPECT_EQ(t.deliveries(kV1, "ans").front()->time, Rational(3));
    // The adversaries' private traffic never reaches a verifier.
    EXPECT_TRUE(t.deliveries(kV0, "m").empty());
    EXPECT_TRUE(t.deliveries(kV1, "m").empty());
    EXPECT_TRUE(t.deliveries(kV0, "m'").empty());
    EXPECT_TRUE(t.deliveries(kV1, "m'").empty());
    EXPECT_EQ(t.deliveries(3, "m").size(), 1u);
    EXPECT_EQ(t.deliveries(3, "m").front()->time, Rational(3));
    EXPECT_EQ(t.deliveries(2, "m'").front()->time, Rational(4));
    // Only VerFail is possible: the guess either matches or the answers fail.
    if (!run.result.verdict.accept) {
        EXPECT_EQ(run.result.verdict.reason, Reason::VerFail);
    }
}

TEST(Attacks, guess_rate_matches_closed_form) {
    for (unsigned k : {1u, 2u, 3u}) {
        const unsigned n = 4;
        const double theory = std::ldexp(1.0, -static_cast<int>(k)) * completeness(n, k);
        const auto e = protocol::estimate_acceptance(config(n, k, 100 + k), guessing_attack(n, k).factory(), 4000);
        EXPECT_TRUE(e.covers(theory)) << "k=" << k << " rate=" << e.rate << " theory=" << theory;
    }
}

TEST(Forwarding, compiled_matches_original_per_seed) {
    for (unsigned k : {1u, 2u, 3u}) {
        const auto original = guessing_attack(5, k);
        const auto compiled = forwarding_compiler(original);
        for (std::uint64_t seed = 0; seed < 150; ++seed) {
            SplitMix64 a(seed), b(seed);
            const auto ro = run_attack(config(5, k), original, a).result;
            const auto rc = run_attack(config(5, k), compiled, b).result;
            ASSERT_EQ(ro.verdict, rc.verdict) << "k=" << k << " seed=" << seed;
            EXPECT_EQ(ro.y0, rc.y0);
            EXPECT_EQ(ro.ans0, rc.ans0);
            EXPECT_EQ(ro.ans1, rc.ans1);
        }
    }
}

TEST(Forwarding, compiled_u2_only_forwards_the_challenge) {
    SplitMix64 rng(11);
    const auto r = run_attack(config(4, 2), forwarding_compiler(guessing_attack(4, 2)), rng).result;
    const auto sent = r.trace.deliveries(2, "m'");
    ASSERT_EQ(sent.size(), 1u);
    EXPECT_EQ(sent.front()->payload, protocol::encode_bits(r.challenge));
}

TEST(Forwarding, preconditions) {
    EXPECT_ERRC(forwarding_compiler(teleport_attack(4, 1)), Errc::NotClassicalTape);
    EXPECT_ERRC(forwarding_compiler(guessing_attack(4, 9)), Errc::KTooLarge);
    EXPECT_NO_THROW(forwarding_compiler(guessing_attack(4, 8)));
}

TEST(Teleport, n8_consumes_exactly_nine_pairs_and_wins) {
    std::size_t wins = 0;
    const std::size_t trials = 200;
    for (std::size_t i = 0; i < trials; ++i) {
        SplitMix64 rng(trial_seed(42, i));
        const auto run = run_attack(config(8, 1), teleport_attack(8, 1), rng);
        EXPECT_EQ(run.stats.setup_entanglement, 9u);
        EXPECT_EQ(run.stats.consumed, 9u);
        if (run.result.verdict.accept) ++wins;
        else EXPECT_EQ(run.result.verdict.reason, Reason::VerFail);
    }
    EXPECT_TRUE(testutil::within_sigma(wins, trials, completeness(8, 1))) << wins;
}

TEST(Teleport, repeated_instances_book_k_times_n_plus_one) {
    SplitMix64 rng(5);
    const auto run = run_attack(config(4, 3), teleport_attack(4, 3), rng);
    EXPECT_EQ(run.stats.consumed, 15u);
    const auto e = protocol::estimate_acceptance(config(4, 3, 9), teleport_attack(4, 3).factory(), 1500);
    EXPECT_TRUE(e.covers(completeness(4, 3))) << e.rate;
}

TEST(Teleport, budget_is_enforced) {
    EXPECT_ERRC(teleport_attack(8, 1, 8), Errc::BudgetExceeded);
    EXPECT_ERRC(teleport_attack(4, 2, 9), Errc::BudgetExceeded);
    EXPECT_EQ(teleport_attack(8, 1).entanglement_budget(), 9u);

    // A pair declared with too small a budget fails at setup.
    const AdversaryPair cheap("cheap", AdversaryClass::RL, 1, 3, teleport_attack(4, 1).strategy());
    SplitMix64 rng(1);
    EXPECT_ERRC(run_attack(config(4, 1), cheap, rng), Errc::BudgetExceeded);
}

TEST(Teleport, a1_cannot_touch_a0_registers) {
    const AdversaryPair snoop("snoop", AdversaryClass::RL, 1, 5,
                              std::make_shared<Snooping>(teleport_attack(4, 1).strategy()));
    SplitMix64 rng(2);
    EXPECT_ERRC(run_attack(config(4, 1), snoop, rng), Errc::RegisterViolation);
}

TEST(Attacks, shape_mismatch_is_config_error) {
    SplitMix64 rng(1);
    EXPECT_ERRC(run_attack(config(4, 2), guessing_attack(4, 1), rng), Errc::ConfigInvalid);
    EXPECT_ERRC(run_attack(config(5, 1), teleport_attack(4, 1), rng), Errc::ConfigInvalid);
}

TEST(ClassicalForward, reproduces_the_single_prover_per_seed) {
    const auto prover = protocol::memorize_and_guess();
    const auto pair = classical_forward_attack(prover, 2);
    const auto single = protocol::classical_prover_at(prover, Rational(3, 2));
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SplitMix64 a(seed), b(seed);
        const auto forwarded = run_attack(config(6, 2), pair, a).result;
        const auto direct = protocol::run_prpv(config(6, 2), single, b);
        ASSERT_EQ(forwarded.verdict, direct.verdict) << seed;
        EXPECT_EQ(forwarded.y0, direct.y0);
        EXPECT_EQ(forwarded.ans1, direct.ans1);
    }
    const auto e = protocol::estimate_acceptance(config(6, 2, 13), pair.factory(), 4000);
    EXPECT_TRUE(e.covers(0.5625)) << e.rate;
}

TEST(ClassicalForward, mismatched_tapes_are_caught) {
    const auto pair = classical_forward_attack(protocol::memorize_and_guess(), 1, true);
    std::size_t mismatches = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SplitMix64 rng(seed);
        const auto r = run_attack(config(8, 1), pair, rng).result;
        EXPECT_FALSE(r.verdict.accept && r.y0 != r.y1);
        if (r.verdict.reason == Reason::Mismatch) ++mismatches;
    }
    EXPECT_GE(mismatches, 195u);
}
