#include "posverif/nonlocal/game.hpp"

#include <cmath>

#include "posverif/error.hpp"

namespace posverif::nonlocal {

using puzzle::Equation;
using puzzle::Preimage;

namespace {

enum Stream : std::uint64_t { kStageA = 1, kStageB = 2, kStageC = 3 };

BitString random_nonzero(unsigned n, SplitMix64& rng) {
    return BitString(n, 1 + rng.below(width_mask(n)));
}

/// Measures a fresh claw state in the standard basis: a preimage of y.
Preimage measured_preimage(qsim::StateVector state, SplitMix64& rng) {
    const auto bit = state.measure("bit", rng).outcome;
    const auto v = state.measure("preimage", rng).outcome;
    return Preimage{bit.bit(0), v};
}

class HonestToB final : public NonlocalStrategy {
public:
    std::string name() const override { return "honest_to_B"; }

    Commitment stage_a(const KeyAccess& key, SplitMix64& rng) const override {
        auto ob = key.obligate(rng);
        Commitment out{ob.y, {}, {ob.y}};
        out.state.add(std::move(ob.state), kPartyB);
        return out;
    }

    Answer stage_b(qsim::RegisterView& view, const Tape&, bool b, SplitMix64& rng) const override {
        const auto bit = b ? view.measure_hadamard("bit", rng) : view.measure("bit", rng);
        const auto rest = b ? view.measure_hadamard("preimage", rng) : view.measure("preimage", rng);
        return puzzle::answer_from_bits(b, bit.concat(rest));
    }

    Answer stage_c(qsim::RegisterView&, const Tape& tape, bool b, SplitMix64& rng) const override {
        const unsigned n = tape.at(0).width();
        if (!b) return Preimage{rng.coin(), BitString(n, rng.bits(n))};
        return Equation{rng.coin(), random_nonzero(n, rng)};
    }
};

/// Both sides replay answers fixed in stage A; the tape holds the answer bits
/// for challenge 0 and challenge 1.
class TapeReplay : public NonlocalStrategy {
public:
    Answer stage_b(qsim::RegisterView&, const Tape& tape, bool b, SplitMix64&) const override {
        return puzzle::answer_from_bits(b, tape.at(b ? 1 : 0));
    }
    Answer stage_c(qsim::RegisterView&, const Tape& tape, bool b, SplitMix64&) const override {
        return puzzle::answer_from_bits(b, tape.at(b ? 1 : 0));
    }
};

class MeasureAndGuess final : public TapeReplay {
public:
    std::string name() const override { return "measure_and_guess"; }

    Commitment stage_a(const KeyAccess& key, SplitMix64& rng) const override {
        auto ob = key.obligate(rng);
        const unsigned n = key.handle().n();
        const Preimage pre = measured_preimage(std::move(ob.state), rng);
        const Equation eq{rng.coin(), random_nonzero(n, rng)};
        return Commitment{ob.y, {}, {puzzle::answer_bits(pre), puzzle::answer_bits(eq)}};
    }
};

class BruteForce final : public TapeReplay {
public:
    std::string name() const override { return "brute_force"; }

    Commitment stage_a(const KeyAccess& key, SplitMix64& rng) const override {
        auto ob = key.obligate(rng);
        const auto& pk = key.handle();
        const unsigned n = pk.n();
        const Preimage pre = measured_preimage(std::move(ob.state), rng);
        // Exhaustive search for the partner preimage using only eval.
        BitString shift = BitString::zeros(n);
        for (std::uint64_t x = 0; x <= width_mask(n); ++x) {
            const BitString cand(n, x);
            if (pk.eval(!pre.bprime, cand) == ob.y) {
                shift = cand ^ pre.v;
                break;
            }
        }
        const BitString d = random_nonzero(n, rng);
        const Equation eq{d.dot(shift), d};
        return Commitment{ob.y, {}, {puzzle::answer_bits(pre), puzzle::answer_bits(eq)}};
    }
};

class AlwaysFail final : public NonlocalStrategy {
public:
    std::string name() const override { return "always_fail"; }

    Commitment stage_a(const KeyAccess& key, SplitMix64& rng) const override {
        auto ob = key.obligate(rng);
        return Commitment{ob.y, {}, {ob.y}};
    }
    // Answers of the wrong kind never verify.
    Answer stage_b(qsim::RegisterView&, const Tape& tape, bool b, SplitMix64&) const override {
        return wrong_kind(tape, b);
    }
    Answer stage_c(qsim::RegisterView&, const Tape& tape, bool b, SplitMix64&) const override {
        return wrong_kind(tape, b);
    }

private:
    static Answer wrong_kind(const Tape& tape, bool b) {
        const unsigned n = tape.at(0).width();
        if (b) return Preimage{false, BitString::zeros(n)};
        return Equation{false, BitString::zeros(n)};
    }
};

}  // namespace

bool accepts(const Trapdoor& td, const BitString& y, bool b, const Answer& ans) {
    if (!puzzle::answers_challenge(ans, b)) return false;
    const unsigned n = td.key().n;
    const bool well_formed = std::visit(
        [&](const auto& a) {
            if constexpr (std::is_same_v<std::decay_t<decltype(a)>, Preimage>) return a.v.width() == n;
            else return a.d.width() == n;
        },
        ans);
    return well_formed && y.width() == n && puzzle::verify(td, y, b, ans);
}

GameResult play_nonlocal(const Trapdoor& td, const NonlocalStrategy& strategy, SplitMix64& rng) {
    SplitMix64 rng_a = rng.fork(kStageA);
    SplitMix64 rng_b = rng.fork(kStageB);
    SplitMix64 rng_c = rng.fork(kStageC);
    const bool b = rng.coin();

    const KeyAccess key(td);
    Commitment com = strategy.stage_a(key, rng_a);
    qsim::RegisterView view_b(com.state, kPartyB);
    qsim::RegisterView view_c(com.state, kPartyC);
    const Answer ans_b = strategy.stage_b(view_b, com.tape, b, rng_b);
    const Answer ans_c = strategy.stage_c(view_c, com.tape, b, rng_c);

    GameResult r;
    r.challenge = b;
    r.y = com.y;
    r.b_ok = accepts(td, com.y, b, ans_b);
    r.c_ok = accepts(td, com.y, b, ans_c);
    r.win = r.b_ok && r.c_ok;
    return r;
}

GameResult play_nonlocal(unsigned n, const NonlocalStrategy& strategy, SplitMix64& rng) {
    const auto [pk, td] = puzzle::keygen(n, rng);
    return play_nonlocal(td, strategy, rng);
}

Estimate estimate_win_rate(unsigned n, const NonlocalStrategy& strategy, std::size_t trials, std::uint64_t seed) {
    return estimate(trials, seed, [&](std::uint64_t s, std::size_t) {
        SplitMix64 rng(s);
        return play_nonlocal(n, strategy, rng).win;
    });
}

TwoOfTwoSolver reduce_to_2of2(std::shared_ptr<const NonlocalStrategy> strategy) {
    return [strategy = std::move(strategy)](const KeyAccess& key, SplitMix64& rng) {
        SplitMix64 rng_a = rng.fork(kStageA);
        SplitMix64 rng_b = rng.fork(kStageB);
        SplitMix64 rng_c = rng.fork(kStageC);
        Commitment com = strategy->stage_a(key, rng_a);
        qsim::RegisterView view_b(com.state, kPartyB);
        qsim::RegisterView view_c(com.state, kPartyC);
        Answer ans0 = strategy->stage_b(view_b, com.tape, false, rng_b);
        Answer ans1 = strategy->stage_c(view_c, com.tape, true, rng_c);
        return TwoOfTwoOutput{com.y, std::move(ans0), std::move(ans1)};
    };
}

bool play_2of2(const Trapdoor& td, const TwoOfTwoSolver& solver, SplitMix64& rng) {
    const KeyAccess key(td);
    const auto out = solver(key, rng);
    return accepts(td, out.y, false, out.ans0) && accepts(td, out.y, true, out.ans1);
}

bool play_2of2(unsigned n, const TwoOfTwoSolver& solver, SplitMix64& rng) {
    const auto [pk, td] = puzzle::keygen(n, rng);
    return play_2of2(td, solver, rng);
}

Estimate estimate_2of2_rate(unsigned n, const TwoOfTwoSolver& solver, std::size_t trials, std::uint64_t seed) {
    return estimate(trials, seed, [&](std::uint64_t s, std::size_t) {
        SplitMix64 rng(s);
        return play_2of2(n, solver, rng);
    });
}

bool reduction_inequality_holds(const Estimate& tau, const Estimate& p2) {
    const double var_tau = tau.rate * (1 - tau.rate) / static_cast<double>(tau.trials);
    const double var_p = p2.rate * (1 - p2.rate) / static_cast<double>(p2.trials);
    const double sigma = std::sqrt(4 * var_tau + var_p);
    return p2.rate >= 2 * tau.rate - 1 - 5 * sigma;
}

std::shared_ptr<const NonlocalStrategy> honest_to_b() { return std::make_shared<HonestToB>(); }
std::shared_ptr<const NonlocalStrategy> measure_and_guess() { return std::make_shared<MeasureAndGuess>(); }
std::shared_ptr<const NonlocalStrategy> brute_force() { return std::make_shared<BruteForce>(); }
std::shared_ptr<const NonlocalStrategy> always_fail() { return std::make_shared<AlwaysFail>(); }

std::vector<std::string> strategy_names() { return {"honest_to_B", "measure_and_guess", "brute_force", "always_fail"}; }

std::shared_ptr<const NonlocalStrategy> make_strategy(const std::string& name) {
    if (name == "honest_to_B") return honest_to_b();
    if (name == "measure_and_guess") return measure_and_guess();
    if (name == "brute_force") return brute_force();
    if (name == "always_fail") return always_fail();
    throw Error(Errc::UnknownStrategy, "unknown strategy '" + name + "'");
}

}  // namespace posverif::nonlocal
