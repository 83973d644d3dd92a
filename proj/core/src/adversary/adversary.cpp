#include "posverif/adversary/adversary.hpp"

#include "posverif/error.hpp"

namespace posverif::adversary {

using protocol::kLabelAns;
using protocol::kLabelChallenge;
using protocol::kLabelPk;
using protocol::kLabelY;
using spacetime::Directed;
using spacetime::Emission;
using spacetime::PartyContext;
using spacetime::PartyId;
using spacetime::Private;

namespace {

const std::string kLabelM = "m";
const std::string kLabelMPrime = "m'";

constexpr PartyId kIdA0 = protocol::kV1 + 1;
constexpr PartyId kIdA1 = protocol::kV1 + 2;
constexpr unsigned kMaxCompiledK = 8;

}  // namespace

const char* class_name(AdversaryClass c) noexcept {
    switch (c) {
        case AdversaryClass::R0: return "R0";
        case AdversaryClass::RF: return "RF";
        case AdversaryClass::RL: return "RL";
        case AdversaryClass::RP: return "RP";
    }
    return "?";
}

Bytes pack(const std::vector<Bytes>& parts) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(parts.size()));
    for (const auto& p : parts) w.bytes(p);
    return std::move(w).take();
}

std::vector<Bytes> unpack(const Bytes& bytes) {
    ByteReader r(bytes);
    const auto count = r.u32();
    if (count > bytes.size()) throw Error(Errc::DecodeError, "part count exceeds message size");
    std::vector<Bytes> parts;
    parts.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) parts.push_back(r.bytes());
    r.expect_done();
    return parts;
}

SplitMix64 handler_stream(const TrialContext& trial, unsigned h) { return SplitMix64(trial.prover_seed).fork(h); }

std::pair<BitString, BitString> HandlerEnv::teleport(const std::string& source, const std::string& epr_local) {
    const unsigned width = view.width(source);
    auto keys = view.teleport(source, epr_local, rng);
    if (consumed_) *consumed_ += width;
    return keys;
}

AdversaryPair::AdversaryPair(std::string name, AdversaryClass cls, unsigned k, unsigned budget,
                             std::shared_ptr<const AdversaryStrategy> strategy)
    : name_(std::move(name)), cls_(cls), k_(k), budget_(budget), strategy_(std::move(strategy)) {
    if (!strategy_) throw Error(Errc::ConfigInvalid, "adversary pair needs a strategy");
}

namespace {

/// State of one trial shared by the two adversary behaviors. Only the
/// simulator moves information between them; each handler sees its own view.
struct Session {
    const TrialContext* trial;
    std::shared_ptr<const AdversaryStrategy> strategy;
    unsigned budget;
    std::shared_ptr<TrialStats> stats;
    Setup setup;
    unsigned consumed = 0;

    HandlerEnv env(const std::string& party, unsigned h) {
        return HandlerEnv(*trial, qsim::RegisterView(setup.state, party), setup.tape, handler_stream(*trial, h),
                          &consumed);
    }

    void book() {
        if (stats) stats->consumed = consumed;
        if (consumed > budget)
            throw Error(Errc::BudgetExceeded, "consumed " + std::to_string(consumed) + " EPR pairs, budget " +
                                                  std::to_string(budget));
    }
};

Emission to_verifier(const std::string& label, Bytes payload, PartyId verifier) {
    return Emission{label, std::move(payload), Directed{verifier}, spacetime::Public{}};
}

Emission to_partner(const std::string& label, Bytes payload, PartyId partner) {
    return Emission{label, std::move(payload), Directed{partner}, Private{{kIdA0, kIdA1}}};
}

class A0Behavior final : public spacetime::PartyBehavior {
public:
    explicit A0Behavior(std::shared_ptr<Session> s) : s_(std::move(s)) {}

    void on_receive(PartyContext& ctx, const spacetime::Message& msg) override {
        if (msg.label == kLabelPk && msg.sender == protocol::kV0 && !r_prime_) {
            auto env = s_->env(kA0, 1);
            U1Out out = s_->strategy->u1(env, msg.payload);
            s_->book();
            r_prime_ = std::move(out.r_prime);
            ctx.emit(to_verifier(kLabelY, std::move(out.y0), protocol::kV0));
            ctx.emit(to_partner(kLabelM, std::move(out.m), kIdA1));
        } else if (msg.label == kLabelMPrime && msg.sender == kIdA1 && r_prime_ && !done_) {
            done_ = true;
            auto env = s_->env(kA0, 4);
            Bytes ans0 = s_->strategy->u4(env, *r_prime_, msg.payload);
            s_->book();
            ctx.emit(to_verifier(kLabelAns, std::move(ans0), protocol::kV0));
        }
    }

private:
    std::shared_ptr<Session> s_;
    std::optional<Bytes> r_prime_;
    bool done_ = false;
};

class A1Behavior final : public spacetime::PartyBehavior {
public:
    explicit A1Behavior(std::shared_ptr<Session> s) : s_(std::move(s)) {}

    void on_receive(PartyContext& ctx, const spacetime::Message& msg) override {
        if (msg.label == kLabelChallenge && msg.sender == protocol::kV1 && !s_prime_) {
            auto env = s_->env(kA1, 2);
            U2Out out = s_->strategy->u2(env, msg.payload);
            s_->book();
            s_prime_ = std::move(out.s_prime);
            ctx.emit(to_partner(kLabelMPrime, std::move(out.m_prime), kIdA0));
        } else if (msg.label == kLabelM && msg.sender == kIdA0 && s_prime_ && !done_) {
            done_ = true;
            auto env = s_->env(kA1, 3);
            U3Out out = s_->strategy->u3(env, *s_prime_, msg.payload);
            s_->book();
            ctx.emit(to_verifier(kLabelY, std::move(out.y1), protocol::kV1));
            ctx.emit(to_verifier(kLabelAns, std::move(out.ans1), protocol::kV1));
        }
    }

private:
    std::shared_ptr<Session> s_;
    std::optional<Bytes> s_prime_;
    bool done_ = false;
};

}  // namespace

protocol::ProverFactory AdversaryPair::factory(std::shared_ptr<TrialStats> stats) const {
    return [strategy = strategy_, budget = budget_, stats](const TrialContext& trial) {
        auto s = std::make_shared<Session>();
        s->trial = &trial;
        s->strategy = strategy;
        s->budget = budget;
        s->stats = stats;
        SplitMix64 rng = handler_stream(trial, 0);
        s->setup = strategy->u0(trial, rng);
        if (stats) *stats = TrialStats{s->setup.entangled_qubits, 0};
        if (s->setup.entangled_qubits > budget)
            throw Error(Errc::BudgetExceeded, "setup holds " + std::to_string(s->setup.entangled_qubits) +
                                                  " entangled qubits, budget " + std::to_string(budget));
        return protocol::ProverSide{{kA0, 0, std::make_shared<A0Behavior>(s)},
                                    {kA1, 3, std::make_shared<A1Behavior>(s)}};
    };
}

namespace {

void require_shape(const TrialContext& trial, unsigned k, bool plain_only) {
    if (trial.config.k != k)
        throw Error(Errc::ConfigInvalid, "adversary built for k = " + std::to_string(k) + ", protocol has k = " +
                                             std::to_string(trial.config.k));
    if (plain_only && trial.oracle) throw Error(Errc::ConfigInvalid, "adversary targets the plain protocol");
}

class GuessingStrategy final : public AdversaryStrategy {
public:
    explicit GuessingStrategy(unsigned k) : k_(k) {}

    Setup u0(const TrialContext& trial, SplitMix64&) const override {
        require_shape(trial, k_, false);
        return {};
    }

    U1Out u1(HandlerEnv& env, const Bytes& first) const override {
        const auto& puzzle = env.trial.puzzle;
        const auto pk = env.trial.keys.resolve(protocol::decode_first(first).public_keys);
        auto held = env.trial.keys.obligate(puzzle, pk, env.rng);
        const unsigned w = puzzle.challenge_width();
        const BitString guess(w, env.rng.bits(w));
        const auto ans = puzzle.solve(pk, held.y, std::move(held.states), guess, env.rng);
        Bytes y = puzzle::encode_obligation(held.y);
        Bytes a = puzzle::encode_answers(ans);
        return {a, y, pack({y, a})};
    }

    U2Out u2(HandlerEnv&, const Bytes& challenge) const override { return {challenge, challenge}; }

    U3Out u3(HandlerEnv&, const Bytes&, const Bytes& m) const override {
        auto parts = unpack(m);
        return {std::move(parts.at(0)), std::move(parts.at(1))};
    }

    Bytes u4(HandlerEnv&, const Bytes& r_prime, const Bytes&) const override { return r_prime; }

private:
    unsigned k_;
};

class CompiledStrategy final : public AdversaryStrategy {
public:
    CompiledStrategy(std::shared_ptr<const AdversaryStrategy> inner, unsigned k) : inner_(std::move(inner)), k_(k) {}

    Setup u0(const TrialContext& trial, SplitMix64& rng) const override {
        require_shape(trial, k_, true);
        Setup s = inner_->u0(trial, rng);
        if (!s.state.registers_of(kA1).empty() || s.entangled_qubits != 0)
            throw Error(Errc::NotClassicalTape, "A1 holds quantum registers after setup");
        return s;
    }

    U1Out u1(HandlerEnv& env, const Bytes& first) const override {
        U1Out o = inner_->u1(env, first);
        // Every copy of U2 runs on A1's (empty) side with the stream U2 would get.
        const unsigned w = env.trial.puzzle.challenge_width();
        std::vector<Bytes> s_primes;
        std::vector<Bytes> m_primes;
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << w); ++b) {
            qsim::SharedState scratch;
            HandlerEnv copy(env.trial, qsim::RegisterView(scratch, kA1), env.tape, handler_stream(env.trial, 2),
                            nullptr);
            U2Out o2 = inner_->u2(copy, protocol::encode_bits(BitString(w, b)));
            s_primes.push_back(std::move(o2.s_prime));
            m_primes.push_back(std::move(o2.m_prime));
        }
        return {pack({o.r_prime, pack(m_primes)}), std::move(o.y0), pack({o.m, pack(s_primes)})};
    }

    U2Out u2(HandlerEnv&, const Bytes& challenge) const override { return {challenge, challenge}; }

    U3Out u3(HandlerEnv& env, const Bytes& s_prime, const Bytes& m) const override {
        const auto parts = unpack(m);
        const auto table = unpack(parts.at(1));
        return inner_->u3(env, table.at(index(s_prime)), parts.at(0));
    }

    Bytes u4(HandlerEnv& env, const Bytes& r_prime, const Bytes& m_prime) const override {
        const auto parts = unpack(r_prime);
        const auto table = unpack(parts.at(1));
        return inner_->u4(env, parts.at(0), table.at(index(m_prime)));
    }

private:
    static std::size_t index(const Bytes& challenge) {
        return static_cast<std::size_t>(protocol::decode_bits(challenge).value());
    }

    std::shared_ptr<const AdversaryStrategy> inner_;
    unsigned k_;
};

std::string reg(const char* base, unsigned i, unsigned j) {
    return std::string(base) + "." + std::to_string(i) + "." + std::to_string(j);
}

class TeleportStrategy final : public AdversaryStrategy {
public:
    TeleportStrategy(unsigned n, unsigned k) : n_(n), k_(k) {}

    Setup u0(const TrialContext& trial, SplitMix64&) const override {
        require_shape(trial, k_, true);
        if (trial.config.n != n_) throw Error(Errc::ConfigInvalid, "adversary built for another n");
        Setup s;
        for (unsigned i = 0; i < k_; ++i) {
            for (unsigned j = 0; j <= n_; ++j) {
                auto epr = qsim::make_epr_pairs(1);
                epr.rename_register("R", reg("R", i, j));
                epr.rename_register("S", reg("S", i, j));
                s.state.add(std::move(epr), {{reg("R", i, j), kA0}, {reg("S", i, j), kA1}});
            }
        }
        s.entangled_qubits = k_ * (n_ + 1);
        return s;
    }

    U1Out u1(HandlerEnv& env, const Bytes& first) const override {
        const auto pk = env.trial.keys.resolve(protocol::decode_first(first).public_keys);
        auto held = env.trial.keys.obligate(env.trial.puzzle, pk, env.rng);
        std::vector<Bytes> keys;
        for (unsigned i = 0; i < k_; ++i) {
            auto& st = held.states.at(i);
            const std::string p = "P." + std::to_string(i);
            st.merge_registers({"bit", "preimage"}, p);
            st.split_register(p, p);
            env.view.add(std::move(st));
            BitString k0, k1;
            for (unsigned j = 0; j <= n_; ++j) {
                auto [x, z] = env.teleport(reg("P", i, j), reg("R", i, j));
                k0 = k0.concat(x);
                k1 = k1.concat(z);
            }
            keys.push_back(protocol::encode_bits(k0));
            keys.push_back(protocol::encode_bits(k1));
        }
        Bytes y = puzzle::encode_obligation(held.y);
        Bytes m = pack({y, pack(keys)});
        return {m, y, m};
    }

    U2Out u2(HandlerEnv& env, const Bytes& challenge) const override {
        const BitString b = protocol::decode_bits(challenge);
        env.trial.puzzle.check_challenge(b);
        std::vector<Bytes> outcomes;
        for (unsigned i = 0; i < k_; ++i) {
            const bool hadamard = env.trial.puzzle.instance_bit(b, i);
            BitString r;
            for (unsigned j = 0; j <= n_; ++j) {
                const auto name = reg("S", i, j);
                r = r.concat(hadamard ? env.view.measure_hadamard(name, env.rng) : env.view.measure(name, env.rng));
            }
            outcomes.push_back(protocol::encode_bits(r));
        }
        Bytes s = pack({challenge, pack(outcomes)});
        return {s, s};
    }

    U3Out u3(HandlerEnv& env, const Bytes& s_prime, const Bytes& m) const override {
        auto [y, ans] = decode(env, m, s_prime);
        return {std::move(y), std::move(ans)};
    }

    Bytes u4(HandlerEnv& env, const Bytes& r_prime, const Bytes& m_prime) const override {
        return decode(env, r_prime, m_prime).second;
    }

private:
    /// Undoes the teleportation keys: X flips standard outcomes, Z flips Hadamard ones.
    std::pair<Bytes, Bytes> decode(const HandlerEnv& env, const Bytes& keys_msg, const Bytes& outcome_msg) const {
        const auto kparts = unpack(keys_msg);
        const auto keys = unpack(kparts.at(1));
        const auto oparts = unpack(outcome_msg);
        const BitString b = protocol::decode_bits(oparts.at(0));
        const auto outcomes = unpack(oparts.at(1));
        puzzle::Answers ans;
        for (unsigned i = 0; i < k_; ++i) {
            const bool bit = env.trial.puzzle.instance_bit(b, i);
            const BitString r = protocol::decode_bits(outcomes.at(i));
            const BitString key = protocol::decode_bits(keys.at(2 * i + (bit ? 1 : 0)));
            ans.push_back(puzzle::answer_from_bits(bit, r ^ key));
        }
        return {kparts.at(0), puzzle::encode_answers(ans)};
    }

    unsigned n_;
    unsigned k_;
};

class ClassicalForwardStrategy final : public AdversaryStrategy {
public:
    ClassicalForwardStrategy(std::shared_ptr<const protocol::ClassicalProver> prover, unsigned k, bool mismatched)
        : prover_(std::move(prover)), k_(k), mismatched_(mismatched) {}

    Setup u0(const TrialContext& trial, SplitMix64&) const override {
        require_shape(trial, k_, false);
        Setup s;
        ByteWriter w;
        w.u64(trial.prover_seed);
        s.tape = std::move(w).take();
        return s;
    }

    U1Out u1(HandlerEnv& env, const Bytes& first) const override {
        return {first, prover_->respond(env.trial, {first}, tape(env, false)), first};
    }

    U2Out u2(HandlerEnv&, const Bytes& challenge) const override { return {challenge, challenge}; }

    U3Out u3(HandlerEnv& env, const Bytes& s_prime, const Bytes& m) const override {
        const auto t = tape(env, true);
        return {prover_->respond(env.trial, {m}, t), prover_->respond(env.trial, {m, s_prime}, t)};
    }

    Bytes u4(HandlerEnv& env, const Bytes& r_prime, const Bytes& m_prime) const override {
        return prover_->respond(env.trial, {r_prime, m_prime}, tape(env, false));
    }

private:
    std::uint64_t tape(const HandlerEnv& env, bool a1) const {
        ByteReader r(env.tape);
        const std::uint64_t t = r.u64();
        return a1 && mismatched_ ? SplitMix64::mix(t ^ 0xA1) : t;
    }

    std::shared_ptr<const protocol::ClassicalProver> prover_;
    unsigned k_;
    bool mismatched_;
};

}  // namespace

AdversaryPair guessing_attack(unsigned n, unsigned k) {
    (void)n;
    return AdversaryPair("guess", AdversaryClass::R0, k, 0, std::make_shared<GuessingStrategy>(k));
}

AdversaryPair forwarding_compiler(const AdversaryPair& adv) {
    if (adv.cls() != AdversaryClass::R0 || adv.entanglement_budget() != 0)
        throw Error(Errc::NotClassicalTape, adv.name() + " may hold entanglement");
    if (adv.k() > kMaxCompiledK)
        throw Error(Errc::KTooLarge, "compiling needs 2^k copies of U2; k = " + std::to_string(adv.k()) + " > 8");
    return AdversaryPair("forward_compiled_" + adv.name(), AdversaryClass::RF, adv.k(), 0,
                         std::make_shared<CompiledStrategy>(adv.strategy(), adv.k()));
}

AdversaryPair teleport_attack(unsigned n, unsigned k) { return teleport_attack(n, k, k * (n + 1)); }

AdversaryPair teleport_attack(unsigned n, unsigned k, unsigned budget) {
    if (n < puzzle::kMinN || n > puzzle::kMaxN) throw Error(Errc::InvalidN, "n = " + std::to_string(n));
    // One instance plus one EPR pair must fit in a factor while it is teleported.
    if (n + 3 > qsim::kMaxQubits) throw Error(Errc::CapacityExceeded, "instance too large to teleport");
    const unsigned need = k * (n + 1);
    if (budget < need)
        throw Error(Errc::BudgetExceeded,
                    "teleport needs " + std::to_string(need) + " EPR pairs, budget " + std::to_string(budget));
    return AdversaryPair("teleport", AdversaryClass::RL, k, budget, std::make_shared<TeleportStrategy>(n, k));
}

AdversaryPair classical_forward_attack(std::shared_ptr<const protocol::ClassicalProver> prover, unsigned k,
                                       bool mismatched_tapes) {
    if (!prover) throw Error(Errc::ConfigInvalid, "classical prover is null");
    std::string name = mismatched_tapes ? "classical_forward_mismatched" : "classical_forward";
    return AdversaryPair(std::move(name), AdversaryClass::R0, k, 0,
                         std::make_shared<ClassicalForwardStrategy>(std::move(prover), k, mismatched_tapes));
}

std::vector<std::string> attack_names() { return {"guess", "forward_compiled_guess", "teleport", "classical_forward"}; }

AdversaryPair make_attack(const std::string& name, unsigned n, unsigned k) {
    if (name == "guess") return guessing_attack(n, k);
    if (name == "forward_compiled_guess") return forwarding_compiler(guessing_attack(n, k));
    if (name == "teleport") return teleport_attack(n, k);
    if (name == "classical_forward") return classical_forward_attack(protocol::memorize_and_guess(), k);
    throw Error(Errc::UnknownAttack, "unknown attack '" + name + "'");
}

AttackRun run_attack(const protocol::PRPVConfig& config, const AdversaryPair& adv, SplitMix64& rng) {
    auto stats = std::make_shared<TrialStats>();
    AttackRun out;
    out.result = protocol::run_prpv(config, adv.factory(stats), rng);
    out.stats = *stats;
    return out;
}

}  // namespace posverif::adversary
