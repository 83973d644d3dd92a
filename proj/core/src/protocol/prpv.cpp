#include "posverif/protocol/prpv.hpp"

#include <nlohmann/json.hpp>

#include "posverif/error.hpp"

namespace posverif::protocol {

using spacetime::Deadline;
using spacetime::Emission;
using spacetime::PartyContext;
using spacetime::Trace;

bool valid_prover_position(const Coordinate& p) { return Coordinate(1) <= p && p < Coordinate(2); }

void PRPVConfig::validate() const {
    if (n < puzzle::kMinN || n > puzzle::kMaxN)
        throw Error(Errc::ConfigInvalid, "n must be in [" + std::to_string(puzzle::kMinN) + ", " +
                                             std::to_string(puzzle::kMaxN) + "], got " + std::to_string(n));
    if (k < 1 || k > 64) throw Error(Errc::ConfigInvalid, "k must be in [1, 64], got " + std::to_string(k));
    if (lambda < kMinLambda || lambda > kMaxLambda)
        throw Error(Errc::ConfigInvalid, "lambda must be in [8, 64], got " + std::to_string(lambda));
    if (!valid_prover_position(prover_position))
        throw Error(Errc::ConfigInvalid, "prover position " + prover_position.str() + " outside [1, 2)");
}

const char* reason_name(Reason r) noexcept {
    switch (r) {
        case Reason::None: return "None";
        case Reason::TimingY0: return "TimingY0";
        case Reason::TimingY1: return "TimingY1";
        case Reason::TimingAns0: return "TimingAns0";
        case Reason::TimingAns1: return "TimingAns1";
        case Reason::Mismatch: return "Mismatch";
        case Reason::VerFail: return "VerFail";
    }
    return "?";
}

RandomOracle::RandomOracle(std::uint64_t seed, unsigned lambda, unsigned k) : seed_(seed), lambda_(lambda), k_(k) {
    if (lambda < kMinLambda || lambda > kMaxLambda) throw Error(Errc::ConfigInvalid, "oracle input width out of range");
    if (k < 1 || k > 64) throw Error(Errc::ConfigInvalid, "oracle output width out of range");
}

BitString RandomOracle::query(const BitString& x) const {
    if (x.width() != lambda_)
        throw Error(Errc::LengthMismatch, "oracle input has " + std::to_string(x.width()) + " bits, expected " +
                                              std::to_string(lambda_));
    auto it = table_.find(x);
    if (it == table_.end()) {
        SplitMix64 stream(SplitMix64::mix(seed_ ^ SplitMix64::mix(x.value() + SplitMix64::kGamma)));
        it = table_.emplace(x, BitString(k_, stream.bits(k_))).first;
    }
    return it->second;
}

Bytes encode_first(const FirstMessage& m) {
    ByteWriter w;
    w.bytes(m.public_keys);
    w.u8(m.x0 ? 1 : 0);
    if (m.x0) w.bits(*m.x0);
    return std::move(w).take();
}

FirstMessage decode_first(const Bytes& bytes) {
    ByteReader r(bytes);
    FirstMessage m;
    m.public_keys = r.bytes();
    const auto flag = r.u8();
    if (flag > 1) throw Error(Errc::DecodeError, "bad oracle flag");
    if (flag) m.x0 = r.bits();
    r.expect_done();
    return m;
}

Bytes encode_bits(const BitString& b) {
    ByteWriter w;
    w.bits(b);
    return std::move(w).take();
}

BitString decode_bits(const Bytes& bytes) {
    ByteReader r(bytes);
    auto b = r.bits();
    r.expect_done();
    return b;
}

BitString TrialContext::challenge(const Bytes& first, const Bytes& second) const {
    if (!oracle) return decode_bits(second);
    const auto m = decode_first(first);
    if (!m.x0) throw Error(Errc::DecodeError, "first message carries no x0");
    return oracle->query(*m.x0 ^ decode_bits(second));
}

Bytes HonestLogic::on_first(const Bytes& first) {
    first_ = first;
    pk_ = ctx_->keys.resolve(decode_first(first).public_keys);
    held_ = ctx_->keys.obligate(ctx_->puzzle, pk_, rng_);
    return puzzle::encode_obligation(held_->y);
}

Bytes HonestLogic::on_second(const Bytes& second) {
    if (!held_) throw Error(Errc::ConfigInvalid, "challenge arrived before the public key");
    const BitString b = ctx_->challenge(first_, second);
    auto ans = ctx_->puzzle.solve(pk_, held_->y, std::move(held_->states), b, rng_);
    held_.reset();
    return puzzle::encode_answers(ans);
}

void HonestProver::on_receive(PartyContext& ctx, const spacetime::Message& msg) {
    if (msg.label == kLabelPk && !answered_y_) {
        answered_y_ = true;
        send(ctx, Emission{kLabelY, logic_.on_first(msg.payload)});
    } else if (msg.label == kLabelChallenge && answered_y_ && !answered_ans_) {
        answered_ans_ = true;
        send(ctx, Emission{kLabelAns, logic_.on_second(msg.payload)});
    }
}

ProverFactory honest_prover_at(Coordinate position) {
    return [position](const TrialContext& ctx) {
        return ProverSide{{"P", position, std::make_shared<HonestProver>(ctx, SplitMix64(ctx.prover_seed))}};
    };
}

ProverFactory honest_prover(const PRPVConfig& config) {
    if (!valid_prover_position(config.prover_position))
        throw Error(Errc::ConfigInvalid, "prover position " + config.prover_position.str() + " outside [1, 2)");
    return honest_prover_at(config.prover_position);
}

std::string RunResult::to_json() const {
    nlohmann::ordered_json j;
    j["accept"] = verdict.accept;
    j["reason"] = reason_name(verdict.reason);
    j["challenge"] = challenge.str();
    auto events = nlohmann::ordered_json::array();
    for (const auto& e : trace.events) {
        nlohmann::ordered_json ev;
        ev["time"] = e.time.str();
        ev["kind"] = spacetime::event_kind_name(e.kind);
        ev["party"] = e.party_name;
        ev["label"] = e.label;
        ev["digest"] = e.digest;
        events.push_back(std::move(ev));
    }
    j["trace"] = std::move(events);
    return j.dump();
}

namespace {

struct Recorder final : spacetime::PartyBehavior {
    void on_receive(PartyContext&, const spacetime::Message&) override {}
};

/// First payload in a slot, and whether every later arrival agrees with it.
struct Slot {
    const spacetime::TraceEvent* first = nullptr;
    bool consistent = true;
};

Slot slot(const Trace& trace, spacetime::PartyId party, const std::string& label) {
    Slot s;
    for (const auto* e : trace.deliveries(party, label)) {
        if (!s.first) s.first = e;
        else if (e->payload != s.first->payload) s.consistent = false;
    }
    return s;
}

}  // namespace

Verdict judge(const Trace& trace, const puzzle::RepeatedPuzzle& puzzle, const puzzle::SecretKeys& sk,
              const BitString& challenge) {
    const Slot y0 = slot(trace, kV0, kLabelY);
    const Slot y1 = slot(trace, kV1, kLabelY);
    const Slot a0 = slot(trace, kV0, kLabelAns);
    const Slot a1 = slot(trace, kV1, kLabelAns);

    if (!y0.first || !Deadline::before(4).admits(y0.first->time)) return Verdict::rejected(Reason::TimingY0);
    if (!y1.first || !Deadline::exactly(3).admits(y1.first->time)) return Verdict::rejected(Reason::TimingY1);
    if (!a0.first || !Deadline::exactly(4).admits(a0.first->time)) return Verdict::rejected(Reason::TimingAns0);
    if (!a1.first || !Deadline::at_most(5).admits(a1.first->time)) return Verdict::rejected(Reason::TimingAns1);

    if (!(y0.consistent && y1.consistent && a0.consistent && a1.consistent)) return Verdict::rejected(Reason::Mismatch);
    if (y0.first->payload != y1.first->payload || a0.first->payload != a1.first->payload)
        return Verdict::rejected(Reason::Mismatch);

    try {
        const auto y = puzzle::decode_obligation(y0.first->payload);
        const auto ans = puzzle::decode_answers(a0.first->payload);
        if (!puzzle.verify(sk, y, challenge, ans)) return Verdict::rejected(Reason::VerFail);
    } catch (const Error&) {
        // Undecodable or wrongly shaped messages fail verification.
        return Verdict::rejected(Reason::VerFail);
    }
    return Verdict::accepted();
}

namespace {

enum Stream : std::uint64_t { kKeys = 1, kChallenge = 2, kProver = 3, kOracle = 4 };

RunResult run_trial(const PRPVConfig& config, const ProverFactory& prover, SplitMix64& rng, bool with_oracle,
                    const RandomOracle* supplied) {
    config.validate();
    const auto puzzle = puzzle::parallel_puzzle(config.n, config.k);

    SplitMix64 key_rng = rng.fork(kKeys);
    SplitMix64 challenge_rng = rng.fork(kChallenge);
    const std::uint64_t prover_seed = rng.fork(kProver).next();

    const auto [pk, sk] = puzzle.keygen(key_rng);
    puzzle::KeyDirectory keys;
    keys.publish(pk, sk);

    std::optional<RandomOracle> own_oracle;
    const RandomOracle* oracle = nullptr;
    FirstMessage first{puzzle::encode_public_keys(pk), std::nullopt};
    BitString second_bits;
    BitString challenge;
    if (with_oracle) {
        if (supplied) {
            if (supplied->k() != config.k || supplied->lambda() != config.lambda)
                throw Error(Errc::ConfigInvalid, "oracle shape does not match the configuration");
            oracle = supplied;
        } else {
            own_oracle.emplace(rng.fork(kOracle).next(), config.lambda, config.k);
            oracle = &*own_oracle;
        }
        const BitString x0(config.lambda, challenge_rng.bits(config.lambda));
        const BitString x1(config.lambda, challenge_rng.bits(config.lambda));
        first.x0 = x0;
        second_bits = x1;
        challenge = oracle->query(x0 ^ x1);
    } else {
        challenge = puzzle.sample_challenge(challenge_rng);
        second_bits = challenge;
    }

    const TrialContext ctx{config, puzzle, keys, oracle, prover_seed};

    spacetime::Simulation sim;
    sim.add_party("V0", 0, std::make_shared<Recorder>());
    sim.add_party("V1", 3, std::make_shared<Recorder>());
    for (auto& p : prover(ctx)) sim.add_party(p.name, p.position, std::move(p.behavior));
    sim.schedule_emission(kV0, 0, Emission{kLabelPk, encode_first(first)});
    sim.schedule_emission(kV1, 1, Emission{kLabelChallenge, encode_bits(second_bits)});

    RunResult out;
    out.trace = sim.run(5);
    out.challenge = challenge;
    out.verdict = judge(out.trace, puzzle, sk, challenge);
    auto first_payload = [&](spacetime::PartyId v, const std::string& label) {
        const auto hits = out.trace.deliveries(v, label);
        return hits.empty() ? Bytes{} : hits.front()->payload;
    };
    out.y0 = first_payload(kV0, kLabelY);
    out.y1 = first_payload(kV1, kLabelY);
    out.ans0 = first_payload(kV0, kLabelAns);
    out.ans1 = first_payload(kV1, kLabelAns);
    return out;
}

}  // namespace

RunResult run_prpv(const PRPVConfig& config, const ProverFactory& prover, SplitMix64& rng) {
    return run_trial(config, prover, rng, false, nullptr);
}

RunResult run_prpv_parallel(const PRPVConfig& config, const ProverFactory& prover, SplitMix64& rng) {
    return run_trial(config, prover, rng, false, nullptr);
}

RunResult run_roprpv(const PRPVConfig& config, const ProverFactory& prover, SplitMix64& rng,
                     const RandomOracle* oracle) {
    return run_trial(config, prover, rng, true, oracle);
}

Estimate estimate_acceptance(const PRPVConfig& config, const ProverFactory& prover, std::size_t trials,
                             Variant variant) {
    config.validate();
    return estimate(trials, config.seed, [&](std::uint64_t s, std::size_t) {
        SplitMix64 rng(s);
        const auto r = variant == Variant::Plain ? run_prpv(config, prover, rng) : run_roprpv(config, prover, rng);
        return r.verdict.accept;
    });
}

}  // namespace posverif::protocol
