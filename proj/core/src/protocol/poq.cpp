#include "posverif/protocol/poq.hpp"

#include "posverif/error.hpp"

namespace posverif::protocol {

namespace {

class QuantumInteractive final : public InteractiveProver {
public:
    QuantumInteractive(const TrialContext& ctx) : logic_(ctx, SplitMix64(ctx.prover_seed)) {}
    Bytes first(const Bytes& m) override { return logic_.on_first(m); }
    Bytes second(const Bytes& m) override { return logic_.on_second(m); }

private:
    HonestLogic logic_;
};

class ClassicalInteractive final : public InteractiveProver {
public:
    ClassicalInteractive(const TrialContext& ctx, std::shared_ptr<const ClassicalProver> prover)
        : ctx_(&ctx), prover_(std::move(prover)) {}
    Bytes first(const Bytes& m) override {
        received_ = {m};
        return prover_->respond(*ctx_, received_, ctx_->prover_seed);
    }
    Bytes second(const Bytes& m) override {
        received_.push_back(m);
        return prover_->respond(*ctx_, received_, ctx_->prover_seed);
    }

private:
    const TrialContext* ctx_;
    std::shared_ptr<const ClassicalProver> prover_;
    std::vector<Bytes> received_;
};

enum Stream : std::uint64_t { kKeys = 1, kChallenge = 2, kProver = 3 };

}  // namespace

InteractiveFactory quantum_interactive() {
    return [](const TrialContext& ctx) { return std::make_unique<QuantumInteractive>(ctx); };
}

InteractiveFactory classical_interactive(std::shared_ptr<const ClassicalProver> prover) {
    return [prover = std::move(prover)](const TrialContext& ctx) {
        return std::make_unique<ClassicalInteractive>(ctx, prover);
    };
}

PoqProtocol::PoqProtocol(PRPVConfig config) : config_(std::move(config)) { config_.validate(); }

PoqResult PoqProtocol::run(const InteractiveFactory& make, SplitMix64& rng) const {
    const auto puzzle = puzzle::parallel_puzzle(config_.n, config_.k);
    SplitMix64 key_rng = rng.fork(kKeys);
    SplitMix64 challenge_rng = rng.fork(kChallenge);
    const std::uint64_t prover_seed = rng.fork(kProver).next();

    const auto [pk, sk] = puzzle.keygen(key_rng);
    puzzle::KeyDirectory keys;
    keys.publish(pk, sk);
    const TrialContext ctx{config_, puzzle, keys, nullptr, prover_seed};
    auto prover = make(ctx);

    PoqResult out;
    const Bytes m1 = encode_first({puzzle::encode_public_keys(pk), std::nullopt});
    out.transcript.emplace_back(kLabelPk, m1);
    const Bytes y = prover->first(m1);
    out.transcript.emplace_back(kLabelY, y);
    // The challenge is drawn only after y is on record.
    const BitString b = puzzle.sample_challenge(challenge_rng);
    const Bytes m2 = encode_bits(b);
    out.transcript.emplace_back(kLabelChallenge, m2);
    const Bytes ans = prover->second(m2);
    out.transcript.emplace_back(kLabelAns, ans);

    out.verdict = Verdict::accepted();
    try {
        if (!puzzle.verify(sk, puzzle::decode_obligation(y), b, puzzle::decode_answers(ans)))
            out.verdict = Verdict::rejected(Reason::VerFail);
    } catch (const Error&) {
        out.verdict = Verdict::rejected(Reason::VerFail);
    }
    return out;
}

Estimate PoqProtocol::estimate(const InteractiveFactory& prover, std::size_t trials) const {
    return posverif::estimate(trials, config_.seed, [&](std::uint64_t s, std::size_t) {
        SplitMix64 rng(s);
        return run(prover, rng).verdict.accept;
    });
}

PoqProtocol poq_transform(const PRPVConfig& config) { return PoqProtocol(config); }

}  // namespace posverif::protocol
