#include "posverif/protocol/classical.hpp"

#include "posverif/error.hpp"

namespace posverif::protocol {

namespace {

class MemorizeAndGuess final : public ClassicalProver {
public:
    std::string name() const override { return "memorize_and_guess"; }

    Bytes respond(const TrialContext& ctx, const std::vector<Bytes>& received, std::uint64_t tape) const override {
        if (received.empty() || received.size() > 2) throw Error(Errc::ConfigInvalid, "unexpected transcript length");
        const auto pk = ctx.keys.resolve(decode_first(received[0]).public_keys);
        const unsigned n = ctx.puzzle.n();
        const unsigned k = ctx.puzzle.k();

        SplitMix64 t(tape);
        std::vector<BitString> x0;
        puzzle::Obligation y;
        for (unsigned i = 0; i < k; ++i) {
            x0.emplace_back(n, t.bits(n));
            y.push_back(pk.handles[i].eval(false, x0.back()));
        }
        if (received.size() == 1) return puzzle::encode_obligation(y);

        const BitString b = ctx.challenge(received[0], received[1]);
        puzzle::Answers ans;
        for (unsigned i = 0; i < k; ++i) {
            const bool c = t.coin();
            const BitString d(n, 1 + t.below(width_mask(n)));
            if (ctx.puzzle.instance_bit(b, i)) ans.emplace_back(puzzle::Equation{c, d});
            else ans.emplace_back(puzzle::Preimage{false, x0[i]});
        }
        return puzzle::encode_answers(ans);
    }
};

}  // namespace

std::shared_ptr<const ClassicalProver> memorize_and_guess() { return std::make_shared<MemorizeAndGuess>(); }

void ClassicalProverBehavior::on_receive(spacetime::PartyContext& ctx, const spacetime::Message& msg) {
    const bool first = msg.label == kLabelPk && received_.empty();
    const bool second = msg.label == kLabelChallenge && received_.size() == 1;
    if (!first && !second) return;
    received_.push_back(msg.payload);
    ctx.emit({first ? kLabelY : kLabelAns, prover_->respond(*ctx_, received_, tape_)});
}

ProverFactory classical_prover_at(std::shared_ptr<const ClassicalProver> prover, Coordinate position) {
    return [prover = std::move(prover), position](const TrialContext& ctx) {
        return ProverSide{{"P", position, std::make_shared<ClassicalProverBehavior>(ctx, prover, ctx.prover_seed)}};
    };
}

}  // namespace posverif::protocol
