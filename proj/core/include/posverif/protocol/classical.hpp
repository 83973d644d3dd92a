#pragma once

#include <memory>
#include <string>
#include <vector>

#include "posverif/protocol/prpv.hpp"

namespace posverif::protocol {

/// A classical prover: a pure function of the verifier messages received so
/// far (first message, then challenge message) and a random tape.
class ClassicalProver {
public:
    virtual ~ClassicalProver() = default;
    virtual std::string name() const = 0;
    /// One verifier message in -> y; two messages in -> ans.
    virtual Bytes respond(const TrialContext& ctx, const std::vector<Bytes>& received, std::uint64_t tape) const = 0;
};

/// Commits y = f_0(x0) for tape-chosen x0, answers challenge 0 with x0 and
/// guesses a random equation for challenge 1. Wins (3/4)^k.
std::shared_ptr<const ClassicalProver> memorize_and_guess();

/// Runs a classical prover as a single party; it responds the instant each
/// verifier message arrives. The tape is ctx.prover_seed.
class ClassicalProverBehavior : public spacetime::PartyBehavior {
public:
    ClassicalProverBehavior(const TrialContext& ctx, std::shared_ptr<const ClassicalProver> prover, std::uint64_t tape)
        : ctx_(&ctx), prover_(std::move(prover)), tape_(tape) {}
    void on_receive(spacetime::PartyContext& ctx, const spacetime::Message& msg) override;

private:
    const TrialContext* ctx_;
    std::shared_ptr<const ClassicalProver> prover_;
    std::uint64_t tape_;
    std::vector<Bytes> received_;
};

ProverFactory classical_prover_at(std::shared_ptr<const ClassicalProver> prover, Coordinate position);

}  // namespace posverif::protocol
