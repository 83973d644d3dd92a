#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "posverif/protocol/classical.hpp"
#include "posverif/protocol/prpv.hpp"

namespace posverif::protocol {

/// A prover for the timing-free protocol: two rounds of message in, reply out.
class InteractiveProver {
public:
    virtual ~InteractiveProver() = default;
    virtual Bytes first(const Bytes& pk_message) = 0;
    virtual Bytes second(const Bytes& challenge_message) = 0;
};

using InteractiveFactory = std::function<std::unique_ptr<InteractiveProver>(const TrialContext&)>;

/// The honest quantum prover.
InteractiveFactory quantum_interactive();
/// A classical prover driven by its tape (ctx.prover_seed).
InteractiveFactory classical_interactive(std::shared_ptr<const ClassicalProver> prover);

struct PoqResult {
    Verdict verdict;
    /// (label, payload) in the order sent: pk, y, b, ans.
    std::vector<std::pair<std::string, Bytes>> transcript;
};

/// Both verifiers run as one party and talk to a single prover in the order
/// the deadlines impose. Acceptance is the same Ver check, with the single
/// response standing in for both sides.
class PoqProtocol {
public:
    explicit PoqProtocol(PRPVConfig config);
    const PRPVConfig& config() const noexcept { return config_; }
    PoqResult run(const InteractiveFactory& prover, SplitMix64& rng) const;
    Estimate estimate(const InteractiveFactory& prover, std::size_t trials) const;

private:
    PRPVConfig config_;
};

PoqProtocol poq_transform(const PRPVConfig& config);

}  // namespace posverif::protocol
