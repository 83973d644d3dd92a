#pragma once

#include <memory>
#include <string>
#include <vector>

#include "posverif/protocol/classical.hpp"
#include "posverif/protocol/prpv.hpp"
#include "posverif/qsim/shared_state.hpp"

namespace posverif::adversary {

using protocol::TrialContext;

inline const std::string kA0 = "A0";
inline const std::string kA1 = "A1";

enum class AdversaryClass { R0, RF, RL, RP };
const char* class_name(AdversaryClass c) noexcept;

/// Output of U0: the bipartite state (registers owned by kA0 / kA1) and the
/// classical tape both adversaries start with.
struct Setup {
    qsim::SharedState state;
    Bytes tape;
    /// Qubits of A1's registers entangled with A0's at setup.
    unsigned entangled_qubits = 0;
};

struct U1Out {
    Bytes r_prime;  // A0's memory
    Bytes y0;       // to V0
    Bytes m;        // to A1, arrives at t = 3
};

struct U2Out {
    Bytes s_prime;  // A1's memory
    Bytes m_prime;  // to A0, arrives at t = 4
};

struct U3Out {
    Bytes y1;
    Bytes ans1;
};

/// What a handler may touch: its own side of the state, the tape and its
/// own random stream.
class HandlerEnv {
public:
    HandlerEnv(const TrialContext& trial, qsim::RegisterView view, const Bytes& tape, SplitMix64 rng,
               unsigned* consumed)
        : trial(trial), view(std::move(view)), tape(tape), rng(rng), consumed_(consumed) {}

    const TrialContext& trial;
    qsim::RegisterView view;
    const Bytes& tape;
    SplitMix64 rng;

    /// Teleports one register through local EPR halves and books the pairs used.
    std::pair<BitString, BitString> teleport(const std::string& source, const std::string& epr_local);

private:
    unsigned* consumed_;
};

/// Random stream of handler h (0 for U0 through 4 for U4) in one trial.
SplitMix64 handler_stream(const TrialContext& trial, unsigned h);

/// The handlers U0..U4 of a two-adversary strategy.
class AdversaryStrategy {
public:
    virtual ~AdversaryStrategy() = default;
    virtual Setup u0(const TrialContext& trial, SplitMix64& rng) const = 0;
    /// A0 at t = 0 on the first verifier message.
    virtual U1Out u1(HandlerEnv& env, const Bytes& first) const = 0;
    /// A1 at t = 1 on the challenge message.
    virtual U2Out u2(HandlerEnv& env, const Bytes& challenge) const = 0;
    /// A1 at t = 3.
    virtual U3Out u3(HandlerEnv& env, const Bytes& s_prime, const Bytes& m) const = 0;
    /// A0 at t = 4.
    virtual Bytes u4(HandlerEnv& env, const Bytes& r_prime, const Bytes& m_prime) const = 0;
};

/// Per-trial accounting filled in by the adversary behaviors.
struct TrialStats {
    unsigned setup_entanglement = 0;
    unsigned consumed = 0;
};

class AdversaryPair {
public:
    AdversaryPair(std::string name, AdversaryClass cls, unsigned k, unsigned budget,
                  std::shared_ptr<const AdversaryStrategy> strategy);

    const std::string& name() const noexcept { return name_; }
    AdversaryClass cls() const noexcept { return cls_; }
    unsigned k() const noexcept { return k_; }
    /// Qubits of pre-shared entanglement the pair may hold.
    unsigned entanglement_budget() const noexcept { return budget_; }
    const std::shared_ptr<const AdversaryStrategy>& strategy() const noexcept { return strategy_; }

    /// A0 at 0 and A1 at 3, added in that order (party ids 2 and 3). Setup
    /// entanglement or consumption above the budget raises BudgetExceeded.
    protocol::ProverFactory factory(std::shared_ptr<TrialStats> stats = nullptr) const;

private:
    std::string name_;
    AdversaryClass cls_;
    unsigned k_;
    unsigned budget_;
    std::shared_ptr<const AdversaryStrategy> strategy_;
};

/// A0 guesses the challenge, runs the honest prover for that guess and both
/// adversaries release the precomputed answer.
AdversaryPair guessing_attack(unsigned n, unsigned k);

/// Rewrites an R0 pair into one whose U2 only forwards b: A0 runs every copy
/// of U2 in advance on the classical tape. Throws NotClassicalTape when the
/// pair may hold entanglement and KTooLarge for k > 8.
AdversaryPair forwarding_compiler(const AdversaryPair& adv);

/// Teleports the obligated states to A1, who measures in the challenge basis;
/// both sides correct with the teleportation outcomes. Uses k(n+1) EPR pairs.
/// Throws CapacityExceeded if one instance does not fit the simulator and
/// BudgetExceeded if `budget` is below k(n+1).
AdversaryPair teleport_attack(unsigned n, unsigned k);
AdversaryPair teleport_attack(unsigned n, unsigned k, unsigned budget);

/// Both adversaries run the classical prover on the shared tape.
/// With `mismatched_tapes` A1 uses a different tape.
AdversaryPair classical_forward_attack(std::shared_ptr<const protocol::ClassicalProver> prover, unsigned k,
                                       bool mismatched_tapes = false);

/// guess, forward_compiled_guess, teleport, classical_forward.
std::vector<std::string> attack_names();
/// Throws UnknownAttack.
AdversaryPair make_attack(const std::string& name, unsigned n, unsigned k);

struct AttackRun {
    protocol::RunResult result;
    TrialStats stats;
};
AttackRun run_attack(const protocol::PRPVConfig& config, const AdversaryPair& adv, SplitMix64& rng);

// Length-prefixed packing of composite messages.
Bytes pack(const std::vector<Bytes>& parts);
std::vector<Bytes> unpack(const Bytes& bytes);

}  // namespace posverif::adversary
