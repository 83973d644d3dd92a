#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "posverif/puzzle/repeated.hpp"
#include "posverif/spacetime/simulation.hpp"
#include "posverif/stats.hpp"

namespace posverif::protocol {

using spacetime::Coordinate;
using spacetime::Rational;

inline constexpr unsigned kMinLambda = 8;
inline constexpr unsigned kMaxLambda = 64;

struct PRPVConfig {
    unsigned n = 8;
    unsigned k = 1;
    Rational prover_position{3, 2};
    unsigned lambda = 16;
    std::uint64_t seed = 0;

    /// Throws ConfigInvalid on any out-of-range field.
    void validate() const;
};

/// p in [1, 2), decided exactly.
bool valid_prover_position(const Coordinate& p);

enum class Reason { None, TimingY0, TimingY1, TimingAns0, TimingAns1, Mismatch, VerFail };
const char* reason_name(Reason r) noexcept;

struct Verdict {
    bool accept = false;
    Reason reason = Reason::VerFail;

    static Verdict accepted() { return {true, Reason::None}; }
    static Verdict rejected(Reason r) { return {false, r}; }
    friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// H : {0,1}^lambda -> {0,1}^k, sampled lazily. A value is fixed the first
/// time its input is queried and drawn from a stream keyed by (seed, input),
/// so answers do not depend on query order.
class RandomOracle {
public:
    RandomOracle(std::uint64_t seed, unsigned lambda, unsigned k);
    BitString query(const BitString& x) const;
    unsigned lambda() const noexcept { return lambda_; }
    unsigned k() const noexcept { return k_; }
    std::size_t queries() const noexcept { return table_.size(); }

private:
    std::uint64_t seed_;
    unsigned lambda_;
    unsigned k_;
    mutable std::map<BitString, BitString> table_;
};

// Verifier messages. V0 sends the public keys (and x0 under the random
// oracle); V1 sends the challenge b (or x1 under the random oracle).
inline const std::string kLabelPk = "pk";
inline const std::string kLabelChallenge = "b";
inline const std::string kLabelY = "y";
inline const std::string kLabelAns = "ans";

struct FirstMessage {
    Bytes public_keys;
    std::optional<BitString> x0;
};
Bytes encode_first(const FirstMessage& m);
FirstMessage decode_first(const Bytes& bytes);
Bytes encode_bits(const BitString& b);
BitString decode_bits(const Bytes& bytes);

/// Everything a prover-side party may use during one trial: the puzzle shape,
/// the public Obligate capability and, for the random-oracle variant, H.
struct TrialContext {
    const PRPVConfig& config;
    const puzzle::RepeatedPuzzle& puzzle;
    const puzzle::KeyDirectory& keys;
    const RandomOracle* oracle = nullptr;
    std::uint64_t prover_seed = 0;

    /// b, or H(x0 xor x1) when an oracle is present.
    BitString challenge(const Bytes& first, const Bytes& second) const;
};

/// Obligate on the first message, Solve on the second. Used by the spacetime
/// prover and by the proof-of-quantumness transform.
class HonestLogic {
public:
    HonestLogic(const TrialContext& ctx, SplitMix64 rng) : ctx_(&ctx), rng_(rng) {}
    Bytes on_first(const Bytes& first);
    Bytes on_second(const Bytes& second);

private:
    const TrialContext* ctx_;
    SplitMix64 rng_;
    Bytes first_;
    puzzle::PublicKeys pk_;
    std::optional<puzzle::RepeatedPuzzle::Obligated> held_;
};

/// Honest prover: broadcasts y the instant pk arrives and ans the instant the
/// challenge arrives. `send` is the only way it emits, so tests can override it.
class HonestProver : public spacetime::PartyBehavior {
public:
    HonestProver(const TrialContext& ctx, SplitMix64 rng) : logic_(ctx, rng) {}
    void on_receive(spacetime::PartyContext& ctx, const spacetime::Message& msg) override;

protected:
    virtual void send(spacetime::PartyContext& ctx, spacetime::Emission e) { ctx.emit(std::move(e)); }

private:
    HonestLogic logic_;
    bool answered_y_ = false;
    bool answered_ans_ = false;
};

struct ProverParty {
    std::string name;
    Coordinate position;
    std::shared_ptr<spacetime::PartyBehavior> behavior;
};
using ProverSide = std::vector<ProverParty>;
/// Builds the prover side of one trial.
using ProverFactory = std::function<ProverSide(const TrialContext&)>;

/// Honest prover at config.prover_position (validated).
ProverFactory honest_prover(const PRPVConfig& config);
/// Honest prover logic at an arbitrary position, for timing experiments.
ProverFactory honest_prover_at(Coordinate position);

struct RunResult {
    Verdict verdict;
    spacetime::Trace trace;
    BitString challenge;
    Bytes y0, y1, ans0, ans1;

    /// {"accept", "reason", "challenge", "trace": [...]}.
    std::string to_json() const;
};

inline constexpr spacetime::PartyId kV0 = 0;
inline constexpr spacetime::PartyId kV1 = 1;

/// Decides the verdict from a finished trace.
Verdict judge(const spacetime::Trace& trace, const puzzle::RepeatedPuzzle& puzzle, const puzzle::SecretKeys& sk,
              const BitString& challenge);

/// One PRPV^k trial (k = config.k) with the given prover side.
RunResult run_prpv(const PRPVConfig& config, const ProverFactory& prover, SplitMix64& rng);
/// Same protocol; requires k >= 1 and is the k-fold parallel composition.
RunResult run_prpv_parallel(const PRPVConfig& config, const ProverFactory& prover, SplitMix64& rng);
/// ROPRPV: V0 adds x0 to its message, V1 sends x1, the challenge is H(x0 xor x1).
/// A fresh oracle is drawn from `rng` unless one is supplied.
RunResult run_roprpv(const PRPVConfig& config, const ProverFactory& prover, SplitMix64& rng,
                     const RandomOracle* oracle = nullptr);

enum class Variant { Plain, RandomOracle };
/// Acceptance over `trials` trials seeded from config.seed.
Estimate estimate_acceptance(const PRPVConfig& config, const ProverFactory& prover, std::size_t trials,
                             Variant variant = Variant::Plain);

}  // namespace posverif::protocol
