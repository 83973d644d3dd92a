#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "posverif/puzzle/puzzle.hpp"
#include "posverif/qsim/shared_state.hpp"
#include "posverif/stats.hpp"

namespace posverif::nonlocal {

using puzzle::Answer;
using puzzle::PublicHandle;
using puzzle::Trapdoor;

inline const std::string kPartyB = "B";
inline const std::string kPartyC = "C";

/// What the committing stage gets to see: the public handle and the ability to
/// run Obligate on it. The trapdoor stays inside.
class KeyAccess {
public:
    explicit KeyAccess(const Trapdoor& trapdoor) : trapdoor_(&trapdoor) {}
    const PublicHandle& handle() const noexcept { return trapdoor_->handle(); }
    puzzle::Obligated obligate(SplitMix64& rng) const { return puzzle::obligate(handle(), *trapdoor_, rng); }

private:
    const Trapdoor* trapdoor_;
};

/// Classical data written by stage A and readable by both B and C.
using Tape = std::vector<BitString>;

struct Commitment {
    BitString y;
    qsim::SharedState state;  // registers owned by kPartyB / kPartyC
    Tape tape;
};

/// W = (A, B, C). B and C only ever see a RegisterView for their own party.
class NonlocalStrategy {
public:
    virtual ~NonlocalStrategy() = default;
    virtual std::string name() const = 0;
    virtual Commitment stage_a(const KeyAccess& key, SplitMix64& rng) const = 0;
    virtual Answer stage_b(qsim::RegisterView& view, const Tape& tape, bool b, SplitMix64& rng) const = 0;
    virtual Answer stage_c(qsim::RegisterView& view, const Tape& tape, bool b, SplitMix64& rng) const = 0;
};

struct GameResult {
    bool win = false;
    bool b_ok = false;
    bool c_ok = false;
    bool challenge = false;
    BitString y;
};

/// Verification that treats a wrongly tagged answer as a failure.
bool accepts(const Trapdoor& td, const BitString& y, bool b, const Answer& ans);

/// One round against a fixed key.
GameResult play_nonlocal(const Trapdoor& td, const NonlocalStrategy& strategy, SplitMix64& rng);
/// One round with a fresh n-bit key.
GameResult play_nonlocal(unsigned n, const NonlocalStrategy& strategy, SplitMix64& rng);

/// Throws InvalidTrials when trials == 0.
Estimate estimate_win_rate(unsigned n, const NonlocalStrategy& strategy, std::size_t trials, std::uint64_t seed);

struct TwoOfTwoOutput {
    BitString y;
    Answer ans0;
    Answer ans1;
};
using TwoOfTwoSolver = std::function<TwoOfTwoOutput(const KeyAccess&, SplitMix64&)>;

/// Runs stage A once, then B on challenge 0 and C on challenge 1.
TwoOfTwoSolver reduce_to_2of2(std::shared_ptr<const NonlocalStrategy> strategy);

bool play_2of2(const Trapdoor& td, const TwoOfTwoSolver& solver, SplitMix64& rng);
bool play_2of2(unsigned n, const TwoOfTwoSolver& solver, SplitMix64& rng);
Estimate estimate_2of2_rate(unsigned n, const TwoOfTwoSolver& solver, std::size_t trials, std::uint64_t seed);

/// p' >= 2 tau - 1 - 5 sigma, sigma combining both binomial errors.
bool reduction_inequality_holds(const Estimate& tau, const Estimate& p2);

// Built-in strategies.
std::shared_ptr<const NonlocalStrategy> honest_to_b();
std::shared_ptr<const NonlocalStrategy> measure_and_guess();
std::shared_ptr<const NonlocalStrategy> brute_force();
std::shared_ptr<const NonlocalStrategy> always_fail();

/// honest_to_B, measure_and_guess, brute_force, always_fail.
std::vector<std::string> strategy_names();
/// Throws UnknownStrategy.
std::shared_ptr<const NonlocalStrategy> make_strategy(const std::string& name);

}  // namespace posverif::nonlocal
