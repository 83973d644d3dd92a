#pragma once

#include <map>
#include <vector>

#include "posverif/puzzle/puzzle.hpp"

namespace posverif::puzzle {

enum class Repetition {
    /// One challenge bit reused by every instance ("strong" puzzle).
    SharedChallenge,
    /// A fresh challenge bit per instance (1-of-2^k puzzle).
    FreshChallenges,
};

using Obligation = std::vector<BitString>;
using Answers = std::vector<Answer>;

struct PublicKeys {
    std::vector<PublicHandle> handles;
};

struct SecretKeys {
    std::vector<Trapdoor> trapdoors;
};

/// k independent copies of the base puzzle with AND verification.
class RepeatedPuzzle {
public:
    RepeatedPuzzle(unsigned n, unsigned k, Repetition mode);

    unsigned n() const noexcept { return n_; }
    unsigned k() const noexcept { return k_; }
    Repetition mode() const noexcept { return mode_; }
    /// 1 for the shared mode, k for fresh challenges.
    unsigned challenge_width() const noexcept { return mode_ == Repetition::SharedChallenge ? 1 : k_; }

    std::pair<PublicKeys, SecretKeys> keygen(SplitMix64& rng) const;

    struct Obligated {
        Obligation y;
        std::vector<qsim::StateVector> states;
    };
    Obligated obligate(const PublicKeys& pk, const SecretKeys& env, SplitMix64& rng) const;

    BitString sample_challenge(SplitMix64& rng) const;
    /// Challenge bit seen by instance i.
    bool instance_bit(const BitString& challenge, unsigned i) const;

    Answers solve(const PublicKeys& pk, const Obligation& y, std::vector<qsim::StateVector> states,
                  const BitString& challenge, SplitMix64& rng) const;

    /// AND over instances. Malformed or mis-tagged answers verify as false.
    bool verify(const SecretKeys& sk, const Obligation& y, const BitString& challenge, const Answers& ans) const;

    void check_challenge(const BitString& challenge) const;

private:
    unsigned n_;
    unsigned k_;
    Repetition mode_;
};

RepeatedPuzzle strong_puzzle(unsigned n, unsigned k);
RepeatedPuzzle parallel_puzzle(unsigned n, unsigned k);

// Canonical encodings. These are what the verifiers compare byte for byte.
Bytes encode_public_keys(const PublicKeys& pk);
Bytes encode_obligation(const Obligation& y);
Obligation decode_obligation(const Bytes& bytes);
Bytes encode_answers(const Answers& ans);
Answers decode_answers(const Bytes& bytes);

/// Lookup from published key bytes to key material for one trial.
///
/// Anyone holding the published bytes may resolve the public handles and run
/// Obligate; the trapdoor itself is never handed out.
class KeyDirectory {
public:
    void publish(const PublicKeys& pk, const SecretKeys& sk);

    PublicKeys resolve(const Bytes& published) const;
    RepeatedPuzzle::Obligated obligate(const RepeatedPuzzle& puzzle, const PublicKeys& pk, SplitMix64& rng) const;

private:
    const SecretKeys& secrets(const PublicKeys& pk) const;

    std::map<Bytes, std::pair<PublicKeys, SecretKeys>> entries_;
};

}  // namespace posverif::puzzle
