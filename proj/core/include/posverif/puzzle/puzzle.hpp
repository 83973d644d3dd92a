#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "posverif/bits.hpp"
#include "posverif/bytes.hpp"
#include "posverif/qsim/state_vector.hpp"
#include "posverif/rng.hpp"

namespace posverif::puzzle {

inline constexpr unsigned kMinN = 2;
inline constexpr unsigned kMaxN = 12;

/// P_seed: 4-round alternating-half mixing bijection on n-bit strings.
/// Round r xors a keyed hash of one half into the other (left on even
/// rounds, right on odd rounds), so each round and hence P is invertible.
class MixingPermutation {
public:
    MixingPermutation(unsigned n, std::uint64_t seed);

    BitString apply(const BitString& x) const;
    BitString invert(const BitString& y) const;

    unsigned n() const noexcept { return n_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t round_function(unsigned round, std::uint64_t half) const noexcept;

    unsigned n_;
    std::uint64_t seed_;
    unsigned left_width_;
    unsigned right_width_;
};

struct PuzzleKey {
    unsigned n;
    std::uint64_t seed;
    BitString shift;  // s != 0; claws are (x, x ^ s)
};

/// Public side of a key: evaluation and CHK only. The shift never leaves the
/// handle; equality of serialized handles identifies the key.
class PublicHandle {
public:
    unsigned n() const noexcept { return key_->n; }

    /// f_b(x) = P_seed(x ^ b*s).
    BitString eval(bool b, const BitString& x) const;
    bool chk(bool b, const BitString& x, const BitString& y) const;

    /// 8-byte little-endian seed followed by 4-byte little-endian n.
    Bytes serialize() const;

    friend bool operator==(const PublicHandle& a, const PublicHandle& b) {
        return a.key_->n == b.key_->n && a.key_->seed == b.key_->seed;
    }

private:
    friend class Trapdoor;
    explicit PublicHandle(std::shared_ptr<const PuzzleKey> key);

    std::shared_ptr<const PuzzleKey> key_;
    MixingPermutation perm_;
};

class Trapdoor {
public:
    explicit Trapdoor(PuzzleKey key);

    const PuzzleKey& key() const noexcept { return *key_; }
    const PublicHandle& handle() const noexcept { return handle_; }

    /// Unique x with f_b(x) = y.
    BitString inv(bool b, const BitString& y) const;

    /// Seed (u64 LE), n (u32 LE), shift (u64 LE).
    Bytes serialize() const;
    static Trapdoor deserialize(const Bytes& bytes);

private:
    std::shared_ptr<const PuzzleKey> key_;
    PublicHandle handle_;
};

struct Preimage {
    bool bprime;
    BitString v;
    friend bool operator==(const Preimage&, const Preimage&) = default;
};

struct Equation {
    bool c;
    BitString d;
    friend bool operator==(const Equation&, const Equation&) = default;
};

/// Preimage answers the 0 challenge, Equation answers the 1 challenge.
using Answer = std::variant<Preimage, Equation>;

inline bool answers_challenge(const Answer& a, bool b) noexcept { return std::holds_alternative<Equation>(a) == b; }

/// Reads an (n+1)-bit XZ measurement result as an answer to challenge `b`.
Answer answer_from_bits(bool b, const BitString& bits);
/// Inverse of answer_from_bits.
BitString answer_bits(const Answer& a);

std::pair<PublicHandle, Trapdoor> keygen(unsigned n, SplitMix64& rng);

BitString eval(const PublicHandle& handle, bool b, const BitString& x);
bool chk(const PublicHandle& handle, bool b, const BitString& x, const BitString& y);

struct Obligated {
    BitString y;
    qsim::StateVector state;
};

/// Samples x0, commits y = f_0(x0) and returns the claw state over
/// ("bit", 1), ("preimage", n). The trapdoor only shortcuts state
/// construction; the output distribution equals the measured circuit.
Obligated obligate(const PublicHandle& handle, const Trapdoor& env, SplitMix64& rng);

/// One branch of the explicit obligate circuit.
struct CircuitBranch {
    BitString y;
    double probability;
    qsim::StateVector state;
};

/// Explicit 2n+1 qubit circuit: H on (bit, preimage), oracle f into an image
/// register, then every possible image outcome with its exact probability.
std::vector<CircuitBranch> obligate_circuit_branches(const PublicHandle& handle);

/// Same circuit, sampling the image measurement. Uses only the public handle.
Obligated run_obligate_circuit(const PublicHandle& handle, SplitMix64& rng);

/// XZ-solver: measure everything in the standard basis (b = 0) or the
/// Hadamard basis (b = 1).
Answer solve(const PublicHandle& handle, const BitString& y, qsim::StateVector state, bool b, SplitMix64& rng);

/// Ver. Throws TagMismatch if the answer kind does not match b.
bool verify(const Trapdoor& trapdoor, const BitString& y, bool b, const Answer& ans);

/// Ver for b = 0 computed from the public handle alone.
bool verify_public_0(const PublicHandle& handle, const BitString& y, const Answer& ans);

}  // namespace posverif::puzzle
