#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "posverif/bits.hpp"
#include "posverif/rng.hpp"

namespace posverif::qsim {

using Amplitude = std::complex<double>;

inline constexpr unsigned kMaxQubits = 24;
inline constexpr double kTolerance = 1e-12;

struct RegisterSpec {
    std::string name;
    unsigned width;
};

struct Register {
    std::string name;
    unsigned offset;  // first qubit
    unsigned width;
};

struct MeasurementRecord {
    std::string register_name;
    BitString outcome;
    double probability;
};

/// Dense statevector over named registers.
///
/// Qubits are numbered 0..q-1 in register declaration order; qubit 0 is the
/// most significant bit of the amplitude index. A register's outcome
/// bitstring therefore reads its qubits left to right, and for the claw state
/// the index of |bit, preimage> is simply the concatenated bitstring.
class StateVector {
public:
    /// |0...0> over the declared registers.
    explicit StateVector(const std::vector<RegisterSpec>& registers);

    /// Arbitrary normalized state. Throws LengthMismatch if the amplitude count
    /// is not 2^q or the norm is off by more than kTolerance.
    StateVector(const std::vector<RegisterSpec>& registers, std::vector<Amplitude> amplitudes);

    unsigned qubits() const noexcept { return qubits_; }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    Amplitude amplitude(std::uint64_t index) const { return amps_.at(index); }
    const std::vector<Register>& registers() const noexcept { return registers_; }

    bool has_register(const std::string& name) const noexcept;
    const Register& reg(const std::string& name) const;
    double norm_squared() const noexcept;

    void apply_hadamard(const std::string& name);
    /// X on every qubit of `name` whose bit in `mask` is set.
    void apply_x(const std::string& name, const BitString& mask);
    void apply_z(const std::string& name, const BitString& mask);
    /// Per-qubit CNOT from control[i] to target[i]; registers must have equal width.
    void apply_cnot(const std::string& control, const std::string& target);

    /// |in, t> -> |in, t xor f(in)>, where `in` concatenates `inputs` in order.
    void apply_oracle(const std::vector<std::string>& inputs, const std::string& target,
                      const std::function<BitString(const BitString&)>& f);

    /// Exact Born probabilities keyed by outcome; zero-weight outcomes omitted.
    std::map<BitString, double> distribution(const std::string& name) const;

    /// Projects `name` onto `outcome` and removes the register. Returns the
    /// branch probability; a zero-probability branch leaves the state unchanged
    /// and returns 0.
    double collapse(const std::string& name, const BitString& outcome);

    /// Samples one outcome (one uniform draw, CDF walked in index order) and
    /// removes the register.
    MeasurementRecord measure(const std::string& name, SplitMix64& rng);

    void rename_register(const std::string& from, const std::string& to);
    /// Splits a register into single-qubit registers `prefix.0`, `prefix.1`, ...
    void split_register(const std::string& name, const std::string& prefix);
    /// Merges registers that occupy adjacent qubit ranges, in the given order.
    void merge_registers(const std::vector<std::string>& names, const std::string& merged);

    friend StateVector tensor(const StateVector& a, const StateVector& b);

private:
    StateVector() = default;
    std::size_t register_index(const std::string& name) const;
    /// Shift of the least significant bit of a register inside the index.
    unsigned low_shift(const Register& r) const noexcept { return qubits_ - r.offset - r.width; }
    void hadamard_qubit(unsigned qubit);
    void remove_register(std::size_t idx, std::uint64_t outcome);

    unsigned qubits_ = 0;
    std::vector<Register> registers_;
    std::vector<Amplitude> amps_;
};

StateVector tensor(const StateVector& a, const StateVector& b);

// Value-style operations.

StateVector new_state(const std::vector<RegisterSpec>& registers);

/// (|0, x0> + |1, x1>) / sqrt 2 over ("bit", 1), ("preimage", n).
StateVector prepare_claw_state(const BitString& x0, const BitString& x1);

StateVector apply_hadamard(StateVector state, const std::string& name);

std::pair<MeasurementRecord, StateVector> measure(StateVector state, const std::string& name,
                                                  SplitMix64& rng);

std::map<BitString, double> measurement_distribution(const StateVector& state,
                                                     const std::string& name);

/// ("R", count), ("S", count), with R_i maximally entangled with S_i.
StateVector make_epr_pairs(unsigned count);

struct TeleportResult {
    BitString k0;  // X corrections: flip standard-basis outcomes
    BitString k1;  // Z corrections: flip Hadamard-basis outcomes
    StateVector state;
};

/// Bell-measures source_i with epr_local_i for every i. The partner register
/// of `epr_local` ends up holding X^k0 Z^k1 applied to the source state.
TeleportResult teleport(StateVector state, const std::string& source, const std::string& epr_local,
                        SplitMix64& rng);

/// Deterministic branch of `teleport` for a fixed outcome. Returns the branch
/// probability and the post-measurement state.
std::pair<double, StateVector> teleport_branch(StateVector state, const std::string& source,
                                               const std::string& epr_local, const BitString& k0,
                                               const BitString& k1);

}  // namespace posverif::qsim
