#pragma once

#include <map>
#include <string>
#include <vector>

#include "posverif/qsim/state_vector.hpp"

namespace posverif::qsim {

/// Quantum state held jointly by several parties.
///
/// The state is a product of independent StateVector factors; every register
/// has exactly one owning party. Factors are tensored together only when an
/// operation spans two of them, so unentangled resources (such as a stock of
/// EPR pairs) cost nothing until they are used. The qubit cap applies to each
/// factor, so CapacityExceeded is raised by the join that would exceed it.
class SharedState {
public:
    /// Adds an independent factor. `owner` assigns each of its registers.
    void add(StateVector factor, const std::map<std::string, std::string>& owner);
    /// Adds a factor whose registers all belong to `party`.
    void add(StateVector factor, const std::string& party);

    bool has_register(const std::string& name) const noexcept { return owner_.count(name) != 0; }
    const std::string& owner(const std::string& name) const;
    std::vector<std::string> registers_of(const std::string& party) const;
    /// Total qubits across every factor.
    unsigned qubits() const noexcept;
    std::size_t factor_count() const noexcept { return factors_.size(); }

    /// Factor currently holding `name`.
    StateVector& factor(const std::string& name);
    const StateVector& factor(const std::string& name) const;
    /// Ensures `a` and `b` live in the same factor and returns it.
    StateVector& join(const std::string& a, const std::string& b);

    /// Reassigns `name` (a register sent over a quantum channel).
    void transfer(const std::string& name, const std::string& party);

    // Register reshaping; ownership follows the register.
    void rename(const std::string& from, const std::string& to);
    void split(const std::string& name, const std::string& prefix);
    /// Registers must share an owner; they are joined into one factor first.
    void merge(const std::vector<std::string>& names, const std::string& merged);

    /// Drops ownership entries of consumed registers and empty factors.
    void sync();

private:
    std::size_t factor_index(const std::string& name) const;

    std::vector<StateVector> factors_;
    std::map<std::string, std::string> owner_;
};

/// One party's window onto a SharedState. Every operation checks that the
/// named registers belong to that party and raises RegisterViolation
/// otherwise, which is how non-signaling is enforced.
class RegisterView {
public:
    RegisterView(SharedState& shared, std::string party) : shared_(&shared), party_(std::move(party)) {}

    const std::string& party() const noexcept { return party_; }
    bool owns(const std::string& name) const noexcept;
    std::vector<std::string> registers() const { return shared_->registers_of(party_); }
    unsigned width(const std::string& name) const;

    void add(StateVector factor);

    void hadamard(const std::string& name);
    void apply_x(const std::string& name, const BitString& mask);
    void apply_z(const std::string& name, const BitString& mask);
    /// Standard-basis measurement; consumes the register.
    BitString measure(const std::string& name, SplitMix64& rng);
    /// Hadamard-basis measurement; consumes the register.
    BitString measure_hadamard(const std::string& name, SplitMix64& rng);
    std::map<BitString, double> distribution(const std::string& name) const;

    void split(const std::string& name, const std::string& prefix);
    void merge(const std::vector<std::string>& names, const std::string& merged);
    void rename(const std::string& from, const std::string& to);

    /// Teleports `source` through the local EPR halves `epr_local`.
    /// Returns (k0, k1); the remote partner registers now hold the state.
    std::pair<BitString, BitString> teleport(const std::string& source, const std::string& epr_local,
                                             SplitMix64& rng);

    /// Hands a register to another party.
    void send(const std::string& name, const std::string& to);

private:
    void check(const std::string& name) const;

    SharedState* shared_;
    std::string party_;
};

}  // namespace posverif::qsim
