#include "posverif/qsim/shared_state.hpp"

#include <algorithm>

#include "posverif/error.hpp"

namespace posverif::qsim {

void SharedState::add(StateVector factor, const std::map<std::string, std::string>& owner) {
    for (const auto& r : factor.registers()) {
        if (has_register(r.name)) throw Error(Errc::DuplicateRegister, r.name);
        if (owner.find(r.name) == owner.end()) throw Error(Errc::RegisterViolation, "register '" + r.name + "' has no owner");
    }
    for (const auto& r : factor.registers()) owner_[r.name] = owner.at(r.name);
    if (factor.qubits() > 0) factors_.push_back(std::move(factor));
}

void SharedState::add(StateVector factor, const std::string& party) {
    std::map<std::string, std::string> owner;
    for (const auto& r : factor.registers()) owner[r.name] = party;
    add(std::move(factor), owner);
}

const std::string& SharedState::owner(const std::string& name) const {
    auto it = owner_.find(name);
    if (it == owner_.end()) throw Error(Errc::UnknownRegister, name);
    return it->second;
}

std::vector<std::string> SharedState::registers_of(const std::string& party) const {
    std::vector<std::string> out;
    for (const auto& [name, who] : owner_)
        if (who == party) out.push_back(name);
    return out;
}

unsigned SharedState::qubits() const noexcept {
    unsigned total = 0;
    for (const auto& f : factors_) total += f.qubits();
    return total;
}

std::size_t SharedState::factor_index(const std::string& name) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].has_register(name)) return i;
    throw Error(Errc::UnknownRegister, name);
}

StateVector& SharedState::factor(const std::string& name) { return factors_[factor_index(name)]; }

const StateVector& SharedState::factor(const std::string& name) const { return factors_[factor_index(name)]; }

StateVector& SharedState::join(const std::string& a, const std::string& b) {
    const std::size_t ia = factor_index(a);
    const std::size_t ib = factor_index(b);
    if (ia == ib) return factors_[ia];
    StateVector merged = tensor(factors_[ia], factors_[ib]);
    const std::size_t lo = std::min(ia, ib);
    const std::size_t hi = std::max(ia, ib);
    factors_.erase(factors_.begin() + static_cast<std::ptrdiff_t>(hi));
    factors_[lo] = std::move(merged);
    return factors_[lo];
}

void SharedState::transfer(const std::string& name, const std::string& party) {
    auto it = owner_.find(name);
    if (it == owner_.end()) throw Error(Errc::UnknownRegister, name);
    it->second = party;
}

void SharedState::rename(const std::string& from, const std::string& to) {
    if (from == to) return;
    if (has_register(to)) throw Error(Errc::DuplicateRegister, to);
    factor(from).rename_register(from, to);
    owner_[to] = owner(from);
    owner_.erase(from);
}

void SharedState::split(const std::string& name, const std::string& prefix) {
    auto& f = factor(name);
    const unsigned w = f.reg(name).width;
    const std::string who = owner(name);
    for (unsigned i = 0; i < w; ++i) {
        const std::string part = prefix + "." + std::to_string(i);
        if (part != name && has_register(part)) throw Error(Errc::DuplicateRegister, part);
    }
    f.split_register(name, prefix);
    owner_.erase(name);
    for (unsigned i = 0; i < w; ++i) owner_[prefix + "." + std::to_string(i)] = who;
}

void SharedState::merge(const std::vector<std::string>& names, const std::string& merged) {
    if (names.empty()) throw Error(Errc::UnknownRegister, "nothing to merge");
    const std::string who = owner(names.front());
    for (const auto& n : names)
        if (owner(n) != who) throw Error(Errc::RegisterViolation, "merged registers have different owners");
    for (std::size_t i = 1; i < names.size(); ++i) join(names.front(), names[i]);
    factor(names.front()).merge_registers(names, merged);
    for (const auto& n : names) owner_.erase(n);
    owner_[merged] = who;
}

void SharedState::sync() {
    factors_.erase(std::remove_if(factors_.begin(), factors_.end(), [](const StateVector& f) { return f.qubits() == 0; }),
                   factors_.end());
    for (auto it = owner_.begin(); it != owner_.end();) {
        const bool live = std::any_of(factors_.begin(), factors_.end(),
                                      [&](const StateVector& f) { return f.has_register(it->first); });
        it = live ? std::next(it) : owner_.erase(it);
    }
}

bool RegisterView::owns(const std::string& name) const noexcept {
    return shared_->has_register(name) && shared_->owner(name) == party_;
}

void RegisterView::check(const std::string& name) const {
    if (!shared_->has_register(name)) throw Error(Errc::UnknownRegister, name);
    if (shared_->owner(name) != party_)
        throw Error(Errc::RegisterViolation, party_ + " may not touch register '" + name + "' owned by " +
                                                 shared_->owner(name));
}

unsigned RegisterView::width(const std::string& name) const {
    check(name);
    return shared_->factor(name).reg(name).width;
}

void RegisterView::add(StateVector factor) { shared_->add(std::move(factor), party_); }

void RegisterView::hadamard(const std::string& name) {
    check(name);
    shared_->factor(name).apply_hadamard(name);
}

void RegisterView::apply_x(const std::string& name, const BitString& mask) {
    check(name);
    shared_->factor(name).apply_x(name, mask);
}

void RegisterView::apply_z(const std::string& name, const BitString& mask) {
    check(name);
    shared_->factor(name).apply_z(name, mask);
}

BitString RegisterView::measure(const std::string& name, SplitMix64& rng) {
    check(name);
    auto rec = shared_->factor(name).measure(name, rng);
    shared_->sync();
    return rec.outcome;
}

BitString RegisterView::measure_hadamard(const std::string& name, SplitMix64& rng) {
    hadamard(name);
    return measure(name, rng);
}

std::map<BitString, double> RegisterView::distribution(const std::string& name) const {
    check(name);
    return shared_->factor(name).distribution(name);
}

void RegisterView::split(const std::string& name, const std::string& prefix) {
    check(name);
    shared_->split(name, prefix);
}

void RegisterView::merge(const std::vector<std::string>& names, const std::string& merged) {
    for (const auto& n : names) check(n);
    shared_->merge(names, merged);
}

void RegisterView::rename(const std::string& from, const std::string& to) {
    check(from);
    shared_->rename(from, to);
}

std::pair<BitString, BitString> RegisterView::teleport(const std::string& source, const std::string& epr_local,
                                                       SplitMix64& rng) {
    check(source);
    check(epr_local);
    StateVector& f = shared_->join(source, epr_local);
    auto result = qsim::teleport(std::move(f), source, epr_local, rng);
    f = std::move(result.state);
    shared_->sync();
    return {result.k0, result.k1};
}

void RegisterView::send(const std::string& name, const std::string& to) {
    check(name);
    shared_->transfer(name, to);
}

}  // namespace posverif::qsim
