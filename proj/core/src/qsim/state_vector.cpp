#include "posverif/qsim/state_vector.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "posverif/error.hpp"

namespace posverif::qsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::vector<Register> layout(const std::vector<RegisterSpec>& specs, unsigned& total) {
    std::vector<Register> regs;
    std::set<std::string> seen;
    total = 0;
    for (const auto& s : specs) {
        if (!seen.insert(s.name).second) throw Error(Errc::DuplicateRegister, s.name);
        if (s.width == 0) throw Error(Errc::LengthMismatch, "register '" + s.name + "' has width 0");
        if (total + s.width > kMaxQubits)
            throw Error(Errc::CapacityExceeded, "more than " + std::to_string(kMaxQubits) + " qubits requested");
        regs.push_back({s.name, total, s.width});
        total += s.width;
    }
    return regs;
}

}  // namespace

StateVector::StateVector(const std::vector<RegisterSpec>& registers) {
    registers_ = layout(registers, qubits_);
    amps_.assign(std::size_t{1} << qubits_, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(const std::vector<RegisterSpec>& registers, std::vector<Amplitude> amplitudes) {
    registers_ = layout(registers, qubits_);
    if (amplitudes.size() != (std::size_t{1} << qubits_))
        throw Error(Errc::LengthMismatch, "amplitude count does not match 2^q");
    amps_ = std::move(amplitudes);
    if (std::abs(norm_squared() - 1.0) > kTolerance) throw Error(Errc::LengthMismatch, "state is not normalized");
}

bool StateVector::has_register(const std::string& name) const noexcept {
    return std::any_of(registers_.begin(), registers_.end(), [&](const Register& r) { return r.name == name; });
}

std::size_t StateVector::register_index(const std::string& name) const {
    for (std::size_t i = 0; i < registers_.size(); ++i)
        if (registers_[i].name == name) return i;
    throw Error(Errc::UnknownRegister, name);
}

const Register& StateVector::reg(const std::string& name) const { return registers_[register_index(name)]; }

double StateVector::norm_squared() const noexcept {
    double total = 0.0;
    for (const auto& a : amps_) total += std::norm(a);
    return total;
}

void StateVector::hadamard_qubit(unsigned qubit) {
    const std::size_t stride = std::size_t{1} << (qubits_ - 1 - qubit);
    for (std::size_t base = 0; base < amps_.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Amplitude a = amps_[i];
            const Amplitude b = amps_[i + stride];
            amps_[i] = (a + b) * kInvSqrt2;
            amps_[i + stride] = (a - b) * kInvSqrt2;
        }
    }
}

void StateVector::apply_hadamard(const std::string& name) {
    const Register& r = reg(name);
    for (unsigned q = r.offset; q < r.offset + r.width; ++q) hadamard_qubit(q);
}

void StateVector::apply_x(const std::string& name, const BitString& mask) {
    const Register& r = reg(name);
    if (mask.width() != r.width) throw Error(Errc::LengthMismatch, "X mask width");
    const std::uint64_t flip = mask.value() << low_shift(r);
    if (flip == 0) return;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const std::size_t j = i ^ flip;
        if (i < j) std::swap(amps_[i], amps_[j]);
    }
}

void StateVector::apply_z(const std::string& name, const BitString& mask) {
    const Register& r = reg(name);
    if (mask.width() != r.width) throw Error(Errc::LengthMismatch, "Z mask width");
    const std::uint64_t phase = mask.value() << low_shift(r);
    for (std::size_t i = 0; i < amps_.size(); ++i)
        if (std::popcount(i & phase) & 1) amps_[i] = -amps_[i];
}

void StateVector::apply_cnot(const std::string& control, const std::string& target) {
    const Register& c = reg(control);
    const Register& t = reg(target);
    if (c.width != t.width) throw Error(Errc::LengthMismatch, "CNOT registers differ in width");
    if (control == target) throw Error(Errc::LengthMismatch, "CNOT control equals target");
    const unsigned cs = low_shift(c);
    const unsigned ts = low_shift(t);
    const std::uint64_t mask = width_mask(c.width);
    std::vector<Amplitude> out(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const std::uint64_t cv = (i >> cs) & mask;
        out[i ^ (cv << ts)] = amps_[i];
    }
    amps_ = std::move(out);
}

void StateVector::apply_oracle(const std::vector<std::string>& inputs, const std::string& target,
                               const std::function<BitString(const BitString&)>& f) {
    std::vector<const Register*> in;
    for (const auto& name : inputs) {
        if (name == target) throw Error(Errc::LengthMismatch, "oracle target is also an input");
        in.push_back(&reg(name));
    }
    const Register& t = reg(target);
    const unsigned ts = low_shift(t);
    std::vector<Amplitude> out(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        BitString x;
        for (const Register* r : in) x = x.concat(BitString(r->width, (i >> low_shift(*r)) & width_mask(r->width)));
        const BitString fx = f(x);
        if (fx.width() != t.width) throw Error(Errc::LengthMismatch, "oracle output width");
        out[i ^ (fx.value() << ts)] = amps_[i];
    }
    amps_ = std::move(out);
}

std::map<BitString, double> StateVector::distribution(const std::string& name) const {
    const Register& r = reg(name);
    const unsigned shift = low_shift(r);
    const std::uint64_t mask = width_mask(r.width);
    std::vector<double> probs(std::size_t{1} << r.width, 0.0);
    for (std::size_t i = 0; i < amps_.size(); ++i) probs[(i >> shift) & mask] += std::norm(amps_[i]);
    std::map<BitString, double> out;
    for (std::size_t v = 0; v < probs.size(); ++v)
        if (probs[v] > 0.0) out.emplace(BitString(r.width, v), probs[v]);
    return out;
}

void StateVector::remove_register(std::size_t idx, std::uint64_t outcome) {
    const Register r = registers_[idx];
    const unsigned shift = low_shift(r);
    const std::uint64_t mask = width_mask(r.width);
    const std::size_t low_mask = (std::size_t{1} << shift) - 1;
    std::vector<Amplitude> out(std::size_t{1} << (qubits_ - r.width));
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (((i >> shift) & mask) != outcome) continue;
        const std::size_t high = i >> (shift + r.width);
        out[(high << shift) | (i & low_mask)] = amps_[i];
    }
    amps_ = std::move(out);
    registers_.erase(registers_.begin() + static_cast<std::ptrdiff_t>(idx));
    for (auto& other : registers_)
        if (other.offset > r.offset) other.offset -= r.width;
    qubits_ -= r.width;
}

double StateVector::collapse(const std::string& name, const BitString& outcome) {
    const std::size_t idx = register_index(name);
    const Register& r = registers_[idx];
    if (outcome.width() != r.width) throw Error(Errc::LengthMismatch, "outcome width");
    const unsigned shift = low_shift(r);
    const std::uint64_t mask = width_mask(r.width);
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i)
        if (((i >> shift) & mask) == outcome.value()) p += std::norm(amps_[i]);
    if (p <= 0.0) return 0.0;
    remove_register(idx, outcome.value());
    const double scale = 1.0 / std::sqrt(p);
    for (auto& a : amps_) a *= scale;
    return p;
}

MeasurementRecord StateVector::measure(const std::string& name, SplitMix64& rng) {
    const auto dist = distribution(name);
    const double u = rng.uniform();
    double acc = 0.0;
    auto pick = std::prev(dist.end());
    for (auto it = dist.begin(); it != dist.end(); ++it) {
        acc += it->second;
        if (u < acc) {
            pick = it;
            break;
        }
    }
    MeasurementRecord rec{name, pick->first, pick->second};
    collapse(name, pick->first);
    return rec;
}

void StateVector::rename_register(const std::string& from, const std::string& to) {
    if (from == to) return;
    if (has_register(to)) throw Error(Errc::DuplicateRegister, to);
    registers_[register_index(from)].name = to;
}

void StateVector::split_register(const std::string& name, const std::string& prefix) {
    const std::size_t idx = register_index(name);
    const Register r = registers_[idx];
    std::vector<Register> parts;
    for (unsigned i = 0; i < r.width; ++i) {
        std::string part = prefix + "." + std::to_string(i);
        if (part != name && has_register(part)) throw Error(Errc::DuplicateRegister, part);
        parts.push_back({std::move(part), r.offset + i, 1});
    }
    registers_.erase(registers_.begin() + static_cast<std::ptrdiff_t>(idx));
    registers_.insert(registers_.begin() + static_cast<std::ptrdiff_t>(idx), parts.begin(), parts.end());
}

void StateVector::merge_registers(const std::vector<std::string>& names, const std::string& merged) {
    if (names.empty()) throw Error(Errc::UnknownRegister, "nothing to merge");
    const std::size_t first = register_index(names.front());
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (first + i >= registers_.size() || registers_[first + i].name != names[i])
            throw Error(Errc::WrongStateShape, "registers to merge are not adjacent and in order");
    }
    if (std::find(names.begin(), names.end(), merged) == names.end() && has_register(merged))
        throw Error(Errc::DuplicateRegister, merged);
    unsigned width = 0;
    for (std::size_t i = 0; i < names.size(); ++i) width += registers_[first + i].width;
    const Register combined{merged, registers_[first].offset, width};
    registers_.erase(registers_.begin() + static_cast<std::ptrdiff_t>(first),
                     registers_.begin() + static_cast<std::ptrdiff_t>(first + names.size()));
    registers_.insert(registers_.begin() + static_cast<std::ptrdiff_t>(first), combined);
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    if (a.qubits_ + b.qubits_ > kMaxQubits) throw Error(Errc::CapacityExceeded, "tensor product too large");
    for (const auto& r : b.registers_)
        if (a.has_register(r.name)) throw Error(Errc::DuplicateRegister, r.name);
    StateVector out;
    out.qubits_ = a.qubits_ + b.qubits_;
    out.registers_ = a.registers_;
    for (auto r : b.registers_) {
        r.offset += a.qubits_;
        out.registers_.push_back(std::move(r));
    }
    out.amps_.resize(a.amps_.size() * b.amps_.size());
    for (std::size_t i = 0; i < a.amps_.size(); ++i)
        for (std::size_t j = 0; j < b.amps_.size(); ++j) out.amps_[(i << b.qubits_) | j] = a.amps_[i] * b.amps_[j];
    return out;
}

StateVector new_state(const std::vector<RegisterSpec>& registers) { return StateVector(registers); }

StateVector prepare_claw_state(const BitString& x0, const BitString& x1) {
    if (x0.width() != x1.width()) throw Error(Errc::LengthMismatch, "claw preimages differ in length");
    const unsigned n = x0.width();
    if (n == 0) throw Error(Errc::LengthMismatch, "empty preimage");
    if (n + 1 > kMaxQubits) throw Error(Errc::CapacityExceeded, "claw state too large");
    std::vector<Amplitude> amps(std::size_t{1} << (n + 1));
    amps[x0.value()] += kInvSqrt2;
    amps[(std::size_t{1} << n) | x1.value()] += kInvSqrt2;
    return StateVector({{"bit", 1}, {"preimage", n}}, std::move(amps));
}

StateVector apply_hadamard(StateVector state, const std::string& name) {
    state.apply_hadamard(name);
    return state;
}

std::pair<MeasurementRecord, StateVector> measure(StateVector state, const std::string& name, SplitMix64& rng) {
    auto rec = state.measure(name, rng);
    return {std::move(rec), std::move(state)};
}

std::map<BitString, double> measurement_distribution(const StateVector& state, const std::string& name) {
    return state.distribution(name);
}

StateVector make_epr_pairs(unsigned count) {
    if (count == 0) throw Error(Errc::LengthMismatch, "EPR pair count must be positive");
    if (2 * count > kMaxQubits) throw Error(Errc::CapacityExceeded, "too many EPR pairs");
    std::vector<Amplitude> amps(std::size_t{1} << (2 * count));
    const double w = std::pow(kInvSqrt2, static_cast<double>(count));
    for (std::size_t v = 0; v < (std::size_t{1} << count); ++v) amps[(v << count) | v] = w;
    return StateVector({{"R", count}, {"S", count}}, std::move(amps));
}

namespace {

void bell_rotate(StateVector& state, const std::string& source, const std::string& epr_local) {
    if (state.reg(source).width != state.reg(epr_local).width)
        throw Error(Errc::LengthMismatch, "source and EPR register widths differ");
    state.apply_cnot(source, epr_local);
    state.apply_hadamard(source);
}

}  // namespace

TeleportResult teleport(StateVector state, const std::string& source, const std::string& epr_local,
                        SplitMix64& rng) {
    bell_rotate(state, source, epr_local);
    // Source carries the Z-type outcome, the local EPR half the X-type outcome.
    auto z = state.measure(source, rng);
    auto x = state.measure(epr_local, rng);
    return {x.outcome, z.outcome, std::move(state)};
}

std::pair<double, StateVector> teleport_branch(StateVector state, const std::string& source,
                                               const std::string& epr_local, const BitString& k0,
                                               const BitString& k1) {
    bell_rotate(state, source, epr_local);
    const double pz = state.collapse(source, k1);
    if (pz == 0.0) return {0.0, std::move(state)};
    const double px = state.collapse(epr_local, k0);
    return {pz * px, std::move(state)};
}

}  // namespace posverif::qsim
