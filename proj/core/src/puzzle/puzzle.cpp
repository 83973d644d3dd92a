#include "posverif/puzzle/puzzle.hpp"

#include "posverif/error.hpp"

namespace posverif::puzzle {

namespace {

void check_width(const BitString& x, unsigned n, const char* what) {
    if (x.width() != n)
        throw Error(Errc::LengthMismatch, std::string(what) + " has " + std::to_string(x.width()) +
                                              " bits, expected " + std::to_string(n));
}

}  // namespace

MixingPermutation::MixingPermutation(unsigned n, std::uint64_t seed)
    : n_(n), seed_(seed), left_width_((n + 1) / 2), right_width_(n / 2) {
    if (n < kMinN || n > kMaxN) throw Error(Errc::InvalidN, "n must lie in [2, 12], got " + std::to_string(n));
}

std::uint64_t MixingPermutation::round_function(unsigned round, std::uint64_t half) const noexcept {
    return SplitMix64::mix(seed_ ^ SplitMix64::mix((std::uint64_t{round} << 32) + half + SplitMix64::kGamma));
}

BitString MixingPermutation::apply(const BitString& x) const {
    check_width(x, n_, "input");
    std::uint64_t left = x.value() >> right_width_;
    std::uint64_t right = x.value() & width_mask(right_width_);
    for (unsigned r = 0; r < 4; ++r) {
        if (r % 2 == 0)
            left ^= round_function(r, right) & width_mask(left_width_);
        else
            right ^= round_function(r, left) & width_mask(right_width_);
    }
    return BitString(n_, (left << right_width_) | right);
}

BitString MixingPermutation::invert(const BitString& y) const {
    check_width(y, n_, "image");
    std::uint64_t left = y.value() >> right_width_;
    std::uint64_t right = y.value() & width_mask(right_width_);
    for (unsigned r = 4; r-- > 0;) {
        if (r % 2 == 0)
            left ^= round_function(r, right) & width_mask(left_width_);
        else
            right ^= round_function(r, left) & width_mask(right_width_);
    }
    return BitString(n_, (left << right_width_) | right);
}

PublicHandle::PublicHandle(std::shared_ptr<const PuzzleKey> key)
    : key_(std::move(key)), perm_(key_->n, key_->seed) {}

BitString PublicHandle::eval(bool b, const BitString& x) const {
    check_width(x, key_->n, "x");
    return perm_.apply(b ? (x ^ key_->shift) : x);
}

bool PublicHandle::chk(bool b, const BitString& x, const BitString& y) const {
    check_width(y, key_->n, "y");
    return eval(b, x) == y;
}

Bytes PublicHandle::serialize() const {
    ByteWriter w;
    w.u64(key_->seed).u32(key_->n);
    return std::move(w).take();
}

Trapdoor::Trapdoor(PuzzleKey key)
    : key_([&] {
          if (key.n < kMinN || key.n > kMaxN) throw Error(Errc::InvalidN, "n must lie in [2, 12]");
          check_width(key.shift, key.n, "shift");
          if (key.shift.is_zero()) throw Error(Errc::InvalidN, "shift must be nonzero");
          return std::make_shared<const PuzzleKey>(std::move(key));
      }()),
      handle_(key_) {}

BitString Trapdoor::inv(bool b, const BitString& y) const {
    check_width(y, key_->n, "y");
    const BitString x = MixingPermutation(key_->n, key_->seed).invert(y);
    return b ? (x ^ key_->shift) : x;
}

Bytes Trapdoor::serialize() const {
    ByteWriter w;
    w.u64(key_->seed).u32(key_->n).u64(key_->shift.value());
    return std::move(w).take();
}

Trapdoor Trapdoor::deserialize(const Bytes& bytes) {
    ByteReader r(bytes);
    const std::uint64_t seed = r.u64();
    const std::uint32_t n = r.u32();
    const std::uint64_t s = r.u64();
    r.expect_done();
    if (n < kMinN || n > kMaxN) throw Error(Errc::InvalidN, "serialized n out of range");
    return Trapdoor(PuzzleKey{n, seed, BitString(n, s)});
}

Answer answer_from_bits(bool b, const BitString& bits) {
    if (bits.width() < 2) throw Error(Errc::LengthMismatch, "answer needs at least 2 bits");
    const bool first = bits.bit(0);
    BitString rest = bits.slice(1, bits.width() - 1);
    if (b) return Equation{first, rest};
    return Preimage{first, rest};
}

BitString answer_bits(const Answer& a) {
    return std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Preimage>)
                return BitString(1, v.bprime ? 1 : 0).concat(v.v);
            else
                return BitString(1, v.c ? 1 : 0).concat(v.d);
        },
        a);
}

std::pair<PublicHandle, Trapdoor> keygen(unsigned n, SplitMix64& rng) {
    if (n < kMinN || n > kMaxN) throw Error(Errc::InvalidN, "n must lie in [2, 12], got " + std::to_string(n));
    const std::uint64_t seed = rng.next();
    std::uint64_t s = 0;
    while (s == 0) s = rng.bits(n);
    Trapdoor td(PuzzleKey{n, seed, BitString(n, s)});
    PublicHandle pk = td.handle();
    return {std::move(pk), std::move(td)};
}

BitString eval(const PublicHandle& handle, bool b, const BitString& x) { return handle.eval(b, x); }

bool chk(const PublicHandle& handle, bool b, const BitString& x, const BitString& y) {
    check_width(x, handle.n(), "x");
    return handle.chk(b, x, y);
}

Obligated obligate(const PublicHandle& handle, const Trapdoor& env, SplitMix64& rng) {
    const unsigned n = handle.n();
    const BitString x0(n, rng.bits(n));
    const BitString y = handle.eval(false, x0);
    const BitString x1 = env.inv(true, y);
    return {y, qsim::prepare_claw_state(x0, x1)};
}

namespace {

qsim::StateVector obligate_circuit_state(const PublicHandle& handle) {
    const unsigned n = handle.n();
    qsim::StateVector st({{"bit", 1}, {"preimage", n}, {"image", n}});
    st.apply_hadamard("bit");
    st.apply_hadamard("preimage");
    st.apply_oracle({"bit", "preimage"}, "image", [&](const BitString& in) {
        return handle.eval(in.bit(0), in.slice(1, n));
    });
    return st;
}

}  // namespace

std::vector<CircuitBranch> obligate_circuit_branches(const PublicHandle& handle) {
    const qsim::StateVector st = obligate_circuit_state(handle);
    std::vector<CircuitBranch> out;
    for (const auto& [y, p] : st.distribution("image")) {
        qsim::StateVector branch = st;
        const double q = branch.collapse("image", y);
        out.push_back({y, q, std::move(branch)});
        (void)p;
    }
    return out;
}

Obligated run_obligate_circuit(const PublicHandle& handle, SplitMix64& rng) {
    qsim::StateVector st = obligate_circuit_state(handle);
    auto rec = st.measure("image", rng);
    return {rec.outcome, std::move(st)};
}

Answer solve(const PublicHandle& handle, const BitString& y, qsim::StateVector state, bool b, SplitMix64& rng) {
    const unsigned n = handle.n();
    check_width(y, n, "y");
    const auto& regs = state.registers();
    if (regs.size() != 2 || regs[0].name != "bit" || regs[0].width != 1 || regs[1].name != "preimage" ||
        regs[1].width != n)
        throw Error(Errc::WrongStateShape, "solve expects registers (bit, 1), (preimage, n)");
    if (b) {
        state.apply_hadamard("bit");
        state.apply_hadamard("preimage");
    }
    const bool first = state.measure("bit", rng).outcome.bit(0);
    const BitString rest = state.measure("preimage", rng).outcome;
    if (b) return Equation{first, rest};
    return Preimage{first, rest};
}

bool verify(const Trapdoor& trapdoor, const BitString& y, bool b, const Answer& ans) {
    if (!answers_challenge(ans, b)) throw Error(Errc::TagMismatch, "answer kind does not match challenge");
    const unsigned n = trapdoor.key().n;
    check_width(y, n, "y");
    if (!b) {
        const auto& p = std::get<Preimage>(ans);
        if (p.v.width() != n) return false;
        return trapdoor.handle().chk(p.bprime, p.v, y);
    }
    const auto& e = std::get<Equation>(ans);
    if (e.d.width() != n || e.d.is_zero()) return false;
    const BitString x0 = trapdoor.inv(false, y);
    const BitString x1 = trapdoor.inv(true, y);
    return e.d.dot(x0 ^ x1) == e.c;
}

bool verify_public_0(const PublicHandle& handle, const BitString& y, const Answer& ans) {
    if (!answers_challenge(ans, false)) throw Error(Errc::TagMismatch, "public verification covers challenge 0 only");
    check_width(y, handle.n(), "y");
    const auto& p = std::get<Preimage>(ans);
    if (p.v.width() != handle.n()) return false;
    return handle.chk(p.bprime, p.v, y);
}

}  // namespace posverif::puzzle
