#include "posverif/puzzle/repeated.hpp"

#include "posverif/error.hpp"

namespace posverif::puzzle {

RepeatedPuzzle::RepeatedPuzzle(unsigned n, unsigned k, Repetition mode) : n_(n), k_(k), mode_(mode) {
    if (n < kMinN || n > kMaxN) throw Error(Errc::InvalidN, "n must lie in [2, 12], got " + std::to_string(n));
    if (k < 1 || k > BitString::kMaxWidth) throw Error(Errc::ConfigInvalid, "k must lie in [1, 64]");
}

std::pair<PublicKeys, SecretKeys> RepeatedPuzzle::keygen(SplitMix64& rng) const {
    PublicKeys pk;
    SecretKeys sk;
    for (unsigned i = 0; i < k_; ++i) {
        auto [h, t] = puzzle::keygen(n_, rng);
        pk.handles.push_back(std::move(h));
        sk.trapdoors.push_back(std::move(t));
    }
    return {std::move(pk), std::move(sk)};
}

RepeatedPuzzle::Obligated RepeatedPuzzle::obligate(const PublicKeys& pk, const SecretKeys& env,
                                                   SplitMix64& rng) const {
    if (pk.handles.size() != k_ || env.trapdoors.size() != k_)
        throw Error(Errc::LengthMismatch, "key count does not match k");
    Obligated out;
    for (unsigned i = 0; i < k_; ++i) {
        auto o = puzzle::obligate(pk.handles[i], env.trapdoors[i], rng);
        out.y.push_back(o.y);
        out.states.push_back(std::move(o.state));
    }
    return out;
}

BitString RepeatedPuzzle::sample_challenge(SplitMix64& rng) const {
    return BitString(challenge_width(), rng.bits(challenge_width()));
}

void RepeatedPuzzle::check_challenge(const BitString& challenge) const {
    if (challenge.width() != challenge_width())
        throw Error(Errc::LengthMismatch, "challenge has " + std::to_string(challenge.width()) + " bits, expected " +
                                              std::to_string(challenge_width()));
}

bool RepeatedPuzzle::instance_bit(const BitString& challenge, unsigned i) const {
    check_challenge(challenge);
    return mode_ == Repetition::SharedChallenge ? challenge.bit(0) : challenge.bit(i);
}

Answers RepeatedPuzzle::solve(const PublicKeys& pk, const Obligation& y, std::vector<qsim::StateVector> states,
                              const BitString& challenge, SplitMix64& rng) const {
    if (pk.handles.size() != k_ || y.size() != k_ || states.size() != k_)
        throw Error(Errc::LengthMismatch, "instance count does not match k");
    Answers out;
    for (unsigned i = 0; i < k_; ++i)
        out.push_back(puzzle::solve(pk.handles[i], y[i], std::move(states[i]), instance_bit(challenge, i), rng));
    return out;
}

bool RepeatedPuzzle::verify(const SecretKeys& sk, const Obligation& y, const BitString& challenge,
                            const Answers& ans) const {
    check_challenge(challenge);
    if (sk.trapdoors.size() != k_ || y.size() != k_ || ans.size() != k_) return false;
    for (unsigned i = 0; i < k_; ++i) {
        const bool b = instance_bit(challenge, i);
        if (!answers_challenge(ans[i], b)) return false;
        if (y[i].width() != n_) return false;
        if (!puzzle::verify(sk.trapdoors[i], y[i], b, ans[i])) return false;
    }
    return true;
}

RepeatedPuzzle strong_puzzle(unsigned n, unsigned k) { return RepeatedPuzzle(n, k, Repetition::SharedChallenge); }

RepeatedPuzzle parallel_puzzle(unsigned n, unsigned k) { return RepeatedPuzzle(n, k, Repetition::FreshChallenges); }

Bytes encode_public_keys(const PublicKeys& pk) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(pk.handles.size()));
    for (const auto& h : pk.handles) {
        const Bytes b = h.serialize();
        for (auto byte : b) w.u8(byte);
    }
    return std::move(w).take();
}

Bytes encode_obligation(const Obligation& y) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(y.size()));
    for (const auto& v : y) w.bits(v);
    return std::move(w).take();
}

Obligation decode_obligation(const Bytes& bytes) {
    ByteReader r(bytes);
    const std::uint32_t count = r.u32();
    if (count > BitString::kMaxWidth) throw Error(Errc::DecodeError, "too many obligations");
    Obligation y;
    for (std::uint32_t i = 0; i < count; ++i) y.push_back(r.bits());
    r.expect_done();
    return y;
}

Bytes encode_answers(const Answers& ans) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(ans.size()));
    for (const auto& a : ans) {
        if (const auto* p = std::get_if<Preimage>(&a))
            w.u8(0).u8(p->bprime ? 1 : 0).bits(p->v);
        else {
            const auto& e = std::get<Equation>(a);
            w.u8(1).u8(e.c ? 1 : 0).bits(e.d);
        }
    }
    return std::move(w).take();
}

Answers decode_answers(const Bytes& bytes) {
    ByteReader r(bytes);
    const std::uint32_t count = r.u32();
    if (count > BitString::kMaxWidth) throw Error(Errc::DecodeError, "too many answers");
    Answers out;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint8_t tag = r.u8();
        const std::uint8_t bit = r.u8();
        if (tag > 1 || bit > 1) throw Error(Errc::DecodeError, "bad answer tag");
        BitString payload = r.bits();
        if (tag == 0)
            out.push_back(Preimage{bit == 1, payload});
        else
            out.push_back(Equation{bit == 1, payload});
    }
    r.expect_done();
    return out;
}

void KeyDirectory::publish(const PublicKeys& pk, const SecretKeys& sk) {
    entries_.insert_or_assign(encode_public_keys(pk), std::make_pair(pk, sk));
}

PublicKeys KeyDirectory::resolve(const Bytes& published) const {
    auto it = entries_.find(published);
    if (it == entries_.end()) throw Error(Errc::DecodeError, "unknown public key");
    return it->second.first;
}

const SecretKeys& KeyDirectory::secrets(const PublicKeys& pk) const {
    auto it = entries_.find(encode_public_keys(pk));
    if (it == entries_.end()) throw Error(Errc::DecodeError, "unknown public key");
    return it->second.second;
}

RepeatedPuzzle::Obligated KeyDirectory::obligate(const RepeatedPuzzle& puzzle, const PublicKeys& pk,
                                                 SplitMix64& rng) const {
    return puzzle.obligate(pk, secrets(pk), rng);
}

}  // namespace posverif::puzzle
