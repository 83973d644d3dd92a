#include "posverif/qsim/shared_state.hpp"
#include "posverif/qsim/state_vector.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace posverif;
using namespace posverif::qsim;

namespace {

constexpr double kEps = 1e-12;
const double kHalfSqrt = 1.0 / std::sqrt(2.0);

void expect_same_amplitudes(const StateVector& a, const StateVector& b) {
    ASSERT_EQ(a.amplitudes().size(), b.amplitudes().size());
    for (std::size_t i = 0; i < a.amplitudes().size(); ++i)
        EXPECT_LE(std::abs(a.amplitudes()[i] - b.amplitudes()[i]), kEps) << "index " << i;
}

void expect_same_distribution(const std::map<BitString, double>& a, const std::map<BitString, double>& b) {
    std::map<BitString, double> all;
    for (const auto& [k, v] : a) all[k] += 0;
    for (const auto& [k, v] : b) all[k] += 0;
    for (const auto& [k, _] : all) {
        const double pa = a.count(k) ? a.at(k) : 0.0;
        const double pb = b.count(k) ? b.at(k) : 0.0;
        EXPECT_NEAR(pa, pb, kEps) << "outcome " << k.str();
    }
}

/// Independent oracle: amplitude of |c, d> after H on all n+1 qubits of the
/// claw state, from the closed-form sum rather than the engine.
std::complex<double> claw_hadamard_amplitude(const BitString& x0, const BitString& x1, bool c, const BitString& d) {
    const unsigned n = x0.width();
    const double norm = 1.0 / std::sqrt(2.0) / std::sqrt(std::pow(2.0, n + 1));
    double sum = 0;
    sum += (d.dot(x0) ? -1.0 : 1.0);
    sum += ((c != d.dot(x1)) ? -1.0 : 1.0);
    return norm * sum;
}

}  // namespace

TEST(StateVector, new_state_is_all_zeros) {
    auto s = new_state({{"a", 1}});
    ASSERT_EQ(s.amplitudes().size(), 2u);
    EXPECT_EQ(s.amplitude(0), Amplitude(1.0));
    EXPECT_EQ(s.amplitude(1), Amplitude(0.0));

    auto t = new_state({{"a", 2}, {"b", 1}});
    ASSERT_EQ(t.amplitudes().size(), 8u);
    EXPECT_EQ(t.amplitude(0), Amplitude(1.0));
    EXPECT_EQ(t.reg("b").offset, 2u);
}

TEST(StateVector, capacity_and_duplicates) {
    EXPECT_ERRC(new_state({{"a", 25}}), Errc::CapacityExceeded);
    EXPECT_ERRC(new_state({{"a", 12}, {"b", 13}}), Errc::CapacityExceeded);
    EXPECT_ERRC(new_state({{"a", 1}, {"a", 2}}), Errc::DuplicateRegister);
    EXPECT_ERRC(apply_hadamard(new_state({{"a", 1}}), "zz"), Errc::UnknownRegister);
    EXPECT_ERRC(measurement_distribution(new_state({{"a", 1}}), "zz"), Errc::UnknownRegister);
    SplitMix64 rng(1);
    EXPECT_ERRC(measure(new_state({{"a", 1}}), "zz", rng), Errc::UnknownRegister);
}

TEST(StateVector, hadamard_basics) {
    auto plus = apply_hadamard(new_state({{"a", 1}}), "a");
    EXPECT_NEAR(plus.amplitude(0).real(), kHalfSqrt, kEps);
    EXPECT_NEAR(plus.amplitude(1).real(), kHalfSqrt, kEps);

    StateVector minus({{"a", 1}}, {kHalfSqrt, -kHalfSqrt});
    auto one = apply_hadamard(minus, "a");
    EXPECT_NEAR(std::abs(one.amplitude(0)), 0.0, kEps);
    EXPECT_NEAR(one.amplitude(1).real(), 1.0, kEps);

    auto dist = measurement_distribution(plus, "a");
    ASSERT_EQ(dist.size(), 2u);
    EXPECT_NEAR(dist.at(BitString::parse("0")), 0.5, kEps);
    EXPECT_NEAR(dist.at(BitString::parse("1")), 0.5, kEps);

    auto zero = measurement_distribution(new_state({{"a", 1}}), "a");
    ASSERT_EQ(zero.size(), 1u);
    EXPECT_NEAR(zero.at(BitString::parse("0")), 1.0, kEps);
}

TEST(StateVector, hadamard_is_an_involution_and_preserves_norm) {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = testutil::random_state({{"a", 2}, {"b", 3}}, rng);
        auto once = apply_hadamard(s, trial % 2 ? "a" : "b");
        EXPECT_NEAR(once.norm_squared(), 1.0, kEps);
        auto twice = apply_hadamard(once, trial % 2 ? "a" : "b");
        expect_same_amplitudes(s, twice);
    }
}

TEST(StateVector, claw_state_layout) {
    auto s = prepare_claw_state(BitString::parse("00"), BitString::parse("11"));
    EXPECT_NEAR(s.amplitude(0b000).real(), kHalfSqrt, kEps);
    EXPECT_NEAR(s.amplitude(0b111).real(), kHalfSqrt, kEps);
    for (std::uint64_t i : {1, 2, 3, 4, 5, 6}) EXPECT_EQ(s.amplitude(i), Amplitude(0.0));
    EXPECT_ERRC(prepare_claw_state(BitString::parse("00"), BitString::parse("1")), Errc::LengthMismatch);
}

TEST(StateVector, degenerate_claw_measures_bit_uniformly) {
    auto s = prepare_claw_state(BitString::parse("0"), BitString::parse("0"));
    auto dist = measurement_distribution(s, "bit");
    EXPECT_NEAR(dist.at(BitString::parse("0")), 0.5, kEps);
    EXPECT_NEAR(dist.at(BitString::parse("1")), 0.5, kEps);
}

TEST(StateVector, measuring_claw_bit_collapses_preimage) {
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        SplitMix64 rng(seed);
        auto [rec, rest] = measure(prepare_claw_state(BitString::parse("00"), BitString::parse("11")), "bit", rng);
        EXPECT_NEAR(rec.probability, 0.5, kEps);
        ASSERT_EQ(rest.qubits(), 2u);
        EXPECT_FALSE(rest.has_register("bit"));
        const std::uint64_t expected = rec.outcome.bit(0) ? 0b11 : 0b00;
        EXPECT_NEAR(std::abs(rest.amplitude(expected)), 1.0, kEps);
    }
    SplitMix64 rng(3);
    auto [rec, rest] = measure(new_state({{"a", 3}, {"b", 1}}), "a", rng);
    EXPECT_EQ(rec.outcome, BitString::zeros(3));
    EXPECT_NEAR(rec.probability, 1.0, kEps);
}

TEST(StateVector, claw_hadamard_identity_exhaustive) {
    // Every n <= 4 and every pair x0 != x1.
    for (unsigned n = 1; n <= 4; ++n) {
        const std::uint64_t size = std::uint64_t{1} << n;
        for (std::uint64_t a = 0; a < size; ++a) {
            for (std::uint64_t b = 0; b < size; ++b) {
                if (a == b) continue;
                const BitString x0(n, a), x1(n, b);
                auto s = prepare_claw_state(x0, x1);
                s.apply_hadamard("bit");
                s.apply_hadamard("preimage");
                s.merge_registers({"bit", "preimage"}, "all");
                const auto dist = measurement_distribution(s, "all");
                std::size_t support = 0;
                for (const auto& [o, p] : dist) support += p > kEps;
                EXPECT_EQ(support, size);
                for (std::uint64_t cd = 0; cd < 2 * size; ++cd) {
                    const bool c = (cd >> n) & 1;
                    const BitString d(n, cd & (size - 1));
                    const double oracle = std::norm(claw_hadamard_amplitude(x0, x1, c, d));
                    const bool in_support = c == d.dot(x0 ^ x1);
                    EXPECT_NEAR(oracle, in_support ? 1.0 / static_cast<double>(size) : 0.0, kEps);
                    auto it = dist.find(BitString(n + 1, cd));
                    if (in_support) {
                        ASSERT_NE(it, dist.end());
                        EXPECT_NEAR(it->second, oracle, kEps);
                    } else {
                        EXPECT_TRUE(it == dist.end() || it->second < kEps);
                    }
                }
            }
        }
    }
}

TEST(StateVector, claw_hadamard_example_01_10) {
    auto s = prepare_claw_state(BitString::parse("01"), BitString::parse("10"));
    s.apply_hadamard("bit");
    s.apply_hadamard("preimage");
    s.merge_registers({"bit", "preimage"}, "all");
    auto dist = measurement_distribution(s, "all");
    // c = d . 11: supported (c,d) in {0 00, 1 01, 1 10, 0 11}.
    std::map<BitString, double> expected;
    for (const char* o : {"000", "101", "110", "011"}) expected[BitString::parse(o)] = 0.25;
    expect_same_distribution(dist, expected);
}

TEST(StateVector, sampled_frequencies_match_distribution) {
    SplitMix64 rng(99);
    auto base = testutil::random_state({{"a", 3}}, rng);
    const auto dist = measurement_distribution(base, "a");
    std::map<BitString, std::size_t> counts;
    constexpr std::size_t kDraws = 100000;
    for (std::size_t i = 0; i < kDraws; ++i) {
        auto [rec, rest] = measure(base, "a", rng);
        ++counts[rec.outcome];
        EXPECT_NEAR(rec.probability, dist.at(rec.outcome), kEps);
    }
    for (const auto& [outcome, p] : dist) EXPECT_TRUE(testutil::within_sigma(counts[outcome], kDraws, p)) << outcome.str();
}

TEST(StateVector, measurement_is_deterministic_given_seed) {
    auto s = apply_hadamard(new_state({{"a", 6}}), "a");
    SplitMix64 r1(1234), r2(1234);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(s.distribution("a").size(), 64u);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(measure(s, "a", r1).first.outcome, measure(s, "a", r2).first.outcome);
}

TEST(Epr, pairs_are_perfectly_correlated) {
    auto e = make_epr_pairs(1);
    EXPECT_NEAR(e.amplitude(0b00).real(), kHalfSqrt, kEps);
    EXPECT_NEAR(e.amplitude(0b11).real(), kHalfSqrt, kEps);
    EXPECT_ERRC(make_epr_pairs(13), Errc::CapacityExceeded);
    EXPECT_NO_THROW(make_epr_pairs(12));

    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        SplitMix64 rng(seed);
        auto [r, rest] = measure(make_epr_pairs(3), "R", rng);
        auto [s, done] = measure(std::move(rest), "S", rng);
        EXPECT_EQ(r.outcome, s.outcome);
        EXPECT_EQ(done.qubits(), 0u);
    }
}

TEST(Teleport, zero_state_outcome_equals_k0) {
    // All four Bell outcomes, exhaustively.
    for (std::uint64_t a = 0; a < 2; ++a) {
        for (std::uint64_t c = 0; c < 2; ++c) {
            auto st = tensor(new_state({{"psi", 1}}), make_epr_pairs(1));
            auto [p, rest] = teleport_branch(st, "psi", "R", BitString(1, a), BitString(1, c));
            EXPECT_NEAR(p, 0.25, kEps);
            auto dist = measurement_distribution(rest, "S");
            ASSERT_EQ(dist.size(), 1u);
            EXPECT_EQ(dist.begin()->first, BitString(1, a));
        }
    }
}

namespace {

/// Exact distribution of (measurement of remote) xor correction, summed over
/// every Bell outcome of teleporting `psi`'s register "psi".
std::map<BitString, double> corrected_remote_distribution(const StateVector& psi, bool hadamard_basis) {
    const unsigned w = psi.reg("psi").width;
    std::map<BitString, double> total;
    for (std::uint64_t a = 0; a < (1u << w); ++a) {
        for (std::uint64_t c = 0; c < (1u << w); ++c) {
            auto st = tensor(psi, make_epr_pairs(w));
            auto [p, rest] = teleport_branch(st, "psi", "R", BitString(w, a), BitString(w, c));
            if (p == 0.0) continue;
            if (hadamard_basis) rest.apply_hadamard("S");
            const BitString shift(w, hadamard_basis ? c : a);
            for (const auto& [o, q] : measurement_distribution(rest, "S")) total[o ^ shift] += p * q;
        }
    }
    return total;
}

}  // namespace

TEST(Teleport, commutes_with_standard_and_hadamard_measurement) {
    SplitMix64 rng(2024);
    for (unsigned w = 1; w <= 4; ++w) {
        for (int trial = 0; trial < 3; ++trial) {
            const auto psi = testutil::random_state({{"psi", w}}, rng);
            expect_same_distribution(corrected_remote_distribution(psi, false), measurement_distribution(psi, "psi"));
            expect_same_distribution(corrected_remote_distribution(psi, true),
                                     measurement_distribution(apply_hadamard(psi, "psi"), "psi"));
        }
    }
}

TEST(Teleport, corrections_recover_the_state) {
    SplitMix64 rng(5);
    const auto psi = testutil::random_state({{"psi", 2}}, rng);
    for (int trial = 0; trial < 16; ++trial) {
        auto res = teleport(tensor(psi, make_epr_pairs(2)), "psi", "R", rng);
        StateVector remote = std::move(res.state);
        remote.apply_x("S", res.k0);
        remote.apply_z("S", res.k1);
        // Equal up to global phase: |<psi|remote>| = 1.
        std::complex<double> overlap = 0;
        for (std::size_t i = 0; i < 4; ++i) overlap += std::conj(psi.amplitude(i)) * remote.amplitude(i);
        EXPECT_NEAR(std::abs(overlap), 1.0, 1e-12);
        EXPECT_NEAR(remote.norm_squared(), 1.0, kEps);
    }
}

TEST(Teleport, claw_state_through_epr_matches_direct_measurement) {
    const auto claw = prepare_claw_state(BitString::parse("01"), BitString::parse("10"));
    StateVector psi = claw;
    psi.merge_registers({"bit", "preimage"}, "psi");
    expect_same_distribution(corrected_remote_distribution(psi, false), measurement_distribution(psi, "psi"));
    EXPECT_ERRC(teleport_branch(tensor(new_state({{"psi", 2}}), make_epr_pairs(1)), "psi", "R", BitString(1, 0),
                                BitString(1, 0)),
                Errc::LengthMismatch);
}

TEST(SharedState, views_enforce_ownership) {
    SharedState shared;
    shared.add(make_epr_pairs(2), {{"R", "B"}, {"S", "C"}});
    RegisterView b(shared, "B");
    RegisterView c(shared, "C");
    EXPECT_TRUE(b.owns("R"));
    EXPECT_FALSE(b.owns("S"));
    EXPECT_ERRC(b.hadamard("S"), Errc::RegisterViolation);
    EXPECT_ERRC(c.distribution("R"), Errc::RegisterViolation);
    SplitMix64 rng(1);
    const BitString r = b.measure("R", rng);
    const BitString s = c.measure("S", rng);
    EXPECT_EQ(r, s);
    EXPECT_EQ(shared.qubits(), 0u);
}

TEST(SharedState, capacity_applies_per_factor) {
    // 3 * 10 qubits across independent factors is fine; joining two of them
    // would need 20 and joining all three 30.
    SharedState shared;
    shared.add(new_state({{"a", 10}}), "P");
    shared.add(new_state({{"b", 10}}), "P");
    shared.add(new_state({{"c", 10}}), "P");
    EXPECT_EQ(shared.qubits(), 30u);
    EXPECT_EQ(shared.join("a", "b").qubits(), 20u);
    EXPECT_ERRC(shared.join("a", "c"), Errc::CapacityExceeded);
    EXPECT_ERRC(shared.add(new_state({{"d", 25}}), "P"), Errc::CapacityExceeded);
}

TEST(SharedState, lazy_epr_teleport_keeps_factors_small) {
    // Teleport a 5-qubit register one qubit at a time through independent
    // EPR factors; the joint state never exceeds 5 + 2 qubits.
    SplitMix64 rng(11);
    const auto psi = testutil::random_state({{"psi", 5}}, rng);
    SharedState shared;
    shared.add(psi, "A0");
    std::map<std::string, std::string> owner;
    for (unsigned j = 0; j < 5; ++j) {
        auto pair = make_epr_pairs(1);
        pair.rename_register("R", "R." + std::to_string(j));
        pair.rename_register("S", "S." + std::to_string(j));
        shared.add(std::move(pair), {{"R." + std::to_string(j), "A0"}, {"S." + std::to_string(j), "A1"}});
    }
    RegisterView a0(shared, "A0");
    RegisterView a1(shared, "A1");
    a0.split("psi", "psi");
    BitString k0 = BitString::zeros(0), k1 = BitString::zeros(0);
    for (unsigned j = 0; j < 5; ++j) {
        auto [x, z] = a0.teleport("psi." + std::to_string(j), "R." + std::to_string(j), rng);
        k0 = k0.concat(x);
        k1 = k1.concat(z);
        // Remaining source qubits plus the remote halves received so far.
        EXPECT_EQ(shared.factor("S." + std::to_string(j)).qubits(), 5u);
    }
    EXPECT_TRUE(a0.registers().empty());
    a1.merge({"S.0", "S.1", "S.2", "S.3", "S.4"}, "S");
    auto& remote = shared.factor("S");
    remote.apply_x("S", k0);
    remote.apply_z("S", k1);
    std::complex<double> overlap = 0;
    for (std::size_t i = 0; i < 32; ++i) overlap += std::conj(psi.amplitude(i)) * remote.amplitude(i);
    EXPECT_NEAR(std::abs(overlap), 1.0, 1e-12);
}
