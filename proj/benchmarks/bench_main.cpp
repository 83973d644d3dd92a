#include <benchmark/benchmark.h>

#include "posverif/adversary/adversary.hpp"
#include "posverif/nonlocal/game.hpp"
#include "posverif/protocol/prpv.hpp"
#include "posverif/puzzle/repeated.hpp"
#include "posverif/qsim/state_vector.hpp"

using namespace posverif;

namespace {

protocol::PRPVConfig config(unsigned n, unsigned k) {
    protocol::PRPVConfig c;
    c.n = n;
    c.k = k;
    return c;
}

void BM_Hadamard(benchmark::State& state) {
    const auto q = static_cast<unsigned>(state.range(0));
    auto sv = qsim::new_state({{"r", q}});
    for (auto _ : state) {
        sv.apply_hadamard("r");
        benchmark::DoNotOptimize(sv.amplitude(0));
    }
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << q));
}
BENCHMARK(BM_Hadamard)->Arg(8)->Arg(12)->Arg(16)->Arg(20);

void BM_Teleport(benchmark::State& state) {
    const auto w = static_cast<unsigned>(state.range(0));
    SplitMix64 rng(1);
    const auto base = qsim::tensor(qsim::new_state({{"psi", w}}), qsim::make_epr_pairs(w));
    for (auto _ : state) benchmark::DoNotOptimize(qsim::teleport(base, "psi", "R", rng).k0);
}
BENCHMARK(BM_Teleport)->Arg(1)->Arg(3)->Arg(5);

void BM_ObligateSolve(benchmark::State& state) {
    const auto n = static_cast<unsigned>(state.range(0));
    SplitMix64 rng(2);
    const auto [pk, td] = puzzle::keygen(n, rng);
    for (auto _ : state) {
        auto ob = puzzle::obligate(pk, td, rng);
        benchmark::DoNotOptimize(puzzle::solve(pk, ob.y, std::move(ob.state), rng.coin(), rng));
    }
}
BENCHMARK(BM_ObligateSolve)->Arg(4)->Arg(8)->Arg(12);

void BM_PrpvTrial(benchmark::State& state) {
    const auto cfg = config(8, static_cast<unsigned>(state.range(0)));
    const auto prover = protocol::honest_prover(cfg);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        SplitMix64 rng(seed++);
        benchmark::DoNotOptimize(protocol::run_prpv(cfg, prover, rng).verdict.accept);
    }
}
BENCHMARK(BM_PrpvTrial)->Arg(1)->Arg(4)->Arg(16);

void BM_NonlocalGame(benchmark::State& state) {
    const auto strategy = nonlocal::make_strategy("measure_and_guess");
    SplitMix64 rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(nonlocal::play_nonlocal(8, *strategy, rng).win);
}
BENCHMARK(BM_NonlocalGame);

void BM_TeleportAttackTrial(benchmark::State& state) {
    const auto k = static_cast<unsigned>(state.range(0));
    const auto attack = adversary::teleport_attack(8, k);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        SplitMix64 rng(seed++);
        benchmark::DoNotOptimize(adversary::run_attack(config(8, k), attack, rng).result.verdict.accept);
    }
}
BENCHMARK(BM_TeleportAttackTrial)->Arg(1)->Arg(2);

}  // namespace
BENCHMARK_MAIN();
