#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "opgfn/env/factory.hpp"
#include "opgfn/gfn/composite.hpp"
#include "opgfn/metrics/indicators.hpp"
#include "opgfn/train/sampler.hpp"

using namespace opgfn;

namespace {

std::vector<std::vector<double>> simplex_front(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::gamma_distribution<double> gam(1.0, 1.0);
    std::vector<std::vector<double>> out(n, std::vector<double>(d));
    for (auto& p : out) {
        double s = 0.0;
        for (auto& v : p) { s += (v = gam(g)); }
        for (auto& v : p) { v /= s; }
    }
    return out;
}

void BM_Hypervolume(benchmark::State& state) {
    auto const d = static_cast<std::size_t>(state.range(0));
    auto const front = simplex_front(static_cast<std::size_t>(state.range(1)), d, 1);
    std::vector<double> const ref(d, 0.0);
    for (auto _ : state) { benchmark::DoNotOptimize(metrics::hypervolume(front, ref)); }
}
BENCHMARK(BM_Hypervolume)->Args({2, 1000})->Args({3, 100})->Args({3, 400})->Args({4, 50});

std::unique_ptr<env::Environment> grid(int side) {
    env::EnvSpec s;
    s.kind = env::EnvKind::hypergrid;
    s.dim = 2;
    s.side = side;
    return env::make_environment(s);
}

void BM_SampleTrajectory(benchmark::State& state) {
    auto const e = grid(static_cast<int>(state.range(0)));
    gfn::ModelSpec ms;
    gfn::FlowModel m(*e, ms, gfn::BackwardMode::uniform);
    std::mt19937_64 g(3);
    for (auto _ : state) { benchmark::DoNotOptimize(train::sample_trajectory(*e, m, {}, g)); }
}
BENCHMARK(BM_SampleTrajectory)->Arg(8)->Arg(32);

void BM_CompositeLossBackward(benchmark::State& state) {
    auto const e = grid(8);
    gfn::ModelSpec ms;
    gfn::FlowModel m(*e, ms, gfn::BackwardMode::uniform);
    std::mt19937_64 g(5);
    std::vector<gfn::Trajectory> batch;
    for (int i = 0; i < state.range(0); ++i) { batch.push_back(train::sample_trajectory(*e, m, {}, g)); }
    gfn::LossConfig c;
    c.order_preserving = true;
    for (auto _ : state) {
        ad::Tape tape(m.params());
        auto const loss = gfn::composite_loss(tape, m, batch, c).total;
        benchmark::DoNotOptimize(tape.backward(loss));
    }
}
BENCHMARK(BM_CompositeLossBackward)->Arg(16)->Arg(128);

} // namespace
BENCHMARK_MAIN();
