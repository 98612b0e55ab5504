#include <benchmark/benchmark.h>

#include <random>

#include "pulsesynth/grape.hpp"
#include "pulsesynth/selftest.hpp"

namespace ps = pulsesynth;

namespace {

ps::SpinSystem chain(int n) { return ps::SpinSystem(ps::make_topology(ps::TopologyKind::Chain, n)); }

// One slice propagator and its Frechet derivative along a control direction.
void BM_ExpmI(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const ps::HermitianOperator h(ps::random_hermitian(Eigen::Index{1} << state.range(0), rng));
  for (auto _ : state) benchmark::DoNotOptimize(ps::expm_i(h, 0.025).matrix.data());
}
BENCHMARK(BM_ExpmI)->DenseRange(1, 4);

void BM_DexpmI(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Eigen::Index dim = Eigen::Index{1} << state.range(0);
  const ps::HermitianOperator h(ps::random_hermitian(dim, rng));
  const ps::HermitianOperator v(ps::random_hermitian(dim, rng));
  for (auto _ : state) benchmark::DoNotOptimize(ps::dexpm_i(h, v, 0.025).data());
}
BENCHMARK(BM_DexpmI)->DenseRange(1, 4);

// Full-sequence work at the default slice count for T = 2.
void BM_ForwardPropagate(benchmark::State& state) {
  const auto sys = chain(static_cast<int>(state.range(0)));
  const auto seq = ps::random_sequence(sys, 2.0, ps::default_slice_count(2.0), 0.1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(ps::forward_propagate(seq, sys).back().data());
}
BENCHMARK(BM_ForwardPropagate)->DenseRange(2, 4);

void BM_GradientPsu(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sys = chain(n);
  const auto seq = ps::random_sequence(sys, 2.0, ps::default_slice_count(2.0), 0.1, 4);
  const auto gate = ps::qft(n);
  for (auto _ : state) benchmark::DoNotOptimize(ps::gradient_psu(seq, sys, gate).data());
}
BENCHMARK(BM_GradientPsu)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_GradientSu(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sys = chain(n);
  const auto seq = ps::random_sequence(sys, 2.0, ps::default_slice_count(2.0), 0.1, 5);
  const auto gate = ps::qft(n).with_phase_mode(ps::PhaseMode::fixed(ps::phase_family(ps::qft(n)).phi0));
  for (auto _ : state) benchmark::DoNotOptimize(ps::gradient_su(seq, sys, gate).data());
}
BENCHMARK(BM_GradientSu)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

// 50 ascent iterations on the 3-qubit QFT, line search included.
void BM_Ascend50(benchmark::State& state) {
  const auto sys = chain(3);
  ps::OptimizationConfig cfg;
  cfg.max_iterations = 50;
  const auto init = ps::random_sequence(sys, 2.05, ps::default_slice_count(2.05), 0.1, 6);
  for (auto _ : state) benchmark::DoNotOptimize(ps::ascend(sys, ps::qft(3), init, cfg).fidelity);
}
BENCHMARK(BM_Ascend50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
