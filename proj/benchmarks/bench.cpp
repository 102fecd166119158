#include <benchmark/benchmark.h>

#include "adhm/f2.hpp"
#include "adhm/flow.hpp"
#include "adhm/moment.hpp"
#include "adhm/series.hpp"
#include "adhm/strata.hpp"
#include "adhm/vortex.hpp"

using namespace adhm;

namespace {

void BM_mu_quaternionic(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  RandomStream rs(11);
  ADHMConfig c = random_config(2, k, rs);
  for (auto _ : state) {
    MomentValue m = mu_quaternionic(c);
    benchmark::DoNotOptimize(m.mi(0, 0));
  }
}
BENCHMARK(BM_mu_quaternionic)->Arg(2)->Arg(6)->Arg(12);

void BM_flow_gradient(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  RandomStream rs(12);
  ADHMConfig c = random_config(1, k, rs);
  for (auto _ : state) {
    FlowGradient g = flow_gradient(c);
    benchmark::DoNotOptimize(g.a(0, 0));
  }
}
BENCHMARK(BM_flow_gradient)->Arg(2)->Arg(6)->Arg(12);

void BM_minimize_mu(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  RandomStream rs(13);
  ADHMConfig c0 = random_config(1, k, rs);
  double n = c0.norm();
  c0.v /= n;
  c0.w /= n;
  c0.A /= n;
  c0.B /= n;
  for (auto _ : state) {
    FlowResult r = minimize_mu(c0, 1e-10, 20000, 77);
    benchmark::DoNotOptimize(r.final_mu_norm);
  }
}
BENCHMARK(BM_minimize_mu)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_joint_spectrum(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  RandomStream rs(14);
  Partition p;
  p.push_back(k - k / 2);
  for (int i = 0; i < k / 2; ++i) p.push_back(1);
  std::vector<std::array<double, 4>> vals(p.size());
  for (auto& v : vals)
    for (auto& x : v) x = rs.normal();
  XiQuaternionic xi = xi_with_spectrum(p, vals, random_unitary(k, rs));
  for (auto _ : state) {
    SpectrumPoint sp = joint_spectrum(xi, 1e-8);
    benchmark::DoNotOptimize(sp.values[0][0]);
  }
}
BENCHMARK(BM_joint_spectrum)->Arg(3)->Arg(5);

void BM_f2_rank(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  F2Matrix m(n, n);
  uint64_t s = 5;
  for (auto& w : m.bits) w = splitmix64(s);
  for (auto _ : state) {
    int r = f2_rank(m);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_f2_rank)->Arg(64)->Arg(256)->Arg(1024);

void BM_sw_series(benchmark::State& state) {
  for (auto _ : state) {
    LaurentSeries s = sw_series(6, -10, 10);
    benchmark::DoNotOptimize(s.coeff(0));
  }
}
BENCHMARK(BM_sw_series);

VortexState bench_state(int n, int degree, double lambda) {
  TorusGrid g = make_grid(n, degree);
  VortexState s = constant_state(g, std::abs(lambda));
  RandomStream rs(15);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      s.a1(i, j) += 0.01 * rs.normal();
      s.a2(i, j) += 0.01 * rs.normal();
      s.psi1(i, j) += 0.01 * rs.cnormal();
      s.psi2(i, j) += 0.01 * rs.cnormal();
    }
  return s;
}

void BM_vortex_residual(benchmark::State& state) {
  VortexState s = bench_state(static_cast<int>(state.range(0)), 0, 1.0);
  for (auto _ : state) {
    VortexResidual r = vortex_residual(s);
    benchmark::DoNotOptimize(r.total);
  }
}
BENCHMARK(BM_vortex_residual)->Arg(16)->Arg(64);

void BM_vortex_energy_gradient(benchmark::State& state) {
  VortexState s = bench_state(static_cast<int>(state.range(0)), 0, 1.0);
  for (auto _ : state) {
    VortexGradient g = vortex_energy_gradient(s);
    benchmark::DoNotOptimize(g.a1(0, 0));
  }
}
BENCHMARK(BM_vortex_energy_gradient)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
