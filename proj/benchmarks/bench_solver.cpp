#include "hypflux/diagnostics.hpp"
#include "hypflux/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace hypflux;

namespace {

State s1(double a) { return State::Constant(1, a); }

StateField sine_field(const Mesh& m) {
  StateField f;
  f.mesh_id = m.id();
  for (const Cell& c : m.cells())
    f.values.push_back(s1(0.5 + 0.25 * std::sin(6.283185307179586 * (c.centroid[0] + c.centroid[1]))));
  return f;
}

void BM_RusanovFlux(benchmark::State& st) {
  auto sys = make_burgers(AdmissibleSet::box(s1(-1), s1(1)));
  auto r = make_rusanov(sys, 0.0);
  const State u = s1(0.2), v = s1(-0.4);
  for (auto _ : st) benchmark::DoNotOptimize(r->evaluate(u, v, Vec2(1, 0)));
}
BENCHMARK(BM_RusanovFlux);

void BM_GodunovFlux(benchmark::State& st) {
  auto sys = make_burgers(AdmissibleSet::box(s1(-1), s1(1)));
  auto g = make_godunov_scalar(sys);
  const State u = s1(-0.2), v = s1(0.4);
  for (auto _ : st) benchmark::DoNotOptimize(g->evaluate(u, v, Vec2(1, 0)));
}
BENCHMARK(BM_GodunovFlux);

void BM_Step1D(benchmark::State& st) {
  const Mesh m = build_uniform_1d(static_cast<int>(st.range(0)), 1.0);
  auto sys = make_burgers(AdmissibleSet::box(s1(0.2), s1(0.8)));
  auto r = make_rusanov(sys, 0.0);
  const StateField f = sine_field(m);
  const double dt = cfl_time_step(m, *r, CflMode::Strengthened, 0.1);
  for (auto _ : st) benchmark::DoNotOptimize(step(m, *r, f, dt, true, 0));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_Step1D)->Arg(256)->Arg(4096);

void BM_Step2D(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const int workers = static_cast<int>(st.range(1));
  const Mesh m = build_perturbed_quad_2d(n, n, 1.0, 1.0, 0.2, 1);
  auto sys = make_advection(2, {1.0, 0.5}, AdmissibleSet::box(s1(0.2), s1(0.8)));
  auto r = make_rusanov(sys, 0.0);
  const StateField f = sine_field(m);
  const double dt = cfl_time_step(m, *r, CflMode::Strengthened, 0.1);
  for (auto _ : st) benchmark::DoNotOptimize(step(m, *r, f, dt, true, 0, nullptr, workers));
  st.SetItemsProcessed(st.iterations() * n * n);
}
BENCHMARK(BM_Step2D)->Args({128, 1})->Args({128, 4});

void BM_StepWithDiagnostics(benchmark::State& st) {
  const Mesh m = build_uniform_1d(1024, 1.0);
  auto sys = make_burgers(AdmissibleSet::box(s1(0.2), s1(0.8)));
  auto r = make_rusanov(sys, 0.0);
  const StateField f = sine_field(m);
  const double dt = cfl_time_step(m, *r, CflMode::Strengthened, 0.1);
  std::vector<InterfaceFluxRecord> rec;
  for (auto _ : st) {
    DiagnosticsLedger L;
    const StateField g = step(m, *r, f, dt, true, 0, &rec);
    accumulate_step(L, m, *r, f, g, rec, dt);
    benchmark::DoNotOptimize(L.wbv_sq);
  }
}
BENCHMARK(BM_StepWithDiagnostics);

}  // namespace

BENCHMARK_MAIN();
