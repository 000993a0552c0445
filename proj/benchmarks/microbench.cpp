// Hot-path microbenchmarks.  Populations are initialized at the model's
// stationary density so the timed event mix is the one production runs see.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "migsim/configuration.hpp"
#include "migsim/dynamics.hpp"
#include "migsim/kernel.hpp"
#include "migsim/kinetic.hpp"
#include "migsim/ktransform.hpp"
#include "migsim/model.hpp"
#include "migsim/rng.hpp"

using namespace migsim;

namespace {

ModelParams noninteracting_model(double side) {
  ModelParams m;
  m.window = TorusWindow{side, 2};
  m.a_plus = Kernel::tophat(0.0, 1.0, 2);
  m.a_minus = Kernel::tophat(0.0, 1.0, 2);
  m.b_plus = Background::constant(0.25);
  m.b_minus = Background::constant(1.0);
  return m;
}

ModelParams interacting_model(double side) {
  ModelParams m;
  m.window = TorusWindow{side, 2};
  m.a_plus = Kernel::gaussian(0.5, 0.4, 2);
  m.a_minus = Kernel::tophat(0.8, 0.6, 2);
  m.b_plus = Background::constant(0.2);
  m.b_minus = Background::constant(0.4);
  return m;
}

void warm_up(Simulator& sim, int events) {
  for (int i = 0; i < events; ++i) benchmark::DoNotOptimize(sim.step());
}

void BM_StepNoninteracting(benchmark::State& state) {
  const double side = static_cast<double>(state.range(0));
  Simulator sim(noninteracting_model(side), 0xbe7c4001u);
  sim.initialize(PoissonInit{0.25});
  warm_up(sim, 2000);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
  state.SetItemsProcessed(state.iterations());
  state.counters["population"] = static_cast<double>(sim.config().size());
}
BENCHMARK(BM_StepNoninteracting)->Arg(10)->Arg(20)->Arg(40);

void BM_StepInteracting(benchmark::State& state) {
  const double side = static_cast<double>(state.range(0));
  Simulator sim(interacting_model(side), 0xbe7c4002u);
  sim.initialize(PoissonInit{0.4});
  warm_up(sim, 2000);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
  state.SetItemsProcessed(state.iterations());
  state.counters["population"] = static_cast<double>(sim.config().size());
}
BENCHMARK(BM_StepInteracting)->Arg(8)->Arg(16)->Arg(32);

void BM_NeighborQuery(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const double side = std::sqrt(static_cast<double>(n));  // density 1
  const double radius = 1.0;
  Configuration cfg(TorusWindow{side, 2}, radius);
  Rng rng(0xbe7c4003u);
  for (std::size_t i = 0; i < n; ++i) {
    cfg.insert({rng.uniform(0.0, side), rng.uniform(0.0, side)});
  }
  std::vector<Configuration::Neighbor> out;
  for (auto _ : state) {
    const Position q{rng.uniform(0.0, side), rng.uniform(0.0, side)};
    cfg.neighbors_within(q, radius, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NeighborQuery)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_AuditRates(benchmark::State& state) {
  const double side = static_cast<double>(state.range(0));
  Simulator sim(interacting_model(side), 0xbe7c4004u);
  sim.initialize(PoissonInit{0.4});
  warm_up(sim, 1000);
  for (auto _ : state) sim.audit(1e-9);
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(sim.config().size()));
  state.counters["population"] = static_cast<double>(sim.config().size());
}
BENCHMARK(BM_AuditRates)->Arg(8)->Arg(16)->Arg(32);

void BM_RadialSample(benchmark::State& state) {
  const Kernel k = Kernel::gaussian(0.7, 0.5, 2);
  Rng rng(0xbe7c4005u);
  for (auto _ : state) benchmark::DoNotOptimize(k.sample_radius(rng.uniform()));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RadialSample);

void BM_Convolve2d(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  const double side = 16.0;
  const Kernel k = Kernel::gaussian(0.7, 0.5, 2);
  KernelLattice lat(k, 2, nodes, side);
  Rng rng(0xbe7c4006u);
  DensityField f = DensityField::constant(2, nodes, side, 0.0);
  for (auto& v : f.values) v = rng.uniform(0.05, 2.0);
  DensityField out = f;
  for (auto _ : state) {
    lat.convolve(f, out);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.size()));
}
BENCHMARK(BM_Convolve2d)->RangeMultiplier(2)->Range(32, 256);

void BM_KineticRhs(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  KineticSolver solver(interacting_model(16.0), nodes);
  Rng rng(0xbe7c4007u);
  DensityField rho = DensityField::constant(2, nodes, 16.0, 0.0);
  for (auto& v : rho.values) v = rng.uniform(0.05, 1.0);
  DensityField out = rho;
  for (auto _ : state) {
    solver.rhs(rho, out);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rho.size()));
}
BENCHMARK(BM_KineticRhs)->Arg(64)->Arg(128);

void BM_KTransform(benchmark::State& state) {
  const std::size_t n_pts = static_cast<std::size_t>(state.range(0));
  Box support;
  support.lo = {0.0, 0.0};
  support.hi = {4.0, 4.0};
  std::vector<FiniteFunction::Component> comps(3);
  comps[0] = [](std::span<const Position>) { return 0.3; };
  comps[1] = [](std::span<const Position> p) {
    return 0.5 + 0.2 * std::sin(p[0][0]);
  };
  comps[2] = [](std::span<const Position> p) {
    const double dx = p[0][0] - p[1][0];
    const double dy = p[0][1] - p[1][1];
    return std::exp(-(dx * dx + dy * dy));
  };
  const FiniteFunction G(2, 2, support, 2.0, std::move(comps));
  Rng rng(0xbe7c4008u);
  std::vector<Position> gamma(n_pts);
  for (auto& p : gamma) p = {rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(k_transform(G, gamma));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KTransform)->Arg(8)->Arg(16)->Arg(24);

}  // namespace

BENCHMARK_MAIN();
