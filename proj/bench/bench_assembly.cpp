// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <memory>
#include <optional>

#include <benchmark/benchmark.h>

#include "mxfem/assembly.hpp"

using namespace mxfem;

namespace
{

struct Case
{
  Mesh mesh;
  std::optional<FeSpace> space;
};

const FeSpace &space_for(int n, int p)
{
  static std::map<std::pair<int, int>, std::unique_ptr<Case>> cache;
  auto &c = cache[{n, p}];
  if (!c)
  {
    c = std::make_unique<Case>(Case{generate_cube_mesh(n), std::nullopt});
    c->space.emplace(build_fe_space(c->mesh, Family::nedelec1, p, BoundaryCondition::pec));
  }
  return *c->space;
}

void assemble(benchmark::State &state, ExecutionMode mode, const std::string &coeff)
{
  const FeSpace &space = space_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const CoefficientSet c = make_coefficients(coeff, build_pml_profile(0.7853981633974483, 0.25, 0.45));
  for (auto _ : state)
  {
    LinearSystem sys = assemble_system(space, c.mu_inv, c.eps, 5.0, mode);
    benchmark::DoNotOptimize(sys.P.valuePtr());
  }
  state.counters["dofs"] = space.num_free();
}

void BM_AssembleSerial(benchmark::State &state)
{
  assemble(state, ExecutionMode::serial, "identity");
}

void BM_AssembleParallel(benchmark::State &state)
{
  assemble(state, ExecutionMode::parallel, "identity");
}

void BM_AssemblePmlSerial(benchmark::State &state)
{
  assemble(state, ExecutionMode::serial, "pml");
}

void BM_AssemblePmlParallel(benchmark::State &state)
{
  assemble(state, ExecutionMode::parallel, "pml");
}

}  // namespace

BENCHMARK(BM_AssembleSerial)->Args({8, 1})->Args({16, 1})->Args({8, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Args({8, 1})->Args({16, 1})->Args({8, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssemblePmlSerial)->Args({8, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssemblePmlParallel)->Args({8, 2})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
