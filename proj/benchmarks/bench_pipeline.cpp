#include <benchmark/benchmark.h>

#include "sparsify/preconditioner.hpp"

namespace {

using namespace sparsify;

// Arguments: n, b. Helmholtz at three points per wavelength.
SplitProblem problem_for(const benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int b = static_cast<int>(state.range(1));
  MediaSpec media;
  media.omega_over_2pi = n / 3.0;
  return build_helmholtz(GridSpec(2, n, b), media);
}

void BM_ApplyGreen(benchmark::State& state) {
  const SplitProblem p = problem_for(state);
  ShiftedLaplacian op(p.grid, p.shift);
  std::vector<double> out(p.f.size());
  for (auto _ : state) {
    op.apply_green(p.f, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * p.grid.size());
}

void BM_Stencils(benchmark::State& state) {
  const SplitProblem p = problem_for(state);
  const GreensKernel kernel = green_kernel(p.grid, p.shift);
  const Partition partition = build_partition(p.grid);
  for (auto _ : state) benchmark::DoNotOptimize(compute_stencils(kernel, partition));
}

void BM_Factorization(benchmark::State& state) {
  const SplitProblem p = problem_for(state);
  const Preconditioner pre = build_preconditioner(p);
  const SymbolicPlan plan = symbolic_factor(pre.P, pre.tree);
  for (auto _ : state) benchmark::DoNotOptimize(numeric_factor(pre.P, plan));
  state.counters["factor_entries"] = static_cast<double>(plan.factor_entries);
  state.counters["peak_front"] = static_cast<double>(plan.peak_front);
}

void BM_PreconditionerApply(benchmark::State& state) {
  const SplitProblem p = problem_for(state);
  const Preconditioner pre = build_preconditioner(p);
  std::vector<double> out(p.f.size());
  for (auto _ : state) {
    pre.apply(p.f, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Solve(benchmark::State& state) {
  const SplitProblem p = problem_for(state);
  const Preconditioner pre = build_preconditioner(p);
  int iterations = 0;
  for (auto _ : state) {
    const SystemSolution sol = solve_system(p, pre);
    iterations = sol.report.iterations;
  }
  state.counters["n_p"] = iterations;
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({48, 3})->Args({96, 6})->Args({192, 6})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_ApplyGreen)->Apply(sizes);
BENCHMARK(BM_Stencils)->Apply(sizes);
BENCHMARK(BM_Factorization)->Apply(sizes);
BENCHMARK(BM_PreconditionerApply)->Apply(sizes);
BENCHMARK(BM_Solve)->Apply(sizes);
BENCHMARK_MAIN();
