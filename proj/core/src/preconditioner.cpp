#include "sparsify/preconditioner.hpp"

#include <algorithm>
#include <chrono>

namespace sparsify {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Median of five applications of `fn`.
template <typename Fn>
double median_time(Fn&& fn) {
  std::vector<double> samples;
  for (int i = 0; i < 5; ++i) {
    const auto t0 = Clock::now();
    fn();
    samples.push_back(seconds_since(t0));
  }
  std::nth_element(samples.begin(), samples.begin() + 2, samples.end());
  return samples[2];
}

}  // namespace

Preconditioner build_preconditioner(const SplitProblem& problem) {
  Preconditioner pre;
  const auto t_start = Clock::now();

  auto t0 = Clock::now();
  pre.kernel = green_kernel(problem.grid, problem.shift);
  pre.partition = build_partition(problem.grid);
  pre.tree = separator_tree(pre.partition);
  pre.timings.kernel = seconds_since(t0);

  t0 = Clock::now();
  pre.stencils = compute_stencils(pre.kernel, pre.partition);
  pre.timings.stencils = seconds_since(t0);

  t0 = Clock::now();
  pre.Q = assemble_Q(pre.partition, pre.stencils);
  pre.C = assemble_C(pre.partition, pre.stencils, pre.kernel);
  pre.P = assemble_P(pre.Q, pre.C, problem.q);
  pre.timings.assembly = seconds_since(t0);

  t0 = Clock::now();
  const SymbolicPlan plan = symbolic_factor(pre.P, pre.tree);
  pre.factorization = numeric_factor(pre.P, plan);
  pre.timings.factorization = seconds_since(t0);

  pre.timings.total = seconds_since(t_start);
  return pre;
}

SystemSolution solve_system(const SplitProblem& problem,
                            const Preconditioner& pre,
                            const GmresOptions& options) {
  IntegralOperator a(problem);
  const std::vector<double> g = a.green(problem.f);
  std::vector<double> rhs(g.size());
  pre.apply(g, rhs);

  std::vector<double> scratch(g.size());
  const LinearOperator op = [&](std::span<const double> v, std::span<double> out) {
    a.apply(v, scratch);
    pre.apply(scratch, out);
  };

  std::vector<double> probe(g.size());
  const double apply_seconds = median_time([&] { pre.apply(g, probe); });

  SystemSolution sol;
  try {
    GmresResult res = gmres(op, rhs, options);
    sol.u = std::move(res.solution);
    sol.report = std::move(res.report);
  } catch (const MaxIterExceeded& e) {
    GmresResult best = e.best();
    best.report.apply_seconds = apply_seconds;
    best.report.true_residual = true_relative_residual(problem, best.solution);
    throw MaxIterExceeded(e.what(), std::move(best));
  }
  sol.report.apply_seconds = apply_seconds;
  sol.report.true_residual = true_relative_residual(problem, sol.u);
  return sol;
}

SystemSolution solve_unpreconditioned(const SplitProblem& problem,
                                      const GmresOptions& options) {
  IntegralOperator a(problem);
  const std::vector<double> g = a.green(problem.f);
  const LinearOperator op = [&](std::span<const double> v, std::span<double> out) {
    a.apply(v, out);
  };
  SystemSolution sol;
  try {
    GmresResult res = gmres(op, g, options);
    sol.u = std::move(res.solution);
    sol.report = std::move(res.report);
  } catch (const MaxIterExceeded& e) {
    GmresResult best = e.best();
    best.report.true_residual = true_relative_residual(problem, best.solution);
    throw MaxIterExceeded(e.what(), std::move(best));
  }
  sol.report.true_residual = true_relative_residual(problem, sol.u);
  return sol;
}

}  // namespace sparsify
