#pragma once

#include <span>
#include <vector>

#include "sparsify/krylov.hpp"
#include "sparsify/partition.hpp"
#include "sparsify/problem.hpp"
#include "sparsify/sparse_matrix.hpp"
#include "sparsify/sparse_solver.hpp"
#include "sparsify/sparsifier.hpp"
#include "sparsify/spectral.hpp"

namespace sparsify {

struct SetupTimings {
  double kernel = 0.0;
  double stencils = 0.0;
  double assembly = 0.0;
  double factorization = 0.0;
  /// T_s: stencils + assembly + factorization (plus kernel and partition).
  double total = 0.0;
};

/// Everything needed to apply u <- P^{-1} Q g for one (grid, s, q).
struct Preconditioner {
  GreensKernel kernel;
  Partition partition;
  SeparatorTree tree;
  StencilSet stencils;
  SparseMatrix Q;
  SparseMatrix C;
  SparseMatrix P;
  Factorization factorization;
  SetupTimings timings;

  void apply(std::span<const double> v, std::span<double> out) const {
    apply_M(factorization, Q, v, out);
  }
};

Preconditioner build_preconditioner(const SplitProblem& problem);

struct SystemSolution {
  std::vector<double> u;
  IterationReport report;
};

/// GMRES on P^{-1} Q (I + G q) u = P^{-1} Q G f. Propagates MaxIterExceeded
/// (with the true residual filled in).
SystemSolution solve_system(const SplitProblem& problem,
                            const Preconditioner& pre,
                            const GmresOptions& options = {});

/// GMRES on (I + G q) u = G f without a preconditioner.
SystemSolution solve_unpreconditioned(const SplitProblem& problem,
                                      const GmresOptions& options = {});

}  // namespace sparsify
