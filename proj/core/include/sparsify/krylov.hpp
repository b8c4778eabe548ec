#pragma once

#include <functional>
#include <limits>
#include <string>
#include <span>
#include <vector>

#include "sparsify/errors.hpp"
#include "sparsify/problem.hpp"
#include "sparsify/sparse_matrix.hpp"
#include "sparsify/sparse_solver.hpp"
#include "sparsify/spectral.hpp"

namespace sparsify {

struct IterationReport {
  /// n_p: number of GMRES iterations (one operator application each).
  int iterations = 0;
  /// Relative preconditioned residual after each iteration.
  std::vector<double> residual_history;
  /// ||(L - s + q) u - f|| / ||f|| of the returned iterate; NaN until known.
  double true_residual = std::numeric_limits<double>::quiet_NaN();
  /// T_a: median wall time of one preconditioner application.
  double apply_seconds = 0.0;
  /// T_p: wall time of the whole iterative solve.
  double solve_seconds = 0.0;
  bool converged = false;
};

using LinearOperator =
    std::function<void(std::span<const double>, std::span<double>)>;

struct GmresOptions {
  double tol = 1e-6;
  int max_iter = 200;
};

struct GmresResult {
  std::vector<double> solution;
  IterationReport report;
};

/// GMRES stopped at max_iter; carries the last (best) iterate.
class MaxIterExceeded : public Error {
 public:
  MaxIterExceeded(const std::string& what, GmresResult best)
      : Error(what), best_(std::move(best)) {}
  const GmresResult& best() const { return best_; }

 private:
  GmresResult best_;
};

/// Full (unrestarted) GMRES from a zero initial guess with modified
/// Gram-Schmidt and one reorthogonalization pass when a new basis vector
/// keeps more than 1e-8 of its projection on the old ones. Stops when
/// ||b - A x|| <= tol ||b||.
GmresResult gmres(const LinearOperator& op, std::span<const double> rhs,
                  const GmresOptions& options = {});

/// The integral operator A v = v + G (q .* v) with a cached transform.
class IntegralOperator {
 public:
  explicit IntegralOperator(const SplitProblem& problem);
  void apply(std::span<const double> v, std::span<double> out);
  /// g = G f.
  std::vector<double> green(std::span<const double> f);
  ShiftedLaplacian& spectral() { return spectral_; }

 private:
  ShiftedLaplacian spectral_;
  std::vector<double> q_;
  std::vector<double> scratch_;
};

std::vector<double> apply_A(const SplitProblem& problem,
                            std::span<const double> v);

/// P^{-1} Q v.
void apply_M(const Factorization& fact, const SparseMatrix& Q,
             std::span<const double> v, std::span<double> out);
std::vector<double> apply_M(const Factorization& fact, const SparseMatrix& Q,
                            std::span<const double> v);

/// ||(L - s + q) u - f|| / ||f||, evaluated with the pseudospectral Laplacian.
double true_relative_residual(const SplitProblem& problem,
                              std::span<const double> u);

}  // namespace sparsify
