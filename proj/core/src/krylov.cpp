#include "sparsify/krylov.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>

namespace sparsify {

namespace {

using Eigen::Map;
using Eigen::VectorXd;

constexpr double kReorthTrigger = 1e-8;

Map<const VectorXd> view(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

GmresResult gmres(const LinearOperator& op, std::span<const double> rhs,
                  const GmresOptions& options) {
  const auto n = static_cast<Eigen::Index>(rhs.size());
  const auto start = std::chrono::steady_clock::now();
  GmresResult result;
  result.solution.assign(rhs.size(), 0.0);

  const double beta = view(rhs).norm();
  if (beta == 0.0) {
    result.report.converged = true;
    return result;
  }

  const int m = std::max(1, options.max_iter);
  std::vector<VectorXd> basis;
  basis.reserve(static_cast<std::size_t>(m) + 1);
  basis.push_back(view(rhs) / beta);

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
  VectorXd cs = VectorXd::Zero(m);
  VectorXd sn = VectorXd::Zero(m);
  VectorXd g = VectorXd::Zero(m + 1);
  g(0) = beta;

  VectorXd w(n);
  int k = 0;
  bool done = false;
  while (k < m && !done) {
    op(std::span<const double>(basis.back().data(), rhs.size()),
       std::span<double>(w.data(), rhs.size()));
    for (int i = 0; i <= k; ++i) {
      h(i, k) = basis[static_cast<std::size_t>(i)].dot(w);
      w.noalias() -= h(i, k) * basis[static_cast<std::size_t>(i)];
    }
    double wnorm = w.norm();
    if (wnorm > 0.0) {
      double loss = 0.0;
      for (int i = 0; i <= k; ++i) {
        loss = std::max(loss, std::abs(basis[static_cast<std::size_t>(i)].dot(w)));
      }
      if (loss > kReorthTrigger * wnorm) {
        for (int i = 0; i <= k; ++i) {
          const double c = basis[static_cast<std::size_t>(i)].dot(w);
          h(i, k) += c;
          w.noalias() -= c * basis[static_cast<std::size_t>(i)];
        }
        wnorm = w.norm();
      }
    }
    h(k + 1, k) = wnorm;

    for (int i = 0; i < k; ++i) {
      const double a = h(i, k);
      const double b = h(i + 1, k);
      h(i, k) = cs(i) * a + sn(i) * b;
      h(i + 1, k) = -sn(i) * a + cs(i) * b;
    }
    const double a = h(k, k);
    const double b = h(k + 1, k);
    const double r = std::hypot(a, b);
    cs(k) = r == 0.0 ? 1.0 : a / r;
    sn(k) = r == 0.0 ? 0.0 : b / r;
    h(k, k) = r;
    h(k + 1, k) = 0.0;
    g(k + 1) = -sn(k) * g(k);
    g(k) = cs(k) * g(k);

    const double rel = std::abs(g(k + 1)) / beta;
    result.report.residual_history.push_back(rel);
    ++k;

    // Happy breakdown: the Krylov space is invariant, the solve is exact.
    const bool breakdown = wnorm <= 1e-14 * beta || wnorm == 0.0;
    if (rel <= options.tol || breakdown) {
      done = true;
    } else if (k < m) {
      basis.emplace_back(w / wnorm);
    }
  }

  VectorXd y = g.head(k);
  h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solveInPlace(y);
  Map<VectorXd> x(result.solution.data(), n);
  for (int i = 0; i < k; ++i) x.noalias() += y(i) * basis[static_cast<std::size_t>(i)];

  result.report.iterations = k;
  result.report.converged = done;
  result.report.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!done) {
    throw MaxIterExceeded("GMRES did not reach tol " + std::to_string(options.tol) +
                              " in " + std::to_string(m) + " iterations",
                          std::move(result));
  }
  return result;
}

IntegralOperator::IntegralOperator(const SplitProblem& problem)
    : spectral_(problem.grid, problem.shift),
      q_(problem.q),
      scratch_(problem.q.size()) {}

void IntegralOperator::apply(std::span<const double> v, std::span<double> out) {
  for (std::size_t i = 0; i < q_.size(); ++i) scratch_[i] = q_[i] * v[i];
  spectral_.apply_green(scratch_, scratch_);
  for (std::size_t i = 0; i < q_.size(); ++i) out[i] = v[i] + scratch_[i];
}

std::vector<double> IntegralOperator::green(std::span<const double> f) {
  std::vector<double> g(f.size());
  spectral_.apply_green(f, g);
  return g;
}

std::vector<double> apply_A(const SplitProblem& problem,
                            std::span<const double> v) {
  if (v.size() != problem.q.size()) {
    throw LengthMismatch("apply_A: vector length does not match the problem");
  }
  IntegralOperator op(problem);
  std::vector<double> out(v.size());
  op.apply(v, out);
  return out;
}

void apply_M(const Factorization& fact, const SparseMatrix& Q,
             std::span<const double> v, std::span<double> out) {
  const std::vector<double> qv = Q.multiply(v);
  fact.solve(qv, out);
}

std::vector<double> apply_M(const Factorization& fact, const SparseMatrix& Q,
                            std::span<const double> v) {
  std::vector<double> out(v.size());
  apply_M(fact, Q, v, out);
  return out;
}

double true_relative_residual(const SplitProblem& problem,
                              std::span<const double> u) {
  ShiftedLaplacian op(problem.grid, problem.shift);
  std::vector<double> r(u.size());
  op.apply_operator(problem.q, u, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= problem.f[i];
  const double fn = view(problem.f).norm();
  return view(r).norm() / (fn > 0.0 ? fn : 1.0);
}

}  // namespace sparsify
