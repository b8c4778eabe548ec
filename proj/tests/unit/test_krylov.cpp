#include <doctest.h>

#include "sparsify/errors.hpp"
#include "sparsify/krylov.hpp"
#include "sparsify/preconditioner.hpp"
#include "sparsify/reference.hpp"
#include "test_support.hpp"

using namespace sparsify;
using sparsify::testing::as_vec;
using sparsify::testing::random_field;
using sparsify::testing::rel_diff;

namespace {

LinearOperator dense_op(const Eigen::MatrixXd& a) {
  return [a](std::span<const double> v, std::span<double> out) {
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = a * as_vec(v);
  };
}

SplitProblem helmholtz(const GridSpec& grid, double w,
                       MediaKind kind = MediaKind::helmholtz_gaussian) {
  MediaSpec media;
  media.kind = kind;
  media.omega_over_2pi = w;
  return build_helmholtz(grid, media);
}

}  // namespace

TEST_CASE("GMRES on trivial operators") {
  const Field b = random_field(8, 1);
  const GmresResult eye = gmres(dense_op(Eigen::MatrixXd::Identity(8, 8)), b);
  CHECK(eye.report.iterations == 1);
  CHECK(eye.report.converged);
  CHECK(rel_diff(eye.solution, b) <= 1e-15);

  const GmresResult two = gmres(dense_op(2.0 * Eigen::MatrixXd::Identity(8, 8)), b);
  CHECK(two.report.iterations == 1);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(two.solution[i] == doctest::Approx(0.5 * b[i]));

  const GmresResult zero = gmres(dense_op(Eigen::MatrixXd::Identity(8, 8)), Field(8, 0.0));
  CHECK(zero.report.iterations == 0);
  CHECK(as_vec(zero.solution).norm() == 0.0);
}

TEST_CASE("GMRES on a small dense system") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(8, 8) + 4.0 * Eigen::MatrixXd::Identity(8, 8);
  const Field b = random_field(8, 2);
  const GmresResult r = gmres(dense_op(a), b, {.tol = 1e-12, .max_iter = 50});
  CHECK(r.report.iterations <= 8);
  const Eigen::VectorXd x = a.fullPivLu().solve(as_vec(b));
  CHECK((as_vec(r.solution) - x).norm() <= 1e-8 * x.norm());
  for (std::size_t k = 1; k < r.report.residual_history.size(); ++k)
    CHECK(r.report.residual_history[k] <= r.report.residual_history[k - 1] * (1.0 + 1e-12));
}

TEST_CASE("GMRES reports the iteration cap") {
  // Cyclic shift: GMRES makes no progress until the last step.
  const int n = 30;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a((i + 1) % n, i) = 1.0;
  Field b(n, 0.0);
  b[0] = 1.0;
  try {
    gmres(dense_op(a), b, {.tol = 1e-6, .max_iter = 10});
    FAIL("expected MaxIterExceeded");
  } catch (const MaxIterExceeded& e) {
    CHECK(e.best().report.iterations == 10);
    CHECK_FALSE(e.best().report.converged);
    CHECK(e.best().solution.size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("apply_A matches the dense integral operator") {
  const GridSpec grid(2, 8, 2);
  const SplitProblem p = helmholtz(grid, 1.7);
  const Field v = random_field(grid.size(), 3);
  const Field av = apply_A(p, v);
  const Eigen::MatrixXd g = reference::green(grid, p.shift);
  const Eigen::VectorXd dense = as_vec(v) + g * (as_vec(p.q).cwiseProduct(as_vec(v)));
  CHECK((as_vec(av) - dense).norm() <= 1e-12 * dense.norm());
  CHECK(as_vec(apply_A(p, Field(v.size(), 0.0))).norm() == 0.0);
  CHECK_THROWS_AS(apply_A(p, Field(3, 0.0)), LengthMismatch);

  const GridSpec g2(2, 16, 4);
  const SplitProblem c = helmholtz(g2, sparsify::testing::mid_gap_frequency(g2, 3.0),
                                   MediaKind::helmholtz_constant);
  const Field w = random_field(g2.size(), 4);
  CHECK(apply_A(c, w) == w);
}

TEST_CASE("apply_M is the identity when q == 0") {
  const GridSpec grid(2, 16, 4);
  const SplitProblem p = helmholtz(grid, sparsify::testing::mid_gap_frequency(grid, 3.0),
                                   MediaKind::helmholtz_constant);
  const Preconditioner pre = build_preconditioner(p);
  const Field v = random_field(grid.size(), 5);
  CHECK(rel_diff(apply_M(pre.factorization, pre.Q, v), v) <= 1e-10);
  CHECK(as_vec(apply_M(pre.factorization, pre.Q, Field(v.size(), 0.0))).norm() == 0.0);

  const SystemSolution sol = solve_system(p, pre);
  CHECK(sol.report.iterations == 1);
  CHECK(sol.report.true_residual <= 1e-9);
}

TEST_CASE("preconditioned solve matches the dense direct solve") {
  const GridSpec grid(2, 12, 3);
  const SplitProblem p = helmholtz(grid, 4.0);
  const Preconditioner pre = build_preconditioner(p);
  const SystemSolution sol = solve_system(p, pre, {.tol = 1e-10, .max_iter = 200});
  const std::vector<double> ref = reference::direct_solve(p);
  CHECK(rel_diff(sol.u, ref) <= 1e-5);
  CHECK(sol.report.true_residual <= 1e-8);
  CHECK(sol.report.apply_seconds > 0.0);
  CHECK(sol.report.solve_seconds > 0.0);
}

TEST_CASE("solutions are linear in the right-hand side") {
  const GridSpec grid(2, 48, 6);
  SplitProblem p = helmholtz(grid, 16.0);
  const Preconditioner pre = build_preconditioner(p);
  const SystemSolution a = solve_system(p, pre, {.tol = 1e-10, .max_iter = 200});
  for (double& x : p.f) x *= 2.0;
  const SystemSolution b = solve_system(p, pre, {.tol = 1e-10, .max_iter = 200});
  Field twice = a.u;
  for (double& x : twice) x *= 2.0;
  CHECK(rel_diff(b.u, twice) <= 1e-8);
  CHECK(a.report.iterations == b.report.iterations);
}

TEST_CASE("preconditioned residual history is non-increasing") {
  const GridSpec grid(2, 48, 6);
  MediaSpec media;
  media.kind = MediaKind::schrodinger_random;
  const SplitProblem p = build_schrodinger(grid, media);
  const Preconditioner pre = build_preconditioner(p);
  const SystemSolution sol = solve_system(p, pre);
  const auto& h = sol.report.residual_history;
  REQUIRE(h.size() == static_cast<std::size_t>(sol.report.iterations));
  for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] <= h[k - 1] * (1.0 + 1e-12));
  CHECK(h.back() <= 1e-6);
}

TEST_CASE("true residual helper") {
  const GridSpec grid(2, 8, 2);
  const SplitProblem p = helmholtz(grid, 1.7);
  const std::vector<double> u = reference::direct_solve(p);
  CHECK(true_relative_residual(p, u) <= 1e-12);
  CHECK(true_relative_residual(p, Field(u.size(), 0.0)) == doctest::Approx(1.0));
}
