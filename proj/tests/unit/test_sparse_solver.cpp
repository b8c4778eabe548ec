#include <doctest.h>

#include <bit>
#include <chrono>
#include <set>

#include "sparsify/errors.hpp"
#include "sparsify/preconditioner.hpp"
#include "sparsify/reference.hpp"
#include "sparsify/sparse_solver.hpp"
#include "test_support.hpp"

using namespace sparsify;
using sparsify::testing::as_vec;
using sparsify::testing::random_field;

namespace {

SplitProblem helmholtz(const GridSpec& grid, double w) {
  MediaSpec media;
  media.omega_over_2pi = w;
  return build_helmholtz(grid, media);
}

double backward_error(const SparseMatrix& a, std::span<const double> x,
                      std::span<const double> y) {
  const std::vector<double> ax = a.multiply(x);
  const double anorm = reference::to_dense(a).cwiseAbs().rowwise().sum().maxCoeff();
  return (as_vec(ax) - as_vec(y)).lpNorm<Eigen::Infinity>() /
         (anorm * as_vec(x).lpNorm<Eigen::Infinity>() + as_vec(y).lpNorm<Eigen::Infinity>());
}

// Every variable its own leaf, all hanging off a last root variable.
SeparatorTree star_tree(Index size) {
  SeparatorTree tree;
  for (Index i = 0; i + 1 < size; ++i) {
    SeparatorNode node;
    node.vars = {i};
    node.parent = static_cast<int>(size - 1);
    node.depth = 1;
    node.is_leaf = true;
    tree.nodes.push_back(node);
    tree.first_descendant.push_back(static_cast<int>(i));
  }
  SeparatorNode root;
  root.vars = {size - 1};
  for (Index i = 0; i + 1 < size; ++i) root.children.push_back(static_cast<int>(i));
  tree.nodes.push_back(root);
  tree.first_descendant.push_back(0);
  return tree;
}

SparseMatrix from_dense(const Eigen::MatrixXd& m) {
  std::vector<Index> ptr{0}, cols;
  std::vector<double> vals;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0.0) {
        cols.push_back(c);
        vals.push_back(m(r, c));
      }
    }
    ptr.push_back(static_cast<Index>(cols.size()));
  }
  return {m.rows(), m.cols(), ptr, cols, vals};
}

}  // namespace

TEST_CASE("dense LU kernel") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(130, 130);
  const Eigen::MatrixXd orig = a;
  std::vector<int> piv;
  dense_lu_in_place(a, piv, 1e-300);
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(130, 130);
  l.triangularView<Eigen::StrictlyLower>() = a.triangularView<Eigen::StrictlyLower>();
  const Eigen::MatrixXd u = a.triangularView<Eigen::Upper>();
  Eigen::MatrixXd pa = orig;
  for (std::size_t k = 0; k < piv.size(); ++k) pa.row(static_cast<Index>(k)).swap(pa.row(piv[k]));
  CHECK((l * u - pa).norm() <= 1e-12 * orig.norm());

  Eigen::MatrixXd sing = Eigen::MatrixXd::Ones(4, 4);
  CHECK_THROWS_AS(dense_lu_in_place(sing, piv, 1e-14 * 4), SingularMatrix);
}

TEST_CASE("identity and diagonal patterns") {
  const SparseMatrix eye = SparseMatrix::identity(10);
  const SymbolicPlan plan = symbolic_factor(eye, star_tree(10));
  CHECK(plan.factor_entries == 10);
  CHECK(plan.peak_front == 1);
  for (const auto& f : plan.fronts) CHECK(f.size() == 1);
  const Factorization fact = numeric_factor(eye, plan);
  const Field y = random_field(10, 1);
  CHECK(fact.solve(y) == y);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(6, 6);
  d.diagonal() << 1, -2, 3, 0.5, 7, -1;
  const Factorization fd = numeric_factor(from_dense(d), symbolic_factor(from_dense(d), star_tree(6)));
  const Field x = fd.solve(Field{1, 1, 1, 1, 1, 1});
  CHECK(x[1] == -0.5);
  CHECK(x[3] == 2.0);
}

TEST_CASE("front structure matches the graph-elimination oracle") {
  const GridSpec grid(2, 8, 2);
  const SplitProblem prob = helmholtz(grid, 1.7);
  const Preconditioner pre = build_preconditioner(prob);
  const SymbolicPlan plan = symbolic_factor(pre.P, pre.tree);
  const auto reach = reference::elimination_structure(pre.P, plan.permutation);
  for (std::size_t t = 0; t < plan.fronts.size(); ++t) {
    const auto& f = plan.fronts[t];
    std::set<Index> oracle;
    for (Index pos = f.begin; pos < f.end; ++pos)
      for (Index later : reach[static_cast<std::size_t>(pos)])
        if (later >= f.end) oracle.insert(later);
    CHECK(std::set<Index>(f.update.begin(), f.update.end()) == oracle);
  }
}

TEST_CASE("adding entries never reduces fill") {
  const GridSpec grid(2, 8, 2);
  const Preconditioner pre = build_preconditioner(helmholtz(grid, 1.7));
  const Index base = symbolic_factor(pre.P, pre.tree).factor_entries;
  // Extra coupling between two points inside the seam root.
  Eigen::MatrixXd dense = reference::to_dense(pre.P);
  const Index a = grid.index({0, 1, 0}), b = grid.index({0, 5, 0});
  dense(a, b) = 1.0;
  dense(b, a) = 1.0;
  CHECK(symbolic_factor(from_dense(dense), pre.tree).factor_entries >= base);
}

TEST_CASE("pattern that breaks the tree is rejected") {
  const GridSpec grid(2, 8, 2);
  const Preconditioner pre = build_preconditioner(helmholtz(grid, 1.7));
  Eigen::MatrixXd dense = reference::to_dense(pre.P);
  // Couple two different leaf cells directly.
  const Index a = grid.index({1, 1, 0}), b = grid.index({5, 5, 0});
  dense(a, b) = 1.0;
  CHECK_THROWS_AS(symbolic_factor(from_dense(dense), pre.tree), std::logic_error);
}

TEST_CASE("1D circulant system matches dense LU") {
  const GridSpec grid(1, 16, 2);
  const Preconditioner pre = build_preconditioner(helmholtz(grid, 1.9));
  const Field y = random_field(16, 4);
  const Field x = pre.factorization.solve(y);
  const Eigen::VectorXd ref = reference::to_dense(pre.P).partialPivLu().solve(as_vec(y));
  CHECK((as_vec(x) - ref).norm() <= 1e-12 * ref.norm());
}

TEST_CASE("backward error on sparsified Helmholtz matrices") {
  const std::pair<GridSpec, double> cases[] = {
      {GridSpec(2, 12, 3), 4.0}, {GridSpec(2, 48, 6), 16.0}, {GridSpec(2, 96, 8), 32.0},
      {GridSpec(3, 12, 3), 4.0}};
  for (const auto& [grid, w] : cases) {
    CAPTURE(grid.describe());
    const Preconditioner pre = build_preconditioner(helmholtz(grid, w));
    for (std::uint64_t seed = 0; seed < (grid.size() < 500 ? 10u : 3u); ++seed) {
      const Field y = random_field(grid.size(), seed);
      const Field x = pre.factorization.solve(y);
      CHECK(backward_error(pre.P, x, y) <= 1e-10);
    }
    const Field zero(static_cast<std::size_t>(grid.size()), 0.0);
    CHECK(as_vec(pre.factorization.solve(zero)).norm() == 0.0);
    const Field x0 = random_field(grid.size(), 99);
    const Field back = pre.factorization.solve(pre.P.multiply(x0));
    CHECK((as_vec(back) - as_vec(x0)).norm() <= 1e-10 * as_vec(x0).norm());
  }
}

TEST_CASE("factorization is deterministic") {
  const GridSpec grid(2, 48, 6);
  const SplitProblem prob = helmholtz(grid, 16.0);
  const Preconditioner a = build_preconditioner(prob);
  const Preconditioner b = build_preconditioner(prob);
  const Field y = random_field(grid.size(), 5);
  const Field xa = a.factorization.solve(y), xb = b.factorization.solve(y);
  for (std::size_t i = 0; i < xa.size(); ++i)
    CHECK(std::bit_cast<std::uint64_t>(xa[i]) == std::bit_cast<std::uint64_t>(xb[i]));
}

TEST_CASE("solves are much cheaper than the factorization") {
  using Clock = std::chrono::steady_clock;
  const GridSpec grid(2, 96, 8);
  const Preconditioner pre = build_preconditioner(helmholtz(grid, 32.0));
  const SymbolicPlan plan = symbolic_factor(pre.P, pre.tree);
  const auto t0 = Clock::now();
  const Factorization fact = numeric_factor(pre.P, plan);
  const double factor_s = std::chrono::duration<double>(Clock::now() - t0).count();
  const Field y = random_field(grid.size(), 6);
  fact.solve(y);
  const auto t1 = Clock::now();
  fact.solve(y);
  const double solve_s = std::chrono::duration<double>(Clock::now() - t1).count();
  MESSAGE("factor " << factor_s << " s, solve " << solve_s << " s");
  CHECK(solve_s * 10.0 <= factor_s);
}

TEST_CASE("singular matrices are reported") {
  const GridSpec grid(2, 8, 2);
  const Preconditioner pre = build_preconditioner(helmholtz(grid, 1.7));
  SparseMatrix broken = pre.P;
  const Index row = grid.index({1, 1, 0});
  for (double& v : broken.row_values(row)) v = 0.0;
  const SymbolicPlan plan = symbolic_factor(broken, pre.tree);
  CHECK_THROWS_AS(numeric_factor(broken, plan), SingularMatrix);
}
