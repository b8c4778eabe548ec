#include "sparsify/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace sparsify::reference {

Eigen::MatrixXcd dft_matrix(const GridSpec& grid) {
  const Index n = grid.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd f(n, n);
  for (Index r = 0; r < n; ++r) {
    const Coord k = grid.coord(r);
    for (Index c = 0; c < n; ++c) {
      const Coord j = grid.coord(c);
      double phase = 0.0;
      for (int a = 0; a < grid.dim(); ++a) {
        phase += static_cast<double>(grid.frequency(k[a])) * j[a];
      }
      phase *= -2.0 * std::numbers::pi / grid.n();
      f(r, c) = std::polar(scale, phase);
    }
  }
  return f;
}

namespace {

Eigen::MatrixXd from_symbol(const GridSpec& grid, const Eigen::VectorXd& symbol) {
  const Eigen::MatrixXcd f = dft_matrix(grid);
  const Eigen::MatrixXcd m = f.adjoint() * symbol.asDiagonal() * f;
  return m.real();
}

Eigen::VectorXd eigenvalues(const GridSpec& grid) {
  Eigen::VectorXd lambda(grid.size());
  for (Index r = 0; r < grid.size(); ++r) {
    const Coord k = grid.coord(r);
    double k2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double ka = grid.frequency(k[a]);
      k2 += ka * ka;
    }
    lambda(r) = 4.0 * std::numbers::pi * std::numbers::pi * k2;
  }
  return lambda;
}

}  // namespace

Eigen::MatrixXd laplacian(const GridSpec& grid) {
  return from_symbol(grid, eigenvalues(grid));
}

Eigen::MatrixXd green(const GridSpec& grid, double shift) {
  Eigen::VectorXd lambda = eigenvalues(grid);
  for (Index i = 0; i < lambda.size(); ++i) lambda(i) = 1.0 / (lambda(i) - shift);
  return from_symbol(grid, lambda);
}

Eigen::MatrixXd system_matrix(const SplitProblem& problem) {
  Eigen::MatrixXd a = laplacian(problem.grid);
  for (Index i = 0; i < a.rows(); ++i) {
    a(i, i) += problem.q[static_cast<std::size_t>(i)] - problem.shift;
  }
  return a;
}

std::vector<double> direct_solve(const SplitProblem& problem) {
  const Eigen::MatrixXd a = system_matrix(problem);
  const Eigen::Map<const Eigen::VectorXd> f(problem.f.data(), a.rows());
  const Eigen::VectorXd u = a.fullPivLu().solve(f);
  return {u.data(), u.data() + u.size()};
}

Eigen::MatrixXd to_dense(const SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (Index r = 0; r < a.rows(); ++r) {
    const auto cols = a.row_cols(r);
    const auto vals = a.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) d(r, cols[k]) += vals[k];
  }
  return d;
}

std::vector<std::vector<Index>> elimination_structure(
    const SparseMatrix& pattern, std::span<const Index> permutation) {
  const auto n = static_cast<std::size_t>(pattern.rows());
  std::vector<Index> pos(n);
  for (std::size_t p = 0; p < n; ++p) {
    pos[static_cast<std::size_t>(permutation[p])] = static_cast<Index>(p);
  }
  std::vector<std::set<Index>> graph(n);
  for (Index r = 0; r < pattern.rows(); ++r) {
    for (Index c : pattern.row_cols(r)) {
      const Index pr = pos[static_cast<std::size_t>(r)];
      const Index pc = pos[static_cast<std::size_t>(c)];
      if (pr == pc) continue;
      graph[static_cast<std::size_t>(pr)].insert(pc);
      graph[static_cast<std::size_t>(pc)].insert(pr);
    }
  }
  std::vector<std::vector<Index>> out(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<Index> later;
    for (Index w : graph[v]) {
      if (w > static_cast<Index>(v)) later.push_back(w);
    }
    for (Index a : later) {
      for (Index b : later) {
        if (a != b) graph[static_cast<std::size_t>(a)].insert(b);
      }
    }
    out[v] = std::move(later);
  }
  return out;
}

Eigen::MatrixXd least_squares(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  // T Y = X  <=>  Y^T T^T = X^T
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(y.transpose());
  const Eigen::MatrixXd tt = cod.solve(x.transpose());
  return tt.transpose();
}

}  // namespace sparsify::reference
