#pragma once

// Dense O(N^2)-O(N^3) reference constructions. They never call the FFT,
// the kernel extraction or the sparse factorization, so they serve as
// independent oracles for small grids (N up to a few thousand).

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "sparsify/grid.hpp"
#include "sparsify/problem.hpp"
#include "sparsify/sparse_matrix.hpp"

namespace sparsify::reference {

/// Unitary DFT matrix built from explicit exponentials, rows ordered by the
/// signed modes of K in FFT order.
Eigen::MatrixXcd dft_matrix(const GridSpec& grid);

/// F^{-1} diag(4 pi^2 |k|^2) F as a dense real matrix.
Eigen::MatrixXd laplacian(const GridSpec& grid);

/// F^{-1} diag(1 / (4 pi^2 |k|^2 - s)) F as a dense real matrix.
Eigen::MatrixXd green(const GridSpec& grid, double shift);

/// L - s + diag(q).
Eigen::MatrixXd system_matrix(const SplitProblem& problem);

/// Dense LU solve of (L - s + q) u = f.
std::vector<double> direct_solve(const SplitProblem& problem);

Eigen::MatrixXd to_dense(const SparseMatrix& a);

/// Plain graph elimination on the symmetrized pattern in the given order.
/// Returns, for every position, the later positions adjacent to it at the
/// moment it is eliminated.
std::vector<std::vector<Index>> elimination_structure(
    const SparseMatrix& pattern, std::span<const Index> permutation);

/// Minimum-norm least-squares T for X ~ T Y via complete orthogonal
/// decomposition of the explicit Y.
Eigen::MatrixXd least_squares(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

}  // namespace sparsify::reference
