#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "sparsify/partition.hpp"
#include "sparsify/sparse_matrix.hpp"
#include "sparsify/spectral.hpp"

namespace sparsify {

/// Eigenvalues of the stencil Gram matrix below this fraction of the largest
/// one are dropped from the pseudoinverse.
inline constexpr double kPinvCutoff = 1e-10;

/// Least-squares stencil of one skeleton class: rows of G(points, gamma^c)
/// expressed through rows of G(beta, gamma^c).
struct Stencil {
  unsigned normal_mask = 0;
  SkeletonKind kind = SkeletonKind::cell;
  /// |points| x |beta|.
  Eigen::MatrixXd T;
  /// G(gamma, gamma) in the set's (points, beta) order.
  Eigen::MatrixXd g_gamma;
  /// ||G(p, gamma^c) - T G(beta, gamma^c)||_F / ||G(p, gamma^c)||_F.
  double ls_residual = 0.0;
  /// Pseudoinverse rank kept after the eigenvalue cutoff.
  Eigen::Index rank = 0;
};

/// Fits the stencil of `set` against the translation-invariant kernel.
///
/// Gram products over gamma^c are full-torus correlations (from the kernel's
/// autocorrelation) minus the gamma-restricted part, so the N - |gamma|
/// complement columns are never formed. Throws DegenerateGram when the beta
/// Gram matrix vanishes.
Stencil compute_stencil(const GreensKernel& kernel, const SkeletonSet& set);

/// One stencil per skeleton class (2^d of them), indexed by normal_mask and
/// fitted on the class representative anchored at the origin.
struct StencilSet {
  std::vector<Stencil> by_class;
  int computations = 0;

  const Stencil& of(const SkeletonSet& set) const {
    return by_class[set.normal_mask];
  }
};

StencilSet compute_stencils(const GreensKernel& kernel,
                            const Partition& partition);

/// Q(S, gamma(S)) = [I  -T_S] for every skeleton set S.
SparseMatrix assemble_Q(const Partition& partition, const StencilSet& stencils);

/// C(S, gamma(S)) = [I  -T_S] G(gamma(S), gamma(S)); same pattern as Q.
SparseMatrix assemble_C(const Partition& partition, const StencilSet& stencils,
                        const GreensKernel& kernel);

/// P = Q + C diag(q); same pattern as Q. Throws when the patterns differ.
SparseMatrix assemble_P(const SparseMatrix& Q, const SparseMatrix& C,
                        std::span<const double> q);

}  // namespace sparsify
