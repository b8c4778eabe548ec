#include "sparsify/sparsifier.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsify/errors.hpp"

namespace sparsify {

namespace {

using Eigen::MatrixXd;

// G(A, gamma^c) G(B, gamma^c)^T for A, B subsets of gamma.
MatrixXd complement_gram(const GreensKernel& kernel, std::span<const Index> a,
                         std::span<const Index> b, const MatrixXd& g_a_gamma,
                         const MatrixXd& g_b_gamma) {
  MatrixXd gram = kernel.correlation_block(a, b);
  gram.noalias() -= g_a_gamma * g_b_gamma.transpose();
  return gram;
}

const SkeletonSet& class_representative(const Partition& partition,
                                        unsigned mask) {
  // Sets are emitted box by box, all classes per box, starting at the origin.
  const SkeletonSet& set = partition.sets[mask];
  if (set.normal_mask != mask) {
    throw std::logic_error("unexpected skeleton set ordering");
  }
  return set;
}

// Fills the row blocks of every skeleton set from a per-class dense block
// whose columns follow the set's gamma order.
SparseMatrix assemble_blocks(const Partition& partition,
                             const std::vector<MatrixXd>& blocks) {
  const GridSpec& grid = partition.grid;
  const auto n = static_cast<std::size_t>(grid.size());
  std::vector<Index> row_ptr(n + 1, 0);
  for (std::size_t r = 0; r < n; ++r) {
    row_ptr[r + 1] = row_ptr[r] +
        static_cast<Index>(partition.set_of(static_cast<Index>(r)).gamma.size());
  }
  std::vector<Index> cols(static_cast<std::size_t>(row_ptr.back()));
  std::vector<double> vals(cols.size());
  for (const SkeletonSet& set : partition.sets) {
    const MatrixXd& block = blocks[set.normal_mask];
    for (std::size_t r = 0; r < set.points.size(); ++r) {
      auto offset = static_cast<std::size_t>(
          row_ptr[static_cast<std::size_t>(set.points[r])]);
      for (std::size_t c = 0; c < set.gamma.size(); ++c) {
        cols[offset + c] = set.gamma[c];
        vals[offset + c] =
            block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  return SparseMatrix(grid.size(), grid.size(), std::move(row_ptr),
                      std::move(cols), std::move(vals));
}

MatrixXd q_block(const Stencil& st) {
  const Eigen::Index p = st.T.rows();
  MatrixXd block(p, p + st.T.cols());
  block.leftCols(p).setIdentity();
  block.rightCols(st.T.cols()) = -st.T;
  return block;
}

}  // namespace

Stencil compute_stencil(const GreensKernel& kernel, const SkeletonSet& set) {
  const std::span<const Index> points = set.points;
  const std::span<const Index> beta = set.beta;
  const std::span<const Index> gamma = set.gamma;

  Stencil st;
  st.normal_mask = set.normal_mask;
  st.kind = set.kind;
  st.g_gamma = kernel.block(gamma, gamma);

  const auto np = static_cast<Eigen::Index>(points.size());
  const auto nbeta = static_cast<Eigen::Index>(beta.size());
  const MatrixXd g_p = st.g_gamma.topRows(np);
  const MatrixXd g_beta = st.g_gamma.bottomRows(nbeta);

  const MatrixXd gram_beta = complement_gram(kernel, beta, beta, g_beta, g_beta);
  const MatrixXd cross = complement_gram(kernel, points, beta, g_p, g_beta);
  const MatrixXd gram_p = complement_gram(kernel, points, points, g_p, g_p);

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(
      0.5 * (gram_beta + gram_beta.transpose()));
  if (eig.info() != Eigen::Success) {
    throw DegenerateGram("eigendecomposition of the beta Gram matrix failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lambda_max = lambda.maxCoeff();
  const double scale = kernel.correlation_block(beta, beta).trace();
  if (!(lambda_max > 1e-14 * std::abs(scale)) || !(lambda_max > 0.0)) {
    throw DegenerateGram("beta Gram matrix is numerically zero for " +
                         std::string(to_string(set.kind)) + " stencil");
  }
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(nbeta);
  for (Eigen::Index i = 0; i < nbeta; ++i) {
    if (lambda(i) > kPinvCutoff * lambda_max) {
      inv(i) = 1.0 / lambda(i);
      ++st.rank;
    }
  }
  const MatrixXd& v = eig.eigenvectors();
  st.T = ((cross * v) * inv.asDiagonal()) * v.transpose();

  // ||X - T Y||^2 = tr(XX^T) - 2 tr(T (XY^T)^T) + tr(T YY^T T^T)
  const double xx = gram_p.trace();
  const double xy = (st.T.array() * cross.array()).sum();
  const double yy = (st.T * gram_beta).cwiseProduct(st.T).sum();
  const double r2 = std::max(0.0, xx - 2.0 * xy + yy);
  st.ls_residual = xx > 0.0 ? std::sqrt(r2 / xx) : 0.0;
  return st;
}

StencilSet compute_stencils(const GreensKernel& kernel,
                            const Partition& partition) {
  StencilSet out;
  const auto classes = static_cast<unsigned>(partition.class_count());
  out.by_class.reserve(classes);
  for (unsigned mask = 0; mask < classes; ++mask) {
    out.by_class.push_back(
        compute_stencil(kernel, class_representative(partition, mask)));
    ++out.computations;
  }
  return out;
}

SparseMatrix assemble_Q(const Partition& partition, const StencilSet& stencils) {
  std::vector<MatrixXd> blocks;
  for (const Stencil& st : stencils.by_class) blocks.push_back(q_block(st));
  return assemble_blocks(partition, blocks);
}

SparseMatrix assemble_C(const Partition& partition, const StencilSet& stencils,
                        const GreensKernel& kernel) {
  std::vector<MatrixXd> blocks;
  const auto classes = static_cast<unsigned>(partition.class_count());
  for (unsigned mask = 0; mask < classes; ++mask) {
    const SkeletonSet& rep = class_representative(partition, mask);
    const MatrixXd g_gamma = kernel.block(rep.gamma, rep.gamma);
    blocks.push_back(q_block(stencils.by_class[mask]) * g_gamma);
  }
  return assemble_blocks(partition, blocks);
}

SparseMatrix assemble_P(const SparseMatrix& Q, const SparseMatrix& C,
                        std::span<const double> q) {
  if (!Q.same_pattern(C)) {
    throw std::invalid_argument("assemble_P: Q and C patterns differ");
  }
  if (q.size() != static_cast<std::size_t>(Q.cols())) {
    throw LengthMismatch("assemble_P: q has the wrong length");
  }
  std::vector<double> vals(Q.values().size());
  const auto& cols = Q.col_idx();
  for (std::size_t k = 0; k < vals.size(); ++k) {
    vals[k] = Q.values()[k] +
              C.values()[k] * q[static_cast<std::size_t>(cols[k])];
  }
  return SparseMatrix(Q.rows(), Q.cols(), Q.row_ptr(), Q.col_idx(),
                      std::move(vals));
}

}  // namespace sparsify
