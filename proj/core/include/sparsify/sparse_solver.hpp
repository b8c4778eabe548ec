#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "sparsify/partition.hpp"
#include "sparsify/sparse_matrix.hpp"

namespace sparsify {

/// Front pivots below this fraction of the assembled front's largest entry
/// are treated as singular.
inline constexpr double kPivotFloor = 1e-14;

/// Symbolic analysis of a matrix pattern against a separator tree.
///
/// Everything is expressed in elimination positions: node t owns the
/// contiguous positions [begin, end) and its front adds `update`, the later
/// (ancestor) positions connected to t's subtree in the symmetrized pattern.
struct SymbolicPlan {
  struct Front {
    Index begin = 0;
    Index end = 0;
    std::vector<Index> update;  // ascending positions
    int parent = -1;
    Index group_size() const { return end - begin; }
    Index size() const {
      return group_size() + static_cast<Index>(update.size());
    }
  };

  Index size = 0;
  std::vector<Index> permutation;  // position -> original index
  std::vector<Index> position;     // original index -> position
  std::vector<Front> fronts;       // postorder
  /// Entries of L and U: sum over fronts of g^2 + 2 g u.
  Index factor_entries = 0;
  Index peak_front = 0;

  int node_of(Index pos) const;
};

/// Throws std::logic_error if the pattern couples two subtrees that the
/// separator tree claims are independent.
SymbolicPlan symbolic_factor(const SparseMatrix& pattern,
                             const SeparatorTree& tree);

/// Plan for a single dense front holding every unknown (for tests and tiny
/// systems).
SeparatorTree single_group_tree(Index size);

/// Multifrontal LU with row pivoting confined to each front's own group.
class Factorization {
 public:
  Factorization() = default;

  Index size() const { return plan_.size; }
  const SymbolicPlan& plan() const { return plan_; }

  /// x = P^{-1} y. Safe to call concurrently.
  void solve(std::span<const double> y, std::span<double> x) const;
  std::vector<double> solve(std::span<const double> y) const;

  Index factor_entries() const { return plan_.factor_entries; }
  Index peak_front() const { return plan_.peak_front; }

 private:
  friend Factorization numeric_factor(const SparseMatrix&, const SymbolicPlan&);

  struct FrontFactor {
    Eigen::MatrixXd lu;    // g x g, unit-lower L and U packed
    std::vector<int> piv;  // sequential row swaps within the group
    Eigen::MatrixXd l21;   // u x g
    Eigen::MatrixXd u12;   // g x u
  };

  SymbolicPlan plan_;
  std::vector<FrontFactor> factors_;
};

/// Throws SingularMatrix when a pivot column inside a front collapses.
Factorization numeric_factor(const SparseMatrix& matrix, const SymbolicPlan& plan);

/// In-place LU with partial pivoting over the rows of `a` (square). Row swaps
/// are recorded LAPACK-style in `piv`. Throws SingularMatrix when the best
/// pivot in a column is below `tiny`. Ties pick the smallest row index.
void dense_lu_in_place(Eigen::Ref<Eigen::MatrixXd> a, std::vector<int>& piv,
                       double tiny);

}  // namespace sparsify
