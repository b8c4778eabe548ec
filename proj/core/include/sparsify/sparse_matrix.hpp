#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "sparsify/grid.hpp"

namespace sparsify {

/// Row-compressed sparse matrix. Column order inside a row is whatever the
/// assembler chose (the sparsifier uses the canonical points-then-beta order),
/// so rows are not assumed sorted.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_ptr,
               std::vector<Index> col_idx, std::vector<double> values);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  std::span<const Index> row_cols(Index r) const;
  std::span<const double> row_values(Index r) const;
  std::span<double> row_values(Index r);

  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Entry (r, c), zero when outside the pattern. Linear in the row length.
  double coeff(Index r, Index c) const;

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  /// Identical row pointers and column sequences.
  bool same_pattern(const SparseMatrix& other) const;

  static SparseMatrix identity(Index n);

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Writes "rows cols nnz" then one "row col value" line per entry (0-based,
/// values with 17 significant digits).
void write_coordinate(std::ostream& os, const SparseMatrix& a);

}  // namespace sparsify
