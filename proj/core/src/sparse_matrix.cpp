#include "sparsify/sparse_matrix.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "sparsify/errors.hpp"

namespace sparsify {

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_ptr,
                           std::vector<Index> col_idx,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != static_cast<std::size_t>(rows_ + 1) ||
      row_ptr_.front() != 0 ||
      row_ptr_.back() != static_cast<Index>(col_idx_.size()) ||
      col_idx_.size() != values_.size()) {
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  }
  for (Index c : col_idx_) {
    if (c < 0 || c >= cols_) {
      throw std::invalid_argument("SparseMatrix: column index out of range");
    }
  }
}

std::span<const Index> SparseMatrix::row_cols(Index r) const {
  const auto b = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(r)]);
  const auto e = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(r) + 1]);
  return std::span<const Index>(col_idx_).subspan(b, e - b);
}

std::span<const double> SparseMatrix::row_values(Index r) const {
  const auto b = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(r)]);
  const auto e = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(r) + 1]);
  return std::span<const double>(values_).subspan(b, e - b);
}

std::span<double> SparseMatrix::row_values(Index r) {
  const auto b = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(r)]);
  const auto e = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(r) + 1]);
  return std::span<double>(values_).subspan(b, e - b);
}

double SparseMatrix::coeff(Index r, Index c) const {
  const auto cols = row_cols(r);
  const auto vals = row_values(r);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] == c) return vals[k];
  }
  return 0.0;
}

void SparseMatrix::multiply(std::span<const double> x,
                            std::span<double> y) const {
  if (x.size() != static_cast<std::size_t>(cols_) ||
      y.size() != static_cast<std::size_t>(rows_)) {
    throw LengthMismatch("SparseMatrix::multiply: size mismatch");
  }
  for (Index r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (Index k = row_ptr_[static_cast<std::size_t>(r)];
         k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      acc += values_[static_cast<std::size_t>(k)] *
             x[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(r)] = acc;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows_));
  multiply(x, y);
  return y;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         row_ptr_ == other.row_ptr_ && col_idx_ == other.col_idx_;
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Index> ptr(static_cast<std::size_t>(n + 1));
  std::vector<Index> cols(static_cast<std::size_t>(n));
  for (Index i = 0; i <= n; ++i) ptr[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < n; ++i) cols[static_cast<std::size_t>(i)] = i;
  return SparseMatrix(n, n, std::move(ptr), std::move(cols),
                      std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

void write_coordinate(std::ostream& os, const SparseMatrix& a) {
  os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  os << std::setprecision(17);
  for (Index r = 0; r < a.rows(); ++r) {
    const auto cols = a.row_cols(r);
    const auto vals = a.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      os << r << ' ' << cols[k] << ' ' << vals[k] << '\n';
    }
  }
}

}  // namespace sparsify
