#include "sparsify/grid.hpp"

#include <sstream>

#include "sparsify/errors.hpp"

namespace sparsify {

namespace {

void check_dims(int dim, int n) {
  if (dim < 1 || dim > 3) {
    throw InvalidGrid("grid dimension must be 1, 2 or 3 (got " +
                      std::to_string(dim) + ")");
  }
  if (n < 2 || n % 2 != 0) {
    throw InvalidGrid("points per axis must be a positive even integer (got " +
                      std::to_string(n) + ")");
  }
}

}  // namespace

GridSpec::GridSpec(int dim, int n, int leaf) : dim_(dim), n_(n), leaf_(leaf) {
  check_dims(dim, n);
  if (leaf < 1) throw InvalidGrid("leaf width must be positive");
  if (n % leaf != 0) {
    throw IndivisibleGrid("n = " + std::to_string(n) +
                          " is not a multiple of the leaf width b = " +
                          std::to_string(leaf));
  }
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= n;
}

GridSpec spectral_grid(int dim, int n) {
  check_dims(dim, n);
  return GridSpec(dim, n, 1);
}

Coord GridSpec::coord(Index i) const {
  Coord c{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    c[a] = static_cast<int>(i % n_);
    i /= n_;
  }
  return c;
}

Index GridSpec::index(const Coord& c) const {
  Index i = 0;
  for (int a = 0; a < dim_; ++a) i = i * n_ + c[a];
  return i;
}

Index GridSpec::wrapped_index(const Coord& c) const {
  Index i = 0;
  for (int a = 0; a < dim_; ++a) i = i * n_ + wrap(c[a]);
  return i;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << "d=" << dim_ << " n=" << n_ << " b=" << leaf_;
  return os.str();
}

}  // namespace sparsify
