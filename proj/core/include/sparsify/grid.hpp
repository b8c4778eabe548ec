#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace sparsify {

using Index = std::int64_t;
using Coord = std::array<int, 3>;

/// Uniform periodic grid on the unit torus [0,1)^d with n points per axis,
/// tiled by leaf boxes of `leaf` grid steps.
///
/// Linear indices are row-major in (j1, ..., jd), so ascending linear index
/// is lexicographic order of the coordinates.
class GridSpec {
 public:
  GridSpec() = default;
  /// Throws InvalidGrid / IndivisibleGrid when the descriptor is unusable.
  GridSpec(int dim, int n, int leaf);

  int dim() const { return dim_; }
  int n() const { return n_; }
  int leaf() const { return leaf_; }
  double h() const { return 1.0 / n_; }
  int boxes_per_axis() const { return n_ / leaf_; }
  Index size() const { return size_; }

  Coord coord(Index i) const;
  Index index(const Coord& c) const;
  /// Index of `c` after wrapping each component modulo n.
  Index wrapped_index(const Coord& c) const;
  int wrap(int v) const {
    const int r = v % n_;
    return r < 0 ? r + n_ : r;
  }
  /// Signed Fourier mode for an FFT-ordered position 0..n-1 (range -n/2..n/2-1).
  int frequency(int pos) const { return pos < n_ / 2 ? pos : pos - n_; }

  std::string describe() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int dim_ = 0;
  int n_ = 0;
  int leaf_ = 0;
  Index size_ = 0;
};

/// Same validation as the constructor but without the leaf-divisibility rule;
/// used by spectral code that never touches the box tiling.
GridSpec spectral_grid(int dim, int n);

}  // namespace sparsify
