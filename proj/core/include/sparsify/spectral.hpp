#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "sparsify/fft.hpp"
#include "sparsify/grid.hpp"

namespace sparsify {

using Field = std::vector<double>;

/// Spectral gap required between the shift and every Laplacian eigenvalue:
/// min_k |4 pi^2 |k|^2 - s| >= kGapFloor * max(1, 2 pi sqrt(|s|)).
/// Half the spacing of the eigenvalue shells near s is 2 pi sqrt(s).
inline constexpr double kGapFloor = 1e-3;

/// Diagonal Fourier multiplier over K, stored in natural FFT order.
struct FourierSymbol {
  GridSpec grid;
  std::vector<double> values;

  /// Value at the signed multi-index k (components in [-n/2, n/2)).
  double at(const Coord& k) const;
};

/// 4 pi^2 |k|^2 at every mode.
FourierSymbol laplacian_symbol(const GridSpec& grid);

/// 1 / (4 pi^2 |k|^2 - s). Throws ShiftResonant when the gap floor is violated.
FourierSymbol green_symbol(const GridSpec& grid, double shift);

/// min_k |4 pi^2 |k|^2 - s|.
double spectral_gap(const GridSpec& grid, double shift);
bool shift_meets_gap(const GridSpec& grid, double shift);

/// The pseudospectral Laplacian L and Green's operator G = (L - s)^{-1} with
/// a cached FFT plan, for repeated application.
class ShiftedLaplacian {
 public:
  ShiftedLaplacian(const GridSpec& grid, double shift);

  const GridSpec& grid() const { return grid_; }
  double shift() const { return shift_; }

  void apply_laplacian(std::span<const double> v, std::span<double> out);
  void apply_green(std::span<const double> v, std::span<double> out);
  /// (L - s + q) v.
  void apply_operator(std::span<const double> q, std::span<const double> v,
                      std::span<double> out);

 private:
  GridSpec grid_;
  double shift_;
  FourierTransform fft_;
  FourierSymbol laplacian_;
  FourierSymbol green_;
};

Field apply_laplacian(const GridSpec& grid, std::span<const double> v);
Field apply_green(const GridSpec& grid, double shift, std::span<const double> v);

/// Translation-invariant kernel of G: G(i, j) = g((i - j) mod n).
///
/// Also carries the circular autocorrelation of g (the kernel of G^2 = G G^T),
/// which gives full-torus Gram products G(A,:) G(B,:)^T without touching the
/// N columns.
struct GreensKernel {
  GridSpec grid;
  double shift = 0.0;
  std::vector<double> g;
  std::vector<double> autocorrelation;

  double operator()(Index i, Index j) const { return g[offset(i, j)]; }
  Index offset(Index i, Index j) const;

  Eigen::MatrixXd block(std::span<const Index> rows,
                        std::span<const Index> cols) const;
  /// (G G^T)(rows, cols) over the whole torus.
  Eigen::MatrixXd correlation_block(std::span<const Index> rows,
                                    std::span<const Index> cols) const;
};

GreensKernel green_kernel(const GridSpec& grid, double shift);

struct ShiftAdjustment {
  double shift = 0.0;
  std::vector<double> q;
  /// Number of perturbation steps taken (0 when s already met the gap).
  int steps = 0;
};

/// Moves s off the Laplacian spectrum by s' = s (1 + eta), eta = 1e-3, 2e-3,
/// 4e-3, ... and compensates q' = q + (s' - s) so L - s' + q' = L - s + q.
ShiftAdjustment adjust_shift(const GridSpec& grid, double shift,
                             std::span<const double> q);

}  // namespace sparsify
