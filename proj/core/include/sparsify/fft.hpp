#pragma once

#include <complex>
#include <memory>
#include <span>

#include "sparsify/grid.hpp"

namespace sparsify {

/// Unitary d-dimensional DFT on a GridSpec (both directions scaled by
/// n^{-d/2}). Data is stored in natural FFT order along each axis.
///
/// Owns one scratch buffer, so a single instance must not be used from
/// several threads at once.
class FourierTransform {
 public:
  explicit FourierTransform(const GridSpec& grid);
  ~FourierTransform();
  FourierTransform(FourierTransform&&) noexcept;
  FourierTransform& operator=(FourierTransform&&) noexcept;
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  const GridSpec& grid() const;

  void forward(std::span<std::complex<double>> data);
  void inverse(std::span<std::complex<double>> data);

  /// out = F^{-1} diag(symbol) F in for a real, even symbol. The imaginary
  /// residue is checked against 1e-10 of the result norm and dropped.
  /// `in` and `out` may alias.
  void apply_symbol(std::span<const double> symbol, std::span<const double> in,
                    std::span<double> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sparsify
