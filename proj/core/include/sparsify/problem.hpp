#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparsify/grid.hpp"
#include "sparsify/spectral.hpp"

namespace sparsify {

enum class MediaKind {
  helmholtz_constant,          // c == 1
  helmholtz_gaussian,          // c = 1 + A g(x - center)
  helmholtz_random_gaussians,  // c = 1 + A sum of `count` random Gaussians
  schrodinger_constant,        // V == 0
  schrodinger_random,          // V = sum of Gaussians at random torus points
  schrodinger_lattice_vacancy  // V on the lattice (8h) Z^d minus the center site
};

std::string_view to_string(MediaKind kind);
/// Throws InvalidMedia for unknown names.
MediaKind media_kind_from_string(std::string_view name);
bool is_helmholtz(MediaKind kind);

struct MediaSpec {
  MediaKind kind = MediaKind::helmholtz_gaussian;
  double omega_over_2pi = 16.0;  // Helmholtz only
  double energy = 2.5;           // Schroedinger only
  /// Unset means the kind default: 0.25 (Helmholtz), 1.0 (Schroedinger).
  std::optional<double> amplitude;
  /// Gaussian width in domain units. Unset: 0.1 (Helmholtz), 1.5 h (Schroedinger).
  std::optional<double> sigma;
  /// Random Gaussian count. Unset: 3 (Helmholtz), ceil(N / 8^d) (Schroedinger).
  std::optional<int> count;
  std::uint64_t seed = 42;
};

/// (L - s + q) u = f on the torus.
struct SplitProblem {
  GridSpec grid;
  double shift = 0.0;
  Field q;
  Field f;
  std::string label;
  /// The physical coefficient k2(x) with -Laplace u - k2 u = f, i.e.
  /// omega^2 / c^2 (Helmholtz) or l^2 (E - V) (Schroedinger).
  Field coefficient;
  /// c(x) for Helmholtz, l^2 V for Schroedinger.
  Field medium;
  /// Shift before adjust_shift; q - (shift - raw_shift) has zero mean.
  double raw_shift = 0.0;
  int shift_steps = 0;
};

using Point = std::array<double, 3>;

/// amplitude * sum_c exp(-|x_j - c|^2 / (2 sigma^2)) with the torus distance.
Field gaussian_field(const GridSpec& grid, std::span<const Point> centers,
                     double amplitude, double sigma);

/// Deterministic Gaussian centers for the random media families.
std::vector<Point> random_centers(const GridSpec& grid, const MediaSpec& media);

/// Lattice sites (8h) Z^d, optionally without the site nearest the domain center.
std::vector<Point> lattice_centers(const GridSpec& grid, bool with_vacancy);

SplitProblem build_helmholtz(const GridSpec& grid, const MediaSpec& media);
SplitProblem build_schrodinger(const GridSpec& grid, const MediaSpec& media);
/// Dispatches on media.kind.
SplitProblem build_problem(const GridSpec& grid, const MediaSpec& media);

/// Splits a coefficient k2 into s = mean(k2), q = s - k2, without shift
/// adjustment. Exposed for tests.
SplitProblem split_coefficient(const GridSpec& grid, Field coefficient);

/// Discrete delta with value 1 at (n/2, ..., n/2).
Field center_delta(const GridSpec& grid);

/// Reproducible generator for media: std::mt19937_64 (fully specified by
/// the standard) with doubles built from the top 53 bits, so the stream does
/// not depend on the standard library's distribution implementations.
class MediaRng {
 public:
  explicit MediaRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sparsify
