#include "sparsify/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sparsify/errors.hpp"

namespace sparsify {

namespace {

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

void check_length(const GridSpec& grid, std::size_t len, const char* what) {
  if (len != static_cast<std::size_t>(grid.size())) {
    throw LengthMismatch(std::string(what) + ": expected length " +
                         std::to_string(grid.size()) + ", got " +
                         std::to_string(len));
  }
}

// Eigenvalue 4 pi^2 |k|^2 for the FFT-ordered position i.
double eigenvalue(const GridSpec& grid, Index i) {
  const Coord c = grid.coord(i);
  double k2 = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const double k = grid.frequency(c[a]);
    k2 += k * k;
  }
  return kFourPiSq * k2;
}

// Neighbouring spectral shells near s are 4 pi sqrt(s) apart, so the floor
// scales with sqrt(s) rather than s.
double required_gap(double shift) {
  return kGapFloor *
         std::max(1.0, 2.0 * std::numbers::pi * std::sqrt(std::abs(shift)));
}

}  // namespace

double FourierSymbol::at(const Coord& k) const {
  return values[static_cast<std::size_t>(grid.wrapped_index(k))];
}

FourierSymbol laplacian_symbol(const GridSpec& grid) {
  FourierSymbol sym{grid, std::vector<double>(static_cast<std::size_t>(grid.size()))};
  for (Index i = 0; i < grid.size(); ++i) {
    sym.values[static_cast<std::size_t>(i)] = eigenvalue(grid, i);
  }
  return sym;
}

double spectral_gap(const GridSpec& grid, double shift) {
  double gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < grid.size(); ++i) {
    gap = std::min(gap, std::abs(eigenvalue(grid, i) - shift));
  }
  return gap;
}

bool shift_meets_gap(const GridSpec& grid, double shift) {
  return spectral_gap(grid, shift) >= required_gap(shift);
}

FourierSymbol green_symbol(const GridSpec& grid, double shift) {
  FourierSymbol sym = laplacian_symbol(grid);
  const double floor = required_gap(shift);
  for (double& v : sym.values) {
    const double d = v - shift;
    if (std::abs(d) < floor) {
      throw ShiftResonant("shift " + std::to_string(shift) +
                          " is within the gap floor of eigenvalue " +
                          std::to_string(v) + "; run adjust_shift first");
    }
    v = 1.0 / d;
  }
  return sym;
}

ShiftedLaplacian::ShiftedLaplacian(const GridSpec& grid, double shift)
    : grid_(grid),
      shift_(shift),
      fft_(grid),
      laplacian_(laplacian_symbol(grid)),
      green_(green_symbol(grid, shift)) {}

void ShiftedLaplacian::apply_laplacian(std::span<const double> v,
                                       std::span<double> out) {
  check_length(grid_, v.size(), "apply_laplacian");
  fft_.apply_symbol(laplacian_.values, v, out);
}

void ShiftedLaplacian::apply_green(std::span<const double> v,
                                   std::span<double> out) {
  check_length(grid_, v.size(), "apply_green");
  fft_.apply_symbol(green_.values, v, out);
}

void ShiftedLaplacian::apply_operator(std::span<const double> q,
                                      std::span<const double> v,
                                      std::span<double> out) {
  check_length(grid_, q.size(), "apply_operator");
  check_length(grid_, v.size(), "apply_operator");
  Field lv(v.size());
  fft_.apply_symbol(laplacian_.values, v, lv);
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = lv[i] - shift_ * v[i] + q[i] * v[i];
  }
}

Field apply_laplacian(const GridSpec& grid, std::span<const double> v) {
  check_length(grid, v.size(), "apply_laplacian");
  FourierTransform fft(grid);
  Field out(v.size());
  fft.apply_symbol(laplacian_symbol(grid).values, v, out);
  return out;
}

Field apply_green(const GridSpec& grid, double shift,
                  std::span<const double> v) {
  check_length(grid, v.size(), "apply_green");
  const FourierSymbol sym = green_symbol(grid, shift);
  FourierTransform fft(grid);
  Field out(v.size());
  fft.apply_symbol(sym.values, v, out);
  return out;
}

Index GreensKernel::offset(Index i, Index j) const {
  const Coord a = grid.coord(i);
  const Coord b = grid.coord(j);
  Coord d{0, 0, 0};
  for (int k = 0; k < grid.dim(); ++k) d[k] = a[k] - b[k];
  return grid.wrapped_index(d);
}

namespace {

Eigen::MatrixXd kernel_block(const GridSpec& grid, const std::vector<double>& k,
                             std::span<const Index> rows,
                             std::span<const Index> cols) {
  std::vector<Coord> rc(rows.size());
  std::vector<Coord> cc(cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) rc[r] = grid.coord(rows[r]);
  for (std::size_t c = 0; c < cols.size(); ++c) cc[c] = grid.coord(cols[c]);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(cols.size()));
  const int dim = grid.dim();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Index off = 0;
      for (int a = 0; a < dim; ++a) {
        off = off * grid.n() + grid.wrap(rc[r][a] - cc[c][a]);
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          k[static_cast<std::size_t>(off)];
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd GreensKernel::block(std::span<const Index> rows,
                                    std::span<const Index> cols) const {
  return kernel_block(grid, g, rows, cols);
}

Eigen::MatrixXd GreensKernel::correlation_block(
    std::span<const Index> rows, std::span<const Index> cols) const {
  return kernel_block(grid, autocorrelation, rows, cols);
}

GreensKernel green_kernel(const GridSpec& grid, double shift) {
  const FourierSymbol sym = green_symbol(grid, shift);
  std::vector<double> squared(sym.values.size());
  for (std::size_t i = 0; i < squared.size(); ++i) {
    squared[i] = sym.values[i] * sym.values[i];
  }
  Field delta(static_cast<std::size_t>(grid.size()), 0.0);
  delta[0] = 1.0;

  FourierTransform fft(grid);
  GreensKernel kernel{grid, shift, Field(delta.size()), Field(delta.size())};
  fft.apply_symbol(sym.values, delta, kernel.g);
  fft.apply_symbol(squared, delta, kernel.autocorrelation);
  return kernel;
}

ShiftAdjustment adjust_shift(const GridSpec& grid, double shift,
                             std::span<const double> q) {
  check_length(grid, q.size(), "adjust_shift");
  ShiftAdjustment out{shift, Field(q.begin(), q.end()), 0};
  if (shift_meets_gap(grid, shift)) return out;

  // A zero shift cannot be scaled away from the k = 0 eigenvalue.
  const double base = shift != 0.0 ? shift : 1.0;
  double eta = 1e-3;
  double candidate = shift;
  // Past the top of the spectrum the gap condition always holds, so the
  // doubling search ends well before eta overflows.
  for (int step = 1; step <= 128; ++step, eta *= 2.0) {
    candidate = shift != 0.0 ? shift * (1.0 + eta) : base * eta;
    if (shift_meets_gap(grid, candidate)) {
      out.steps = step;
      break;
    }
  }
  const double delta = candidate - shift;
  out.shift = candidate;
  for (double& v : out.q) v += delta;
  return out;
}

}  // namespace sparsify
