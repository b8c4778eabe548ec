#include <doctest.h>

#include <complex>
#include <numbers>

#include "sparsify/errors.hpp"
#include "sparsify/reference.hpp"
#include "sparsify/spectral.hpp"
#include "test_support.hpp"

using namespace sparsify;
using sparsify::testing::as_vec;
using sparsify::testing::random_field;
using sparsify::testing::rel_diff;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi2 = 4.0 * kPi * kPi;

Field cosine_mode(const GridSpec& grid) {
  Field v(static_cast<std::size_t>(grid.size()));
  for (Index i = 0; i < grid.size(); ++i)
    v[static_cast<std::size_t>(i)] = std::cos(2.0 * kPi * grid.coord(i)[0] * grid.h());
  return v;
}

// Direct evaluation of n^{-1} sum_k e^{2 pi i k (j - j0) / n} / (4 pi^2 k^2 - s)
// over the signed modes; shares nothing with the FFT path.
double green_direct_sum_1d(int n, double s, int j, int j0) {
  std::complex<double> acc = 0.0;
  for (int k = -n / 2; k < n / 2; ++k) {
    const double phase = 2.0 * kPi * k * (j - j0) / n;
    acc += std::polar(1.0, phase) / (kFourPi2 * k * k - s);
  }
  return acc.real() / n;
}

}  // namespace

TEST_CASE("laplacian symbol values") {
  const GridSpec g1 = spectral_grid(1, 4);
  CHECK(laplacian_symbol(g1).at({0, 0, 0}) == 0.0);
  const GridSpec g2 = spectral_grid(2, 4);
  CHECK(laplacian_symbol(g2).at({1, 1, 0}) == doctest::Approx(2.0 * kFourPi2).epsilon(1e-15));

  // Signed modes -2..1 for n = 4.
  const FourierSymbol sym = laplacian_symbol(g1);
  const double expected[] = {16 * kPi * kPi, 4 * kPi * kPi, 0.0, 4 * kPi * kPi};
  for (int k = -2; k <= 1; ++k)
    CHECK(sym.at({k, 0, 0}) == doctest::Approx(expected[k + 2]).epsilon(1e-15));
}

TEST_CASE("apply_laplacian on constants and eigenmodes") {
  for (int d = 1; d <= 3; ++d) {
    const int n = d == 3 ? 8 : 16;
    const GridSpec grid = spectral_grid(d, n);
    const Field ones(static_cast<std::size_t>(grid.size()), 1.0);
    const Field lo = apply_laplacian(grid, ones);
    CHECK(as_vec(lo).lpNorm<Eigen::Infinity>() <= 1e-10);

    const Field v = cosine_mode(grid);
    const Field lv = apply_laplacian(grid, v);
    Field expect = v;
    for (double& x : expect) x *= kFourPi2;
    CHECK(rel_diff(lv, expect) <= 1e-12);
  }
}

TEST_CASE("apply_laplacian matches the dense DFT construction") {
  const GridSpec grid = spectral_grid(2, 8);
  const Field v = random_field(grid.size(), 7);
  const Field fast = apply_laplacian(grid, v);
  const Eigen::VectorXd dense = reference::laplacian(grid) * as_vec(v);
  const std::vector<double> d(dense.data(), dense.data() + dense.size());
  CHECK(rel_diff(fast, d) <= 1e-12);
}

TEST_CASE("green symbol and resonance detection") {
  const GridSpec grid = spectral_grid(1, 4);
  CHECK(green_symbol(grid, -1.0).at({0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(green_symbol(grid, kFourPi2), ShiftResonant);
  CHECK_THROWS_AS(green_symbol(grid, 0.0), ShiftResonant);
  CHECK_FALSE(shift_meets_gap(grid, kFourPi2));
  CHECK(spectral_gap(grid, kFourPi2 + 1.0) == doctest::Approx(1.0));
}

TEST_CASE("apply_green basics") {
  const GridSpec grid = spectral_grid(2, 16);
  const Field zero(static_cast<std::size_t>(grid.size()), 0.0);
  const Field gz = apply_green(grid, -1.0, zero);
  CHECK(as_vec(gz).norm() == 0.0);

  const Field v = cosine_mode(grid);
  const Field gv = apply_green(grid, -1.0, v);
  Field expect = v;
  for (double& x : expect) x /= kFourPi2 + 1.0;
  CHECK(rel_diff(gv, expect) <= 1e-12);
}

TEST_CASE("apply_green on a 1D delta matches the direct mode sum") {
  const int n = 32;
  const GridSpec grid = spectral_grid(1, n);
  const double s = 137.0;
  Field delta(n, 0.0);
  delta[5] = 1.0;
  const Field g = apply_green(grid, s, delta);
  for (int j = 0; j < n; ++j)
    CHECK(g[j] == doctest::Approx(green_direct_sum_1d(n, s, j, 5)).epsilon(1e-12).scale(1e-3));
}

TEST_CASE("green is the inverse of L - s") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (int d : {2, 3}) {
      const int n = d == 2 ? 16 : 8;
      const GridSpec grid = spectral_grid(d, n);
      MediaRng rng(seed);
      double s = rng.uniform(-50.0, 2000.0);
      if (!shift_meets_gap(grid, s)) s += 1.0;
      REQUIRE(shift_meets_gap(grid, s));
      ShiftedLaplacian op(grid, s);
      const Field v = random_field(grid.size(), seed + 10);
      const Field zero_q(v.size(), 0.0);
      Field gv(v.size()), back(v.size());
      op.apply_green(v, gv);
      op.apply_operator(zero_q, gv, back);
      CHECK(rel_diff(back, v) <= 1e-10);
    }
  }
}

TEST_CASE("green matches the dense oracle") {
  const GridSpec grid = spectral_grid(2, 8);
  const double s = 500.0;
  const Field v = random_field(grid.size(), 4);
  const Field fast = apply_green(grid, s, v);
  const Eigen::VectorXd dense = reference::green(grid, s) * as_vec(v);
  CHECK(rel_diff(fast, std::vector<double>(dense.data(), dense.data() + dense.size())) <= 1e-12);
}

TEST_CASE("green kernel: mean, evenness, columns, symmetry") {
  const GridSpec grid = spectral_grid(2, 8);
  const double s = -3.0;
  const GreensKernel kernel = green_kernel(grid, s);

  const FourierSymbol sym = green_symbol(grid, s);
  double mean = 0.0;
  for (double x : sym.values) mean += x;
  mean /= static_cast<double>(sym.values.size());
  CHECK(kernel.g[0] == doctest::Approx(mean).epsilon(1e-13));

  for (Index i = 0; i < grid.size(); ++i) {
    const Coord c = grid.coord(i);
    const Index mirror = grid.wrapped_index({-c[0], -c[1], 0});
    CHECK(kernel.g[static_cast<std::size_t>(i)] ==
          doctest::Approx(kernel.g[static_cast<std::size_t>(mirror)]).epsilon(1e-12));
  }

  std::vector<Index> all(static_cast<std::size_t>(grid.size()));
  for (Index i = 0; i < grid.size(); ++i) all[static_cast<std::size_t>(i)] = i;
  const Eigen::MatrixXd block = kernel.block(all, all);
  for (Index j = 0; j < grid.size(); j += 7) {
    Field e(all.size(), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    const Field col = apply_green(grid, s, e);
    const Eigen::VectorXd bc = block.col(j);
    CHECK((bc - as_vec(col)).norm() <= 1e-12 * as_vec(col).norm());
  }

  const std::vector<Index> a = {0, 3, 9, 17, 40};
  const std::vector<Index> b = {1, 2, 33, 63};
  CHECK((kernel.block(a, b) - kernel.block(b, a).transpose()).norm() == 0.0);

  // The autocorrelation is the kernel of G^2.
  const Eigen::MatrixXd g2 = block * block;
  CHECK((kernel.correlation_block(a, b) - g2(a, b)).norm() <= 1e-12 * g2.norm());
}

TEST_CASE("adjust_shift") {
  SUBCASE("mid-gap shift is untouched") {
    const GridSpec grid = spectral_grid(2, 16);
    const double s = sparsify::testing::mid_gap_shift(grid, 4000.0);
    const Field q(static_cast<std::size_t>(grid.size()), 0.0);
    const ShiftAdjustment adj = adjust_shift(grid, s, q);
    CHECK(adj.steps == 0);
    CHECK(adj.shift == s);
    CHECK(as_vec(adj.q).norm() == 0.0);
  }
  SUBCASE("resonant shift moves and q compensates") {
    const GridSpec grid = spectral_grid(1, 4);
    const double s = kFourPi2;
    const Field q = random_field(grid.size(), 3);
    const ShiftAdjustment adj = adjust_shift(grid, s, q);
    CHECK(adj.steps >= 1);
    CHECK(adj.shift != s);
    CHECK(shift_meets_gap(grid, adj.shift));
    CHECK(std::abs(adj.shift - s) <= 2e-3 * std::abs(s) * (1.0 + 1e-12));
    for (std::size_t i = 0; i < q.size(); ++i)
      CHECK(adj.q[i] - q[i] == doctest::Approx(adj.shift - s).epsilon(1e-12));

    const Field v = random_field(grid.size(), 8);
    ShiftedLaplacian before(grid, s + 1.0);  // only apply_laplacian is used
    Field lv(v.size());
    before.apply_laplacian(v, lv);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double orig = lv[i] - s * v[i] + q[i] * v[i];
      const double moved = lv[i] - adj.shift * v[i] + adj.q[i] * v[i];
      CHECK(moved == doctest::Approx(orig).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("apply_symbol rejects non-even symbols and bad lengths") {
  const GridSpec grid = spectral_grid(1, 8);
  FourierTransform fft(grid);
  std::vector<double> odd(8, 0.0);
  odd[1] = 1.0;  // mode +1 only: not even, produces an imaginary part
  const Field v = random_field(8, 2);
  Field out(8);
  CHECK_THROWS_AS(fft.apply_symbol(odd, v, out), std::logic_error);
  CHECK_THROWS_AS(apply_green(grid, -1.0, Field(7, 0.0)), LengthMismatch);
}

TEST_CASE("unitary transform round trip") {
  const GridSpec grid = spectral_grid(3, 8);
  FourierTransform fft(grid);
  const Field v = random_field(grid.size(), 5);
  std::vector<std::complex<double>> data(v.begin(), v.end());
  fft.forward(data);
  double energy = 0.0;
  for (auto z : data) energy += std::norm(z);
  CHECK(energy == doctest::Approx(as_vec(v).squaredNorm()).epsilon(1e-12));
  fft.inverse(data);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(data[i].real() == doctest::Approx(v[i]).epsilon(1e-12));
}
