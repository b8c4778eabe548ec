#include "sparsify/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "sparsify/errors.hpp"

namespace sparsify {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FourierTransform::Impl {
  GridSpec grid;
  std::size_t size = 0;
  double scale = 1.0;
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(const GridSpec& g) : grid(g), size(static_cast<std::size_t>(g.size())) {
    scale = 1.0 / std::sqrt(static_cast<double>(size));
    buffer = fftw_alloc_complex(size);
    if (buffer == nullptr) throw std::bad_alloc();
    std::vector<int> dims(static_cast<std::size_t>(g.dim()), g.n());
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft(g.dim(), dims.data(), buffer, buffer, FFTW_FORWARD,
                            FFTW_ESTIMATE);
    backward = fftw_plan_dft(g.dim(), dims.data(), buffer, buffer,
                             FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buffer) fftw_free(buffer);
  }

  std::complex<double>* data() {
    return reinterpret_cast<std::complex<double>*>(buffer);
  }

  void run(fftw_plan plan, std::span<std::complex<double>> x) {
    if (x.size() != size) throw LengthMismatch("transform length mismatch");
    std::copy(x.begin(), x.end(), data());
    fftw_execute(plan);
    const auto* b = data();
    for (std::size_t i = 0; i < size; ++i) x[i] = b[i] * scale;
  }
};

FourierTransform::FourierTransform(const GridSpec& grid)
    : impl_(std::make_unique<Impl>(grid)) {}
FourierTransform::~FourierTransform() = default;
FourierTransform::FourierTransform(FourierTransform&&) noexcept = default;
FourierTransform& FourierTransform::operator=(FourierTransform&&) noexcept =
    default;

const GridSpec& FourierTransform::grid() const { return impl_->grid; }

void FourierTransform::forward(std::span<std::complex<double>> data) {
  impl_->run(impl_->forward, data);
}

void FourierTransform::inverse(std::span<std::complex<double>> data) {
  impl_->run(impl_->backward, data);
}

void FourierTransform::apply_symbol(std::span<const double> symbol,
                                    std::span<const double> in,
                                    std::span<double> out) {
  const std::size_t size = impl_->size;
  if (symbol.size() != size || in.size() != size || out.size() != size) {
    throw LengthMismatch("apply_symbol: expected length " +
                         std::to_string(size));
  }
  auto* b = impl_->data();
  for (std::size_t i = 0; i < size; ++i) b[i] = in[i];
  fftw_execute(impl_->forward);
  // Forward and inverse scale factors combine to 1/N.
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) b[i] *= symbol[i] * scale;
  fftw_execute(impl_->backward);

  double re2 = 0.0;
  double im2 = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    re2 += b[i].real() * b[i].real();
    im2 += b[i].imag() * b[i].imag();
  }
  if (std::sqrt(im2) > 1e-10 * std::sqrt(re2 + im2) && im2 > 0.0) {
    throw std::logic_error(
        "apply_symbol: imaginary residue too large (symbol not even?)");
  }
  for (std::size_t i = 0; i < size; ++i) out[i] = b[i].real();
}

}  // namespace sparsify
