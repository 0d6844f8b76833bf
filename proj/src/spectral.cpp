#include "srirnn/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "srirnn/error.hpp"

namespace srirnn {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealDft::Impl {
  std::size_t n = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  explicit Impl(std::size_t size) : n(size) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    const int len = static_cast<int>(n);
    fwd = fftw_plan_dft_r2c_1d(len, real, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(len, spec, real, FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
};

RealDft::RealDft(std::size_t n) {
  if (n == 0) throw ArgumentError("DFT length must be positive");
  impl_ = std::make_unique<Impl>(n);
}

RealDft::~RealDft() = default;
RealDft::RealDft(RealDft&&) noexcept = default;
RealDft& RealDft::operator=(RealDft&&) noexcept = default;

std::size_t RealDft::size() const noexcept { return impl_->n; }

std::vector<std::complex<double>> RealDft::forward(std::span<const double> x) {
  if (x.size() != impl_->n) throw ShapeError("RealDft::forward: length mismatch");
  std::copy(x.begin(), x.end(), impl_->real);
  fftw_execute(impl_->fwd);
  std::vector<std::complex<double>> out(impl_->n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {impl_->spec[k][0], impl_->spec[k][1]};
  return out;
}

std::vector<double> RealDft::inverse(std::span<const std::complex<double>> spectrum) {
  if (spectrum.size() != impl_->n / 2 + 1) throw ShapeError("RealDft::inverse: bin count mismatch");
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    impl_->spec[k][0] = spectrum[k].real();
    impl_->spec[k][1] = spectrum[k].imag();
  }
  // c2r destroys its input; it has been copied in above.
  fftw_execute(impl_->inv);
  return std::vector<double>(impl_->real, impl_->real + impl_->n);
}

StftTable stft_magnitude_db(std::span<const double> x, std::size_t window, std::size_t hop) {
  if (window < 2 || hop == 0) throw ArgumentError("STFT window must be >= 2 and hop > 0");
  StftTable t;
  t.window = window;
  t.hop = hop;
  t.bins = window / 2 + 1;
  t.frames = x.size() < window ? 0 : (x.size() - window) / hop + 1;
  t.magnitude_db.resize(t.frames * t.bins);
  if (t.frames == 0) return t;

  std::vector<double> hann(window);
  for (std::size_t i = 0; i < window; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                   static_cast<double>(window));
  }
  RealDft dft(window);
  std::vector<double> frame(window);
  for (std::size_t f = 0; f < t.frames; ++f) {
    for (std::size_t i = 0; i < window; ++i) frame[i] = x[f * hop + i] * hann[i];
    const auto spec = dft.forward(frame);
    for (std::size_t b = 0; b < t.bins; ++b) {
      const double mag = std::abs(spec[b]);
      t.magnitude_db[f * t.bins + b] = mag > 0.0 ? std::max(20.0 * std::log10(mag), -300.0) : -300.0;
    }
  }
  return t;
}

}  // namespace srirnn
