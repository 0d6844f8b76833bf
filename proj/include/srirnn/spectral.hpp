#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace srirnn {

// Real-input DFT of a fixed length backed by FFTW. Plans are created under a
// process-wide lock; execute() is safe to call concurrently on distinct
// objects.
class RealDft {
 public:
  explicit RealDft(std::size_t n);
  ~RealDft();
  RealDft(RealDft&&) noexcept;
  RealDft& operator=(RealDft&&) noexcept;
  RealDft(const RealDft&) = delete;
  RealDft& operator=(const RealDft&) = delete;

  std::size_t size() const noexcept;

  // Unnormalised forward transform: n/2 + 1 bins.
  std::vector<std::complex<double>> forward(std::span<const double> x);
  // Unnormalised inverse of a Hermitian half spectrum (n/2 + 1 bins): returns
  // n * (true inverse). The imaginary parts of the DC bin and, for even n,
  // the Nyquist bin are ignored.
  std::vector<double> inverse(std::span<const std::complex<double>> spectrum);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct StftTable {
  std::size_t window = 0;
  std::size_t hop = 0;
  std::size_t frames = 0;
  std::size_t bins = 0;              // window / 2 + 1
  std::vector<double> magnitude_db;  // frames x bins, row-major
};

// Hann-windowed magnitude spectrogram in dB (20 log10 |X|, floored at -300).
StftTable stft_magnitude_db(std::span<const double> x, std::size_t window = 1024,
                            std::size_t hop = 256);

}  // namespace srirnn
