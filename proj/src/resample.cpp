#include "srirnn/resample.hpp"

#include <algorithm>
#include <complex>
#include <string>

#include "srirnn/error.hpp"
#include "srirnn/spectral.hpp"

namespace srirnn {

std::size_t resample_input_length(std::size_t n, Ratio rate) {
  const auto q = static_cast<std::size_t>(rate.den);
  return n - n % q;
}

std::size_t resampled_length(std::size_t n, Ratio rate) {
  return n / static_cast<std::size_t>(rate.den) * static_cast<std::size_t>(rate.num);
}

std::vector<double> dft_resample(std::span<const double> x, Ratio rate) {
  rate = Ratio::make(rate.num, rate.den);
  const std::size_t n = x.size();
  if (n < 2) throw ArgumentError("dft_resample: need at least 2 samples");
  if (n % static_cast<std::size_t>(rate.den) != 0) {
    throw ArgumentError("dft_resample: length " + std::to_string(n) + " is not divisible by " +
                        std::to_string(rate.den) + "; trim to " +
                        std::to_string(resample_input_length(n, rate)) + " samples first");
  }
  const std::size_t m = resampled_length(n, rate);
  if (m < 2) throw ArgumentError("dft_resample: output would have fewer than 2 samples");
  if (m == n) return {x.begin(), x.end()};

  RealDft fwd(n);
  const std::vector<std::complex<double>> spec = fwd.forward(x);
  std::vector<std::complex<double>> out(m / 2 + 1, {0.0, 0.0});

  const std::size_t shorter = std::min(n, m);
  const std::size_t keep = shorter / 2 + 1;
  std::copy_n(spec.begin(), keep, out.begin());
  if (shorter % 2 == 0 && n != m) {
    const std::size_t nyq = shorter / 2;
    if (m > n) {
      // Old Nyquist bin becomes a +/- pair in the wider spectrum.
      out[nyq] = 0.5 * spec[nyq];
    } else {
      // Bins +nyq and -nyq of the old spectrum both land on the new Nyquist.
      out[nyq] = {2.0 * spec[nyq].real(), 0.0};
    }
  }

  RealDft inv(m);
  std::vector<double> y = inv.inverse(out);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : y) v *= scale;
  return y;
}

}  // namespace srirnn
