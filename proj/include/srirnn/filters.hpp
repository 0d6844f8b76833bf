#pragma once

// Fractional delay (delta > 0) and fractional advance (delta < 0) FIR filters
// for the state feedback loop.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srirnn {

// Positive rational P/Q in lowest terms.
struct Ratio {
  std::int64_t num = 1;
  std::int64_t den = 1;

  // Reduces by the gcd; throws ArgumentError for non-positive terms.
  static Ratio make(std::int64_t p, std::int64_t q);
  // Accepts "P/Q" or a bare integer "P".
  static Ratio parse(std::string_view text);

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  Ratio inverse() const noexcept { return {den, num}; }

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

struct DelaySpec {
  double train_rate = 44100.0;
  double inference_rate = 44100.0;
  Ratio ratio;        // inference_rate / train_rate
  double delta = 0.0; // ratio - 1, in samples
};

// delta = P/Q - 1, evaluated as (P - Q) / Q so it is rounded exactly once.
DelaySpec delta_for_ratio(std::int64_t p, std::int64_t q, double train_rate = 44100.0);
DelaySpec delta_for_ratio(Ratio ratio, double train_rate = 44100.0);

enum class DesignMethod { identity, lagrange, minimax };

std::string_view to_string(DesignMethod m) noexcept;
DesignMethod parse_design_method(std::string_view text);

struct FirCoefficients {
  std::vector<double> taps;
  DesignMethod method = DesignMethod::identity;
  double delta = 0.0;
  // Max complex error over the design band (minimax designs) or NaN.
  double objective = 0.0;
  // Barrier duality-gap bound at termination (minimax designs), else 0.
  double duality_gap = 0.0;

  std::size_t order() const noexcept { return taps.empty() ? 0 : taps.size() - 1; }
};

// The single unit tap [1]: no interpolation.
FirCoefficients identity_filter();

// l_k = prod_{j != k} (delta - j) / (k - j), k = 0..order.
FirCoefficients lagrange_coeffs(double delta, std::size_t order);

struct MinimaxOptions {
  double band_fraction = 0.25;  // band edge as a fraction of the sample rate
  std::size_t grid_size = 512;
  double gap_tolerance = 1e-10;
  std::size_t max_newton_steps = 200;
};

// Minimises max over the band grid of |sum_k l_k e^{-jwk} - e^{-jw delta}|
// subject to sum_k l_k = 1. Throws ConvergenceError if the barrier method
// stalls.
FirCoefficients minimax_coeffs(double delta, std::size_t order, const MinimaxOptions& opts = {});

// Uniform grid 0 .. 2*pi*band_fraction with `grid_size` points (inclusive).
std::vector<double> band_grid(double band_fraction, std::size_t grid_size);

// max over grid of |H(w) - e^{-jw delta}|.
double band_error(std::span<const double> taps, double delta, std::span<const double> omega);

std::complex<double> dtft(std::span<const double> taps, double omega);

struct FrequencyResponse {
  std::vector<double> omega;  // [0, pi], strictly increasing
  std::vector<std::complex<double>> response;
  std::vector<double> magnitude;
  std::vector<double> phase_delay_error;  // -arg H(w) / w - delta
};

FrequencyResponse frequency_response(const FirCoefficients& filter, std::size_t grid_size = 512);

// Design by method name; `identity` ignores order and delta.
FirCoefficients design_filter(DesignMethod method, double delta, std::size_t order,
                              const MinimaxOptions& opts = {});

}  // namespace srirnn
