#pragma once

// Linearised stability analysis of the filter-modified recurrence under zero
// input. Around a fixed point a the modified system is approximately
//
//   s_n = f(a) + J_a (sum_k l_k s_{n-1-k} - a),
//
// a linear system whose stacked state [s_n; ...; s_{n-K}] evolves by the block
// companion matrix with top block row l (x) J_a and an identity block
// sub-diagonal. The fixed point is predicted stable iff every pole lies in
// the closed unit disc.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srirnn/error.hpp"
#include "srirnn/filters.hpp"
#include "srirnn/linalg.hpp"
#include "srirnn/matrix.hpp"
#include "srirnn/model.hpp"

namespace srirnn {

using PoleSet = std::vector<std::complex<double>>;

struct FixedPointOptions {
  std::size_t run_length = 10000;
  std::size_t average_length = 1000;
  // Above this residual the fixed point is flagged as low confidence.
  double residual_tolerance = 1e-6;
  // Input held during the search; empty means all zeros.
  std::vector<double> rest_input;
};

struct FixedPoint {
  std::vector<double> state;
  double residual = 0.0;  // max |f(a, x_rest) - a|
  double spread = 0.0;    // max |s_n - a| over the averaging window
  std::size_t run_length = 0;
  std::size_t average_length = 0;
  bool low_confidence = false;
};

// Runs the unmodified model from zero state with the rest input and averages
// the last `average_length` states. Throws NumericError if the trajectory
// becomes non-finite.
template <RecurrentModel M>
FixedPoint find_fixed_point(const M& model, const FixedPointOptions& opts = {});

// Block companion matrix [l_0 J | l_1 J | ... | l_K J ; I_{HK} 0].
Matrix build_companion(const Matrix& jacobian, std::span<const double> taps);

struct LinearisedSystem {
  Matrix jacobian;
  std::vector<double> taps;
  Matrix companion;
  std::vector<double> offset;  // [f(a) - J a; 0]; does not affect the poles
};

template <RecurrentModel M>
LinearisedSystem linearise(const M& model, const FixedPoint& fp, std::span<const double> taps,
                           std::span<const double> rest_input = {});

// Eigenvalues of the full companion matrix.
PoleSet poles_dense(const Matrix& companion);

// Same pole set from the Kronecker structure: for each eigenvalue mu of J the
// K+1 roots of z^{K+1} - mu (l_0 z^K + ... + l_K).
PoleSet poles_structured(const Matrix& jacobian, std::span<const double> taps);
PoleSet poles_structured_from_eigenvalues(std::span<const std::complex<double>> jacobian_eigenvalues,
                                          std::span<const double> taps);

// Largest distance between matched elements of two equal-size multisets
// (greedy nearest-neighbour matching); +inf if the sizes differ.
double multiset_distance(const PoleSet& a, const PoleSet& b);

// multiset_distance(p, conj(p)).
double conjugate_asymmetry(const PoleSet& p);

double spectral_radius(const PoleSet& p);

enum class Verdict { stable, marginal, unstable, indeterminate };
std::string_view to_string(Verdict v) noexcept;

enum class PoleMethod { structured, dense };

struct StabilityOptions {
  FixedPointOptions fixed_point;
  PoleMethod method = PoleMethod::structured;
  // |rho - 1| <= marginal_band is reported as marginal.
  double marginal_band = 1e-9;
};

struct UnstablePole {
  std::complex<double> pole;
  double radius = 0.0;
  double angle = 0.0;         // radians in [0, pi]
  double frequency_hz = 0.0;  // angle / (2 pi) * inference rate
};

struct StabilityReport {
  Verdict verdict = Verdict::indeterminate;
  bool stable = false;  // rho <= 1
  double spectral_radius = NAN;
  double margin = NAN;  // 1 - rho
  double inference_rate = 0.0;
  PoleSet poles;
  std::vector<UnstablePole> unstable;  // one entry per pole with |z| > 1 and Im z >= 0
  FixedPoint fixed_point;
  bool low_confidence = false;
  std::string note;
};

// Model-only part of the analysis, reusable across filters.
struct RestLinearisation {
  bool ok = false;
  std::string failure;
  FixedPoint fixed_point;
  Matrix jacobian;
  PoleSet jacobian_eigenvalues;
};

template <RecurrentModel M>
RestLinearisation linearise_at_rest(const M& model, const FixedPointOptions& opts = {});

StabilityReport assess_stability(const RestLinearisation& lin, std::span<const double> taps,
                                 double inference_rate, const StabilityOptions& opts = {});

template <RecurrentModel M>
StabilityReport predict_stability(const M& model, const FirCoefficients& filter,
                                  double inference_rate, const StabilityOptions& opts = {}) {
  return assess_stability(linearise_at_rest(model, opts.fixed_point), filter.taps, inference_rate,
                          opts);
}

// ---------------------------------------------------------------------------

namespace detail {

template <RecurrentModel M>
std::vector<double> rest_input_for(const M& model, std::span<const double> rest) {
  if (rest.empty()) return std::vector<double>(model.input_dim(), 0.0);
  if (rest.size() != model.input_dim()) throw ShapeError("rest input has wrong length");
  return {rest.begin(), rest.end()};
}

}  // namespace detail

template <RecurrentModel M>
FixedPoint find_fixed_point(const M& model, const FixedPointOptions& opts) {
  if (opts.average_length == 0 || opts.average_length > opts.run_length) {
    throw ArgumentError("fixed point: need 0 < average_length <= run_length");
  }
  const std::size_t dim = model.state_dim();
  const std::vector<double> input = detail::rest_input_for(model, opts.rest_input);
  auto scratch = model.make_scratch();
  std::vector<double> prev(dim, 0.0), next(dim, 0.0);
  std::vector<double> sum(dim, 0.0);

  // Window states are kept to measure the spread around the mean.
  std::vector<double> window(opts.average_length * dim);
  const std::size_t window_start = opts.run_length - opts.average_length;
  for (std::size_t n = 0; n < opts.run_length; ++n) {
    model.step(prev, input, next, scratch);
    if (!detail::all_finite(next)) {
      throw NumericError("zero-input trajectory became non-finite at sample " + std::to_string(n),
                         n);
    }
    if (n >= window_start) {
      std::copy(next.begin(), next.end(),
                window.begin() + static_cast<std::ptrdiff_t>((n - window_start) * dim));
      for (std::size_t i = 0; i < dim; ++i) sum[i] += next[i];
    }
    std::swap(prev, next);
  }

  FixedPoint fp;
  fp.run_length = opts.run_length;
  fp.average_length = opts.average_length;
  fp.state.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) fp.state[i] = sum[i] / static_cast<double>(opts.average_length);
  for (std::size_t w = 0; w < opts.average_length; ++w) {
    for (std::size_t i = 0; i < dim; ++i) {
      fp.spread = std::max(fp.spread, std::fabs(window[w * dim + i] - fp.state[i]));
    }
  }
  model.step(fp.state, input, next, scratch);
  for (std::size_t i = 0; i < dim; ++i) fp.residual = std::max(fp.residual, std::fabs(next[i] - fp.state[i]));
  fp.low_confidence = !(fp.residual <= opts.residual_tolerance);
  return fp;
}

template <RecurrentModel M>
LinearisedSystem linearise(const M& model, const FixedPoint& fp, std::span<const double> taps,
                           std::span<const double> rest_input) {
  const std::vector<double> input = detail::rest_input_for(model, rest_input);
  LinearisedSystem sys;
  sys.jacobian = model.jacobian(fp.state, input);
  sys.taps.assign(taps.begin(), taps.end());
  sys.companion = build_companion(sys.jacobian, taps);

  const std::size_t dim = model.state_dim();
  std::vector<double> fa(dim);
  auto scratch = model.make_scratch();
  model.step(fp.state, input, fa, scratch);
  sys.offset.assign(dim * taps.size(), 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    double ja = 0.0;
    for (std::size_t j = 0; j < dim; ++j) ja += sys.jacobian(i, j) * fp.state[j];
    sys.offset[i] = fa[i] - ja;
  }
  return sys;
}

template <RecurrentModel M>
RestLinearisation linearise_at_rest(const M& model, const FixedPointOptions& opts) {
  RestLinearisation lin;
  try {
    lin.fixed_point = find_fixed_point(model, opts);
  } catch (const NumericError& e) {
    lin.failure = e.what();
    return lin;
  }
  const std::vector<double> input = detail::rest_input_for(model, opts.rest_input);
  lin.jacobian = model.jacobian(lin.fixed_point.state, input);
  lin.jacobian_eigenvalues = eigenvalues(lin.jacobian);
  lin.ok = true;
  return lin;
}

}  // namespace srirnn
