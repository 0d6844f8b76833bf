#include "srirnn/simd/kernels.hpp"

namespace srirnn::simd {
namespace {

void gemv_bias(std::span<const double> w, std::size_t rows, std::size_t cols,
               std::span<const double> x, std::span<const double> bias, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = bias[r] + acc;
  }
}

void gemv_accumulate(std::span<const double> w, std::size_t rows, std::size_t cols,
                     std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void weighted_sum(std::span<const double> taps, std::span<const double* const> rows,
                  std::span<double> y) {
  const double* first = rows[0];
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = taps[0] * first[i];
  for (std::size_t k = 1; k < taps.size(); ++k) {
    const double t = taps[k];
    const double* src = rows[k];
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * src[i];
  }
}

constexpr KernelTable kScalar{Backend::scalar, gemv_bias, gemv_accumulate, dot, weighted_sum};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace srirnn::simd
