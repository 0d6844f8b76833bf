// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace srirnn::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double dot_raw(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

// Four rows per pass so each load of x is reused.
template <bool kAccumulate>
void gemv4(const double* w, std::size_t rows, std::size_t cols, const double* x,
           const double* bias, double* y) {
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    const double* w0 = w + r * cols;
    const double* w1 = w0 + cols;
    const double* w2 = w1 + cols;
    const double* w3 = w2 + cols;
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d xv = _mm256_loadu_pd(x + c);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + c), xv, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + c), xv, a1);
      a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + c), xv, a2);
      a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + c), xv, a3);
    }
    // Reduce the four accumulators into one vector of row sums.
    const __m256d t0 = _mm256_hadd_pd(a0, a1);
    const __m256d t1 = _mm256_hadd_pd(a2, a3);
    const __m256d swapped = _mm256_permute2f128_pd(t0, t1, 0x21);
    const __m256d blended = _mm256_blend_pd(t0, t1, 0b1100);
    __m256d sums = _mm256_add_pd(swapped, blended);
    if (c < cols) {
      alignas(32) double tail[4] = {0.0, 0.0, 0.0, 0.0};
      for (std::size_t cc = c; cc < cols; ++cc) {
        tail[0] += w0[cc] * x[cc];
        tail[1] += w1[cc] * x[cc];
        tail[2] += w2[cc] * x[cc];
        tail[3] += w3[cc] * x[cc];
      }
      sums = _mm256_add_pd(sums, _mm256_load_pd(tail));
    }
    if constexpr (kAccumulate) {
      _mm256_storeu_pd(y + r, _mm256_add_pd(_mm256_loadu_pd(y + r), sums));
    } else {
      _mm256_storeu_pd(y + r, _mm256_add_pd(_mm256_loadu_pd(bias + r), sums));
    }
  }
  for (; r < rows; ++r) {
    const double acc = dot_raw(w + r * cols, x, cols);
    if constexpr (kAccumulate) {
      y[r] += acc;
    } else {
      y[r] = bias[r] + acc;
    }
  }
}

void gemv_bias(std::span<const double> w, std::size_t rows, std::size_t cols,
               std::span<const double> x, std::span<const double> bias, std::span<double> y) {
  gemv4<false>(w.data(), rows, cols, x.data(), bias.data(), y.data());
}

void gemv_accumulate(std::span<const double> w, std::size_t rows, std::size_t cols,
                     std::span<const double> x, std::span<double> y) {
  gemv4<true>(w.data(), rows, cols, x.data(), nullptr, y.data());
}

double dot(std::span<const double> a, std::span<const double> b) {
  return dot_raw(a.data(), b.data(), a.size());
}

void weighted_sum(std::span<const double> taps, std::span<const double* const> rows,
                  std::span<double> y) {
  const std::size_t n = y.size();
  double* out = y.data();
  const __m256d t0 = _mm256_set1_pd(taps[0]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_mul_pd(t0, _mm256_loadu_pd(rows[0] + i));
    for (std::size_t k = 1; k < taps.size(); ++k) {
      acc = _mm256_fmadd_pd(_mm256_set1_pd(taps[k]), _mm256_loadu_pd(rows[k] + i), acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = taps[0] * rows[0][i];
    for (std::size_t k = 1; k < taps.size(); ++k) acc += taps[k] * rows[k][i];
    out[i] = acc;
  }
}

constexpr KernelTable kAvx2{Backend::avx2, gemv_bias, gemv_accumulate, dot, weighted_sum};

}  // namespace

const KernelTable& detail::avx2_kernels() noexcept { return kAvx2; }

}  // namespace srirnn::simd
