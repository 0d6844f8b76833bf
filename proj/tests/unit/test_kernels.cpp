#include <doctest.h>

#include <cstdlib>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "srirnn/error.hpp"
#include "srirnn/simd/kernels.hpp"

using namespace srirnn;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("scalar backend is always available") {
  CHECK(simd::available(simd::Backend::scalar));
  CHECK(simd::kernels(simd::Backend::scalar).backend == simd::Backend::scalar);
}

TEST_CASE("vector kernels agree with the scalar reference") {
  if (!simd::available(simd::Backend::avx2)) {
    MESSAGE("avx2 backend not available on this host; skipping");
    return;
  }
  const auto& ref = simd::scalar_kernels();
  const auto& vec = simd::kernels(simd::Backend::avx2);
  std::mt19937_64 rng(11);
  // Odd sizes exercise the remainder paths.
  for (std::size_t rows : {1u, 3u, 4u, 7u, 32u, 161u}) {
    for (std::size_t cols : {1u, 2u, 5u, 8u, 13u, 80u}) {
      const auto w = oracle::gaussian(rng, rows * cols, 1.0);
      const auto x = oracle::gaussian(rng, cols, 1.0);
      const auto b = oracle::gaussian(rng, rows, 1.0);
      std::vector<double> y0(rows), y1(rows);
      ref.gemv_bias(w, rows, cols, x, b, y0);
      vec.gemv_bias(w, rows, cols, x, b, y1);
      CHECK(max_abs_diff(y0, y1) <= 1e-12 * static_cast<double>(cols));

      std::vector<double> a0 = b, a1 = b;
      ref.gemv_accumulate(w, rows, cols, x, a0);
      vec.gemv_accumulate(w, rows, cols, x, a1);
      CHECK(max_abs_diff(a0, a1) <= 1e-12 * static_cast<double>(cols));
    }
  }
  for (std::size_t n : {0u, 1u, 3u, 4u, 9u, 100u, 1001u}) {
    const auto a = oracle::gaussian(rng, n, 1.0);
    const auto b = oracle::gaussian(rng, n, 1.0);
    CHECK(std::abs(ref.dot(a, b) - vec.dot(a, b)) <= 1e-12 * static_cast<double>(n + 1));
  }
  for (std::size_t taps : {1u, 2u, 4u, 6u}) {
    for (std::size_t len : {1u, 5u, 8u, 80u, 81u}) {
      const auto t = oracle::gaussian(rng, taps, 1.0);
      std::vector<std::vector<double>> rows_data;
      std::vector<const double*> rows;
      for (std::size_t k = 0; k < taps; ++k) {
        rows_data.push_back(oracle::gaussian(rng, len, 1.0));
      }
      for (const auto& r : rows_data) rows.push_back(r.data());
      std::vector<double> y0(len), y1(len);
      ref.weighted_sum(t, rows, y0);
      vec.weighted_sum(t, rows, y1);
      CHECK(max_abs_diff(y0, y1) <= 1e-13);
    }
  }
}

TEST_CASE("a single unit tap copies bit-exactly on every backend") {
  std::mt19937_64 rng(5);
  const auto row = oracle::gaussian(rng, 37, 10.0);
  const std::vector<double> one = {1.0};
  const std::vector<const double*> rows = {row.data()};
  for (auto b : {simd::Backend::scalar, simd::Backend::avx2}) {
    if (!simd::available(b)) continue;
    std::vector<double> y(row.size());
    simd::kernels(b).weighted_sum(one, rows, y);
    CHECK(y == row);
  }
}

TEST_CASE("backend selection") {
  const auto before = simd::active_backend();
  simd::set_active_backend(simd::Backend::scalar);
  CHECK(simd::active().backend == simd::Backend::scalar);
  if (!simd::available(simd::Backend::avx2)) {
    CHECK_THROWS_AS(simd::set_active_backend(simd::Backend::avx2), ArgumentError);
  }
  simd::set_active_backend(before);
  CHECK(simd::active_backend() == before);
  CHECK(simd::to_string(simd::Backend::avx2) == "avx2");
}
