#pragma once

// Data-parallel inner loops of the recurrent inference path. Every kernel has
// a portable scalar reference implementation; vectorised variants are chosen
// at runtime from the host CPU and must agree with the reference to within
// floating-point reassociation error.

#include <cstddef>
#include <span>
#include <string_view>

namespace srirnn::simd {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend b) noexcept;

struct KernelTable {
  Backend backend;

  // y[r] = bias[r] + sum_c w[r * cols + c] * x[c] for r in [0, rows).
  void (*gemv_bias)(std::span<const double> w, std::size_t rows, std::size_t cols,
                    std::span<const double> x, std::span<const double> bias,
                    std::span<double> y);

  // y[r] += sum_c w[r * cols + c] * x[c].
  void (*gemv_accumulate)(std::span<const double> w, std::size_t rows, std::size_t cols,
                          std::span<const double> x, std::span<double> y);

  double (*dot)(std::span<const double> a, std::span<const double> b);

  // y[i] = sum_k taps[k] * rows[k][i], i in [0, y.size()). The first term is a
  // plain product so that a single unit tap copies its row bit-exactly.
  void (*weighted_sum)(std::span<const double> taps, std::span<const double* const> rows,
                       std::span<double> y);
};

const KernelTable& scalar_kernels() noexcept;

// True when the variant was compiled in and the CPU supports it.
bool available(Backend b) noexcept;

// Kernel table for a specific backend; throws ArgumentError if unavailable.
const KernelTable& kernels(Backend b);

// Best backend for this host, unless overridden by set_active_backend() or
// the SRIRNN_KERNELS environment variable ("scalar" or "avx2").
const KernelTable& active() noexcept;
Backend active_backend() noexcept;
void set_active_backend(Backend b);

}  // namespace srirnn::simd
