#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "srirnn/error.hpp"

namespace srirnn::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(SRIRNN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("SRIRNN_KERNELS")) {
    const std::string requested(env);
    if (requested == "scalar") return Backend::scalar;
    if (requested == "avx2" && available(Backend::avx2)) return Backend::avx2;
  }
  return available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& active_slot() noexcept {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

}  // namespace

std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

bool available(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2: {
      static const bool has = cpu_has_avx2();
      return has;
    }
  }
  return false;
}

const KernelTable& kernels(Backend b) {
  if (!available(b)) {
    throw ArgumentError("kernel backend '" + std::string(to_string(b)) +
                        "' is not available on this host");
  }
#if defined(SRIRNN_HAVE_AVX2)
  if (b == Backend::avx2) return detail::avx2_kernels();
#endif
  return scalar_kernels();
}

const KernelTable& active() noexcept {
  const Backend b = active_slot().load(std::memory_order_relaxed);
#if defined(SRIRNN_HAVE_AVX2)
  if (b == Backend::avx2) return detail::avx2_kernels();
#endif
  return scalar_kernels();
}

Backend active_backend() noexcept { return active_slot().load(std::memory_order_relaxed); }

void set_active_backend(Backend b) {
  if (!available(b)) {
    throw ArgumentError("kernel backend '" + std::string(to_string(b)) +
                        "' is not available on this host");
  }
  active_slot().store(b, std::memory_order_relaxed);
}

}  // namespace srirnn::simd
