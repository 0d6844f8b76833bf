#pragma once

#include "srirnn/simd/kernels.hpp"

namespace srirnn::simd::detail {

const KernelTable& avx2_kernels() noexcept;

}  // namespace srirnn::simd::detail
