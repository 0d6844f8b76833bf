#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srirnn/filters.hpp"

namespace srirnn {

// Largest prefix length of an n-sample signal that `rate` maps to an
// integral number of samples (a multiple of rate.den).
std::size_t resample_input_length(std::size_t n, Ratio rate);

std::size_t resampled_length(std::size_t n, Ratio rate);

// Whole-signal DFT rate conversion by P/Q: forward real DFT of length N,
// spectrum truncated or zero padded to M = N P / Q bins, inverse DFT of length
// M, amplitude scaled by M / N. Even-length Nyquist bins are split between
// the two conjugate positions on upsampling and folded (both conjugate
// halves summed) on downsampling. Requires N % Q == 0 and N >= 2. A unit
// ratio returns the input unchanged.
std::vector<double> dft_resample(std::span<const double> x, Ratio rate);

}  // namespace srirnn
