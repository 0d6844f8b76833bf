#pragma once

#include <complex>
#include <vector>

#include "srirnn/matrix.hpp"

namespace srirnn {

// All eigenvalues of a dense real (non-symmetric) matrix: balancing,
// Householder reduction to upper Hessenberg form, then Francis double-shift
// QR. Complex eigenvalues are returned as adjacent conjugate pairs, positive
// imaginary part first. Throws ConvergenceError if an eigenvalue fails to
// deflate within the iteration budget. Reentrant.
std::vector<std::complex<double>> eigenvalues(Matrix a);

// Roots of the monic polynomial z^n + c[0] z^{n-1} + ... + c[n-1] via the
// eigenvalues of its companion matrix.
std::vector<std::complex<double>> monic_roots(const std::vector<double>& c);

Matrix multiply(const Matrix& a, const Matrix& b);

}  // namespace srirnn
