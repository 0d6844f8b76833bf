// Minimax (complex Chebyshev) fractional-delay design as a second-order cone
// program in epigraph form:
//
//   minimise t  s.t.  |r_i(l)| <= t for every grid frequency, sum(l) = 1,
//
// where r_i(l) = sum_k l_k e^{-j w_i k} - e^{-j w_i delta}. The equality is
// eliminated by writing l = l_lagrange + N y with N spanning the zero-sum
// subspace, and the cones are handled with the log barrier
// -log(t^2 - |r_i|^2) (parameter 2 per cone) in a damped Newton path
// following scheme.

#include <cmath>
#include <complex>
#include <vector>

#include "srirnn/error.hpp"
#include "srirnn/filters.hpp"

namespace srirnn {
namespace {

using cplx = std::complex<double>;

constexpr double kBarrierParameter = 2.0;
constexpr double kTauGrowth = 10.0;

// In-place Cholesky solve of the (n x n) SPD system a x = b. Returns false if
// a is not numerically positive definite.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * b[k];
    b[i] = v / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= a[k * n + i] * b[k];
    b[i] = v / a[i * n + i];
  }
  return true;
}

class BarrierProblem {
 public:
  BarrierProblem(std::span<const double> start, double delta, std::span<const double> omega)
      : dim_(start.size() - 1), m_(omega.size()), r0_(m_), basis_(m_ * dim_) {
    for (std::size_t i = 0; i < m_; ++i) {
      const double w = omega[i];
      cplx acc{0.0, 0.0};
      for (std::size_t k = 0; k < start.size(); ++k) {
        acc += start[k] * std::polar(1.0, -w * static_cast<double>(k));
      }
      r0_[i] = acc - std::polar(1.0, -w * delta);
      for (std::size_t j = 0; j < dim_; ++j) {
        basis_[i * dim_ + j] = std::polar(1.0, -w * static_cast<double>(j + 1)) - 1.0;
      }
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t cones() const { return m_; }

  cplx residual(std::size_t i, std::span<const double> y) const {
    cplx r = r0_[i];
    for (std::size_t j = 0; j < dim_; ++j) r += basis_[i * dim_ + j] * y[j];
    return r;
  }

  double max_residual(std::span<const double> y) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < m_; ++i) worst = std::max(worst, std::abs(residual(i, y)));
    return worst;
  }

  // Barrier objective at x = (y, t); +inf outside the cone interior.
  double value(std::span<const double> x, double tau) const {
    const double t = x[dim_];
    if (!(t > 0.0)) return INFINITY;
    double acc = tau * t;
    for (std::size_t i = 0; i < m_; ++i) {
      const double s = t * t - std::norm(residual(i, x));
      if (!(s > 0.0)) return INFINITY;
      acc -= std::log(s);
    }
    return acc;
  }

  // Gradient and Hessian (row-major, (dim+1)^2).
  void derivatives(std::span<const double> x, double tau, std::vector<double>& grad,
                   std::vector<double>& hess) const {
    const std::size_t n = dim_ + 1;
    const double t = x[dim_];
    grad.assign(n, 0.0);
    hess.assign(n * n, 0.0);
    grad[dim_] = tau;
    std::vector<double> a(dim_);
    for (std::size_t i = 0; i < m_; ++i) {
      const cplx r = residual(i, x);
      const double s = t * t - std::norm(r);
      const double inv_s = 1.0 / s;
      const double inv_s2 = inv_s * inv_s;
      const cplx* mi = basis_.data() + i * dim_;
      for (std::size_t j = 0; j < dim_; ++j) a[j] = (std::conj(r) * mi[j]).real();
      for (std::size_t j = 0; j < dim_; ++j) {
        grad[j] += 2.0 * a[j] * inv_s;
        for (std::size_t k = 0; k <= j; ++k) {
          const double v = 4.0 * a[j] * a[k] * inv_s2 + 2.0 * (std::conj(mi[j]) * mi[k]).real() * inv_s;
          hess[j * n + k] += v;
        }
        hess[dim_ * n + j] += -4.0 * t * a[j] * inv_s2;
      }
      grad[dim_] -= 2.0 * t * inv_s;
      hess[dim_ * n + dim_] += 4.0 * t * t * inv_s2 - 2.0 * inv_s;
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) hess[j * n + k] = hess[k * n + j];
    }
  }

 private:
  std::size_t dim_;
  std::size_t m_;
  std::vector<cplx> r0_;
  std::vector<cplx> basis_;
};

}  // namespace

FirCoefficients minimax_coeffs(double delta, std::size_t order, const MinimaxOptions& opts) {
  if (order < 1) throw ArgumentError("minimax design needs order >= 1");
  if (!std::isfinite(delta)) throw ArgumentError("delta must be finite");
  const std::vector<double> omega = band_grid(opts.band_fraction, opts.grid_size);

  // Lagrange taps are feasible (unit DC gain) and seed the path.
  FirCoefficients result = lagrange_coeffs(delta, order);
  result.method = DesignMethod::minimax;
  const double start_error = band_error(result.taps, delta, omega);
  if (start_error == 0.0) {
    result.objective = 0.0;
    result.duality_gap = 0.0;
    return result;
  }

  const BarrierProblem problem(result.taps, delta, omega);
  const std::size_t n = problem.dim() + 1;
  std::vector<double> x(n, 0.0);
  x[problem.dim()] = 1.1 * start_error + 1e-3;

  std::vector<double> grad, hess, step(n), trial(n);
  double tau = 1.0;
  const double m = static_cast<double>(problem.cones());
  for (;;) {
    for (std::size_t it = 0;; ++it) {
      if (it >= opts.max_newton_steps) {
        throw ConvergenceError("minimax: Newton centering did not converge (tau=" +
                               std::to_string(tau) + ", t=" + std::to_string(x[n - 1]) + ")");
      }
      problem.derivatives(x, tau, grad, hess);
      for (std::size_t i = 0; i < n; ++i) step[i] = -grad[i];
      if (!cholesky_solve(hess, step, n)) {
        throw ConvergenceError("minimax: barrier Hessian lost positive definiteness (tau=" +
                               std::to_string(tau) + ")");
      }
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += grad[i] * step[i];
      const double decrement = -slope;
      if (decrement / 2.0 <= 1e-14) break;

      const double f0 = problem.value(x, tau);
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-16) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + alpha * step[i];
        const double f1 = problem.value(trial, tau);
        if (std::isfinite(f1) && f1 <= f0 + 0.25 * alpha * slope) {
          moved = f1 < f0;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;  // at the rounding floor
      x.swap(trial);
    }
    if (kBarrierParameter * m / tau <= opts.gap_tolerance) break;
    tau *= kTauGrowth;
  }

  std::span<const double> y(x.data(), problem.dim());
  double moved_sum = 0.0;
  for (std::size_t j = 0; j < problem.dim(); ++j) {
    result.taps[j + 1] += y[j];
    moved_sum += y[j];
  }
  result.taps[0] -= moved_sum;
  result.objective = band_error(result.taps, delta, omega);
  result.duality_gap = kBarrierParameter * m / tau;
  return result;
}

}  // namespace srirnn
