#include "srirnn/analysis.hpp"

#include <limits>
#include <numbers>

namespace srirnn {

using cplx = std::complex<double>;

Matrix build_companion(const Matrix& jacobian, std::span<const double> taps) {
  if (!jacobian.square() || jacobian.rows() == 0) {
    throw ShapeError("build_companion: Jacobian must be square and non-empty");
  }
  if (taps.empty()) throw ShapeError("build_companion: filter has no taps");
  const std::size_t h = jacobian.rows();
  const std::size_t blocks = taps.size();
  Matrix a(h * blocks, h * blocks);
  for (std::size_t k = 0; k < blocks; ++k) {
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < h; ++j) a(i, k * h + j) = taps[k] * jacobian(i, j);
    }
  }
  for (std::size_t i = h; i < h * blocks; ++i) a(i, i - h) = 1.0;
  return a;
}

PoleSet poles_dense(const Matrix& companion) { return eigenvalues(companion); }

namespace {

// Roots of z^{K+1} - mu (l_0 z^K + ... + l_K) for real mu.
void append_real_factor_roots(double mu, std::span<const double> taps, PoleSet& out) {
  std::vector<double> c(taps.size());
  for (std::size_t k = 0; k < taps.size(); ++k) c[k] = -mu * taps[k];
  // Trailing zero coefficients are roots at the origin.
  std::size_t zeros = 0;
  while (!c.empty() && c.back() == 0.0) {
    c.pop_back();
    ++zeros;
  }
  const auto roots = monic_roots(c);
  out.insert(out.end(), roots.begin(), roots.end());
  out.insert(out.end(), zeros, cplx{0.0, 0.0});
}

// Roots for a conjugate pair (mu, conj(mu)). The complex companion C of the
// mu-polynomial is embedded as the real matrix [Re C, -Im C; Im C, Re C],
// whose spectrum is eig(C) together with its conjugates: exactly the roots
// of both factors.
void append_complex_pair_roots(cplx mu, std::span<const double> taps, PoleSet& out) {
  const std::size_t n = taps.size();
  Matrix emb(2 * n, 2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx top = mu * taps[j];
    emb(0, j) = top.real();
    emb(0, n + j) = -top.imag();
    emb(n, j) = top.imag();
    emb(n, n + j) = top.real();
  }
  for (std::size_t i = 1; i < n; ++i) {
    emb(i, i - 1) = 1.0;
    emb(n + i, n + i - 1) = 1.0;
  }
  const auto roots = eigenvalues(std::move(emb));
  out.insert(out.end(), roots.begin(), roots.end());
}

}  // namespace

PoleSet poles_structured_from_eigenvalues(std::span<const cplx> mus, std::span<const double> taps) {
  if (taps.empty()) throw ShapeError("poles_structured: filter has no taps");
  PoleSet poles;
  poles.reserve(mus.size() * taps.size());
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const cplx mu = mus[i];
    if (mu.imag() == 0.0) {
      if (mu.real() == 0.0) {
        poles.insert(poles.end(), taps.size(), cplx{0.0, 0.0});
      } else {
        append_real_factor_roots(mu.real(), taps, poles);
      }
    } else if (mu.imag() > 0.0) {
      append_complex_pair_roots(mu, taps, poles);
    }
    // Negative-imaginary partners are covered by their pair.
  }
  if (poles.size() != mus.size() * taps.size()) {
    throw ConvergenceError("poles_structured: eigenvalues of J are not in conjugate pairs");
  }
  return poles;
}

PoleSet poles_structured(const Matrix& jacobian, std::span<const double> taps) {
  if (!jacobian.square()) throw ShapeError("poles_structured: Jacobian must be square");
  return poles_structured_from_eigenvalues(eigenvalues(jacobian), taps);
}

double multiset_distance(const PoleSet& a, const PoleSet& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const cplx& p : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(p - b[j]);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    used[best_j] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

double conjugate_asymmetry(const PoleSet& p) {
  PoleSet c(p.size());
  std::transform(p.begin(), p.end(), c.begin(), [](cplx z) { return std::conj(z); });
  return multiset_distance(p, c);
}

double spectral_radius(const PoleSet& p) {
  double r = 0.0;
  for (const cplx& z : p) r = std::max(r, std::abs(z));
  return r;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::stable:
      return "stable";
    case Verdict::marginal:
      return "marginal";
    case Verdict::unstable:
      return "unstable";
    case Verdict::indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

StabilityReport assess_stability(const RestLinearisation& lin, std::span<const double> taps,
                                 double inference_rate, const StabilityOptions& opts) {
  StabilityReport rep;
  rep.inference_rate = inference_rate;
  if (!lin.ok) {
    rep.verdict = Verdict::indeterminate;
    rep.note = "no fixed point: " + lin.failure;
    rep.low_confidence = true;
    return rep;
  }
  rep.fixed_point = lin.fixed_point;
  rep.low_confidence = lin.fixed_point.low_confidence;
  if (rep.low_confidence) rep.note = "fixed-point residual above tolerance; trajectory may be a limit cycle";

  if (opts.method == PoleMethod::dense) {
    try {
      rep.poles = poles_dense(build_companion(lin.jacobian, taps));
    } catch (const ConvergenceError&) {
      rep.poles = poles_structured_from_eigenvalues(lin.jacobian_eigenvalues, taps);
      rep.note += rep.note.empty() ? "" : "; ";
      rep.note += "dense eigensolver did not converge, used structured poles";
    }
  } else {
    rep.poles = poles_structured_from_eigenvalues(lin.jacobian_eigenvalues, taps);
  }

  rep.spectral_radius = spectral_radius(rep.poles);
  rep.margin = 1.0 - rep.spectral_radius;
  rep.stable = rep.spectral_radius <= 1.0;
  if (std::fabs(rep.spectral_radius - 1.0) <= opts.marginal_band) {
    rep.verdict = Verdict::marginal;
  } else {
    rep.verdict = rep.stable ? Verdict::stable : Verdict::unstable;
  }
  for (const cplx& z : rep.poles) {
    const double r = std::abs(z);
    if (r > 1.0 && z.imag() >= 0.0) {
      const double angle = std::fabs(std::arg(z));
      rep.unstable.push_back({z, r, angle, angle / (2.0 * std::numbers::pi) * inference_rate});
    }
  }
  std::sort(rep.unstable.begin(), rep.unstable.end(),
            [](const UnstablePole& a, const UnstablePole& b) {
              if (a.radius != b.radius) return a.radius > b.radius;
              return a.angle < b.angle;
            });
  return rep;
}

}  // namespace srirnn
