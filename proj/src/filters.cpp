#include "srirnn/filters.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include "srirnn/error.hpp"

namespace srirnn {

Ratio Ratio::make(std::int64_t p, std::int64_t q) {
  if (p <= 0 || q <= 0) {
    throw ArgumentError("ratio terms must be positive, got " + std::to_string(p) + "/" +
                        std::to_string(q));
  }
  const std::int64_t g = std::gcd(p, q);
  return Ratio{p / g, q / g};
}

Ratio Ratio::parse(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  const auto last = text.find_last_not_of(" \t");
  text = first == std::string_view::npos ? std::string_view{} : text.substr(first, last - first + 1);
  auto parse_int = [&](std::string_view part) {
    std::int64_t v = 0;
    const auto* end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, v);
    if (ec != std::errc() || ptr != end || part.empty()) {
      throw ArgumentError("malformed ratio '" + std::string(text) + "', expected P/Q");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return make(parse_int(text), 1);
  return make(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

DelaySpec delta_for_ratio(Ratio ratio, double train_rate) {
  if (!(train_rate > 0.0)) throw ArgumentError("train_rate must be positive");
  const Ratio r = Ratio::make(ratio.num, ratio.den);
  DelaySpec spec;
  spec.train_rate = train_rate;
  spec.ratio = r;
  spec.inference_rate = train_rate * static_cast<double>(r.num) / static_cast<double>(r.den);
  spec.delta = static_cast<double>(r.num - r.den) / static_cast<double>(r.den);
  return spec;
}

DelaySpec delta_for_ratio(std::int64_t p, std::int64_t q, double train_rate) {
  return delta_for_ratio(Ratio::make(p, q), train_rate);
}

std::string_view to_string(DesignMethod m) noexcept {
  switch (m) {
    case DesignMethod::identity:
      return "naive";
    case DesignMethod::lagrange:
      return "lagrange";
    case DesignMethod::minimax:
      return "minimax";
  }
  return "unknown";
}

DesignMethod parse_design_method(std::string_view text) {
  if (text == "lagrange") return DesignMethod::lagrange;
  if (text == "minimax") return DesignMethod::minimax;
  if (text == "naive" || text == "identity" || text == "none") return DesignMethod::identity;
  throw ArgumentError("unknown filter method '" + std::string(text) +
                      "' (expected lagrange, minimax or naive)");
}

FirCoefficients identity_filter() {
  FirCoefficients f;
  f.taps = {1.0};
  f.method = DesignMethod::identity;
  return f;
}

FirCoefficients lagrange_coeffs(double delta, std::size_t order) {
  if (!std::isfinite(delta)) throw ArgumentError("delta must be finite");
  if (order == 0 && delta != 0.0) {
    throw ArgumentError("an order-0 filter cannot represent a non-zero delay");
  }
  FirCoefficients f;
  f.method = DesignMethod::lagrange;
  f.delta = delta;
  f.taps.resize(order + 1);
  for (std::size_t k = 0; k <= order; ++k) {
    double l = 1.0;
    for (std::size_t j = 0; j <= order; ++j) {
      if (j == k) continue;
      l *= (delta - static_cast<double>(j)) /
           (static_cast<double>(k) - static_cast<double>(j));
    }
    if (!std::isfinite(l)) {
      throw ArgumentError("Lagrange taps overflow for order " + std::to_string(order));
    }
    f.taps[k] = l;
  }
  f.objective = std::nan("");
  return f;
}

std::vector<double> band_grid(double band_fraction, std::size_t grid_size) {
  if (!(band_fraction > 0.0 && band_fraction <= 0.5)) {
    throw ArgumentError("band fraction must lie in (0, 0.5]");
  }
  if (grid_size < 2) throw ArgumentError("frequency grid needs at least 2 points");
  const double edge = 2.0 * std::numbers::pi * band_fraction;
  std::vector<double> w(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    w[i] = edge * static_cast<double>(i) / static_cast<double>(grid_size - 1);
  }
  return w;
}

std::complex<double> dtft(std::span<const double> taps, double omega) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < taps.size(); ++k) {
    acc += taps[k] * std::polar(1.0, -omega * static_cast<double>(k));
  }
  return acc;
}

double band_error(std::span<const double> taps, double delta, std::span<const double> omega) {
  double worst = 0.0;
  for (double w : omega) {
    worst = std::max(worst, std::abs(dtft(taps, w) - std::polar(1.0, -w * delta)));
  }
  return worst;
}

FrequencyResponse frequency_response(const FirCoefficients& filter, std::size_t grid_size) {
  if (filter.taps.empty()) throw ArgumentError("frequency_response: filter has no taps");
  if (grid_size < 2) throw ArgumentError("frequency_response: grid needs at least 2 points");
  FrequencyResponse r;
  r.omega.resize(grid_size);
  r.response.resize(grid_size);
  r.magnitude.resize(grid_size);
  r.phase_delay_error.resize(grid_size);

  const double dc = std::accumulate(filter.taps.begin(), filter.taps.end(), 0.0);
  double first_moment = 0.0;
  for (std::size_t k = 0; k < filter.taps.size(); ++k) {
    first_moment += static_cast<double>(k) * filter.taps[k];
  }

  double unwrapped = dc < 0.0 ? std::numbers::pi : 0.0;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double w = std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const auto h = dtft(filter.taps, w);
    r.omega[i] = w;
    r.response[i] = h;
    r.magnitude[i] = std::abs(h);
    if (i == 0) {
      // Limit of -arg H(w) / w as w -> 0.
      r.phase_delay_error[i] = first_moment / dc - filter.delta;
      continue;
    }
    const double raw = std::arg(h);
    const double turns = std::round((unwrapped - raw) / (2.0 * std::numbers::pi));
    unwrapped = raw + turns * 2.0 * std::numbers::pi;
    r.phase_delay_error[i] = -unwrapped / w - filter.delta;
  }
  return r;
}

FirCoefficients design_filter(DesignMethod method, double delta, std::size_t order,
                              const MinimaxOptions& opts) {
  switch (method) {
    case DesignMethod::identity: {
      auto f = identity_filter();
      f.delta = delta;
      return f;
    }
    case DesignMethod::lagrange:
      return lagrange_coeffs(delta, order);
    case DesignMethod::minimax:
      return minimax_coeffs(delta, order, opts);
  }
  throw ArgumentError("unknown design method");
}

}  // namespace srirnn
