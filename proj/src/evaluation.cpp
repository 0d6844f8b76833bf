#include "srirnn/evaluation.hpp"

#include <charconv>
#include <map>
#include <optional>
#include <random>
#include <tuple>

namespace srirnn {

SnrResult snr(std::span<const double> y_test, std::span<const double> y_ref, std::size_t truncate) {
  if (y_test.size() != y_ref.size()) {
    throw ShapeError("snr: length mismatch (" + std::to_string(y_test.size()) + " vs " +
                     std::to_string(y_ref.size()) + ")");
  }
  if (y_ref.size() <= truncate) {
    throw ArgumentError("snr: signal of " + std::to_string(y_ref.size()) +
                        " samples is not longer than the truncation of " + std::to_string(truncate));
  }
  double signal = 0.0;
  double noise = 0.0;
  for (std::size_t n = truncate; n < y_ref.size(); ++n) {
    const double e = y_test[n] - y_ref[n];
    signal += y_ref[n] * y_ref[n];
    noise += e * e;
  }
  if (signal == 0.0) throw ArgumentError("snr: reference has zero energy");

  SnrResult r;
  r.samples = y_ref.size() - truncate;
  r.truncation = truncate;
  if (!std::isfinite(noise)) {
    r.snr_linear = 0.0;
    r.snr_db = -std::numeric_limits<double>::infinity();
  } else if (noise == 0.0) {
    r.snr_linear = std::numeric_limits<double>::infinity();
    r.snr_db = std::numeric_limits<double>::infinity();
  } else {
    r.snr_linear = signal / noise;
    r.snr_db = 10.0 * std::log10(r.snr_linear);
  }
  return r;
}

std::string FilterChoice::label() const {
  if (method == DesignMethod::identity) return "naive";
  std::string s(to_string(method));
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s + "-" + std::to_string(order);
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(sep, start);
    const auto end = pos == std::string_view::npos ? text.size() : pos;
    if (end > start) out.push_back(text.substr(start, end - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t parse_order(std::string_view text, std::string_view whole) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ArgumentError("malformed filter order in '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

std::vector<FilterChoice> parse_filter_set(std::string_view text) {
  // Groups are "method:orders" where orders is a comma list of N or A-B;
  // a bare order after a group continues that group.
  std::vector<FilterChoice> out;
  std::optional<DesignMethod> current;
  for (std::string_view item : split(text, ',')) {
    const auto colon = item.find(':');
    std::string_view orders = item;
    if (colon != std::string_view::npos) {
      current = parse_design_method(item.substr(0, colon));
      orders = item.substr(colon + 1);
    } else if (!current || item == "naive") {
      current = parse_design_method(item);
      if (*current != DesignMethod::identity) {
        throw ArgumentError("filter '" + std::string(item) + "' needs an order, e.g. lagrange:3");
      }
      out.push_back({DesignMethod::identity, 0});
      current.reset();
      continue;
    }
    const auto dash = orders.find('-');
    std::size_t lo = 0;
    std::size_t hi = 0;
    if (dash == std::string_view::npos) {
      lo = hi = parse_order(orders, text);
    } else {
      lo = parse_order(orders.substr(0, dash), text);
      hi = parse_order(orders.substr(dash + 1), text);
    }
    if (lo > hi) throw ArgumentError("empty order range in '" + std::string(text) + "'");
    for (std::size_t k = lo; k <= hi; ++k) out.push_back({*current, k});
  }
  if (out.empty()) throw ArgumentError("filter set is empty");
  return out;
}

std::vector<Ratio> parse_ratio_list(std::string_view text) {
  std::vector<Ratio> out;
  for (std::string_view item : split(text, ',')) out.push_back(Ratio::parse(item));
  if (out.empty()) throw ArgumentError("ratio list is empty");
  return out;
}

ContingencyTable tabulate(std::span<const ExperimentRecord> records) {
  ContingencyTable t;
  for (const auto& r : records) {
    if (r.predicted_stable) {
      (r.success ? t.stable_success : t.stable_failure)++;
    } else {
      (r.success ? t.unstable_success : t.unstable_failure)++;
    }
  }
  return t;
}

std::vector<FilterSummary> summarize(std::span<const ExperimentRecord> records) {
  using Key = std::tuple<std::int64_t, std::int64_t, int, std::size_t>;
  std::map<Key, std::size_t> index;
  std::vector<FilterSummary> out;
  std::vector<double> sums;
  std::vector<std::size_t> finite_counts;
  for (const auto& r : records) {
    const Key key{r.ratio.num, r.ratio.den, static_cast<int>(r.method), r.order};
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      FilterSummary s;
      s.ratio = r.ratio;
      s.filter = {r.method, r.order};
      out.push_back(s);
      sums.push_back(0.0);
      finite_counts.push_back(0);
    }
    const std::size_t i = it->second;
    FilterSummary& s = out[i];
    ++s.count;
    if (r.success) ++s.successes;
    if (std::isnan(s.min_db) || r.snr_db < s.min_db) s.min_db = r.snr_db;
    if (std::isnan(s.max_db) || r.snr_db > s.max_db) s.max_db = r.snr_db;
    if (std::isfinite(r.snr_db)) {
      sums[i] += r.snr_db;
      ++finite_counts[i];
    } else {
      ++s.non_finite;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (finite_counts[i] > 0) out[i].mean_db = sums[i] / static_cast<double>(finite_counts[i]);
  }
  return out;
}

Signal synthetic_test_signal(std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Signal x(length);
  double state = 0.0;
  double peak = 0.0;
  for (double& v : x) {
    state = 0.9 * state + 0.1 * noise(rng);
    v = state;
    peak = std::max(peak, std::fabs(v));
  }
  if (peak > 0.0) {
    for (double& v : x) v *= 0.5 / peak;
  }
  return x;
}

}  // namespace srirnn
