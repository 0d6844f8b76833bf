#pragma once

// SNR metric, single-case runner and the batch harness that cross-tabulates
// empirical success against the stability prediction.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "srirnn/analysis.hpp"
#include "srirnn/filters.hpp"
#include "srirnn/model.hpp"
#include "srirnn/resample.hpp"

namespace srirnn {

struct SnrResult {
  double snr_linear = 0.0;
  double snr_db = 0.0;  // +inf when the error energy is exactly zero
  std::size_t samples = 0;
  std::size_t truncation = 0;
};

// sum(ref^2) / sum((test - ref)^2) after dropping the first `truncate`
// samples of both sequences.
SnrResult snr(std::span<const double> y_test, std::span<const double> y_ref,
              std::size_t truncate = 44100);

struct FilterChoice {
  DesignMethod method = DesignMethod::lagrange;
  std::size_t order = 1;

  std::string label() const;
  friend bool operator==(const FilterChoice&, const FilterChoice&) = default;
};

// "lagrange:1-5,minimax:1,3" style lists.
std::vector<FilterChoice> parse_filter_set(std::string_view text);
std::vector<Ratio> parse_ratio_list(std::string_view text);

struct ExperimentRecord {
  std::string model_id;
  Ratio ratio;
  DesignMethod method = DesignMethod::identity;
  std::size_t order = 0;
  double snr_db = 0.0;
  double naive_snr_db = 0.0;
  bool success = false;  // snr_db > naive_snr_db
  bool predicted_stable = false;
  double rho = NAN;
  Verdict verdict = Verdict::indeterminate;
  // First sample with a non-finite state, if the run blew up.
  std::size_t blowup_sample = static_cast<std::size_t>(-1);
};

struct RunOptions {
  std::size_t truncate = 44100;
  MinimaxOptions minimax;
  StabilityOptions stability;
  std::vector<double> conditioning;
};

// Reference material for one (model, ratio) pair: the rate-converted input,
// the resampled native output, and the no-interpolation baseline SNR.
struct RateCase {
  DelaySpec spec;
  Signal input;   // x' at the inference rate
  Signal target;  // y-hat: native output resampled to the inference rate
  double naive_snr_db = 0.0;
  std::size_t naive_blowup = static_cast<std::size_t>(-1);
};

struct ContingencyTable {
  std::size_t stable_success = 0;
  std::size_t stable_failure = 0;
  std::size_t unstable_success = 0;
  std::size_t unstable_failure = 0;

  std::size_t total() const noexcept {
    return stable_success + stable_failure + unstable_success + unstable_failure;
  }
  // (stable & success + unstable & failure) / total; NaN when empty.
  double agreement() const noexcept {
    const auto t = total();
    return t == 0 ? NAN : static_cast<double>(stable_success + unstable_failure) / static_cast<double>(t);
  }
};

ContingencyTable tabulate(std::span<const ExperimentRecord> records);

// Per (ratio, method, order) distribution of SNR values.
struct FilterSummary {
  Ratio ratio;
  FilterChoice filter;
  std::size_t count = 0;
  std::size_t successes = 0;
  double min_db = NAN;
  double mean_db = NAN;  // over finite values only
  double max_db = NAN;
  std::size_t non_finite = 0;
};

std::vector<FilterSummary> summarize(std::span<const ExperimentRecord> records);

// Seeded stand-in for a DI recording: Gaussian noise through a one-pole
// low-pass (pole 0.9), peak-normalised to 0.5.
Signal synthetic_test_signal(std::size_t length, std::uint64_t seed);

template <class M>
struct NamedModel {
  std::string id;
  M model;
};

struct BatchOptions : RunOptions {
  std::size_t threads = 1;
};

struct BatchResult {
  std::vector<ExperimentRecord> records;  // model-major, then ratio, then filter
  ContingencyTable table;
  std::vector<FilterSummary> summaries;
};

namespace detail {

template <RecurrentModel M>
double adjusted_snr_db(const M& model, const RateCase& rc, std::span<const double> taps,
                       const RunOptions& opts, std::size_t& blowup) {
  try {
    const Signal y = process_adjusted(model, rc.input, taps, opts.conditioning);
    return snr(y, rc.target, opts.truncate).snr_db;
  } catch (const NumericError& e) {
    blowup = e.index();
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace detail

template <RecurrentModel M>
RateCase prepare_rate_case(const M& model, std::span<const double> x, Ratio ratio,
                           const RunOptions& opts = {}) {
  RateCase rc;
  rc.spec = delta_for_ratio(ratio, model.train_rate());
  const auto trimmed = x.first(resample_input_length(x.size(), rc.spec.ratio));
  const Signal y = process_native(model, trimmed, opts.conditioning);
  rc.target = dft_resample(y, rc.spec.ratio);
  rc.input = dft_resample(trimmed, rc.spec.ratio);
  const double unit[] = {1.0};
  rc.naive_snr_db = detail::adjusted_snr_db(model, rc, unit, opts, rc.naive_blowup);
  return rc;
}

template <RecurrentModel M>
ExperimentRecord evaluate_filter(const M& model, std::string_view model_id, const RateCase& rc,
                                 const FirCoefficients& filter, const RestLinearisation& lin,
                                 const RunOptions& opts = {}) {
  ExperimentRecord rec;
  rec.model_id = std::string(model_id);
  rec.ratio = rc.spec.ratio;
  rec.method = filter.method;
  rec.order = filter.order();
  rec.naive_snr_db = rc.naive_snr_db;
  rec.snr_db = detail::adjusted_snr_db(model, rc, filter.taps, opts, rec.blowup_sample);
  rec.success = rec.snr_db > rec.naive_snr_db;
  const StabilityReport rep =
      assess_stability(lin, filter.taps, rc.spec.inference_rate, opts.stability);
  rec.rho = rep.spectral_radius;
  rec.verdict = rep.verdict;
  rec.predicted_stable = rep.verdict != Verdict::indeterminate && rep.stable;
  return rec;
}

// y = native(x); y-hat = resample(y); x' = resample(x); y' = adjusted(x');
// SNR(y', y-hat) against the same pipeline with the unit filter, plus the
// stability prediction for `filter`.
template <RecurrentModel M>
ExperimentRecord run_case(const M& model, std::string_view model_id, std::span<const double> x,
                          Ratio ratio, const FirCoefficients& filter, const RunOptions& opts = {}) {
  const RateCase rc = prepare_rate_case(model, x, ratio, opts);
  const RestLinearisation lin = linearise_at_rest(model, opts.stability.fixed_point);
  return evaluate_filter(model, model_id, rc, filter, lin, opts);
}

template <RecurrentModel M>
BatchResult batch_experiment(std::span<const NamedModel<M>> models, std::span<const double> x,
                             std::span<const Ratio> ratios, std::span<const FilterChoice> requested,
                             const BatchOptions& opts = {}) {
  // The naive filter is the baseline of every record, not a case of its own.
  std::vector<FilterChoice> filters;
  for (const FilterChoice& fc : requested) {
    if (fc.method != DesignMethod::identity) filters.push_back(fc);
  }
  // Filter designs depend only on (ratio, choice); share them across models.
  std::vector<FirCoefficients> designs;
  designs.reserve(ratios.size() * filters.size());
  for (const Ratio& r : ratios) {
    for (const FilterChoice& fc : filters) {
      const double delta = delta_for_ratio(r).delta;
      designs.push_back(design_filter(fc.method, delta, fc.order, opts.minimax));
    }
  }

  const std::size_t per_model = ratios.size() * filters.size();
  BatchResult out;
  out.records.resize(models.size() * per_model);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t m = next.fetch_add(1);
      if (m >= models.size()) return;
      try {
        const auto& nm = models[m];
        const RestLinearisation lin = linearise_at_rest(nm.model, opts.stability.fixed_point);
        for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
          const RateCase rc = prepare_rate_case(nm.model, x, ratios[ri], opts);
          for (std::size_t fi = 0; fi < filters.size(); ++fi) {
            out.records[m * per_model + ri * filters.size() + fi] =
                evaluate_filter(nm.model, nm.id, rc, designs[ri * filters.size() + fi], lin, opts);
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(models.size());
        return;
      }
    }
  };

  const std::size_t n_threads = std::max<std::size_t>(1, std::min(opts.threads, models.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  out.table = tabulate(out.records);
  out.summaries = summarize(out.records);
  return out;
}

}  // namespace srirnn
