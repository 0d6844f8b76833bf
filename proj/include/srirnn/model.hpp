#pragma once

// Recurrent audio-effect models and the two inference paths: native rate
// (plain recursion) and adjusted rate, where the state fed back to the cell is
// an FIR-weighted combination of the last K+1 states.
//
// The packed state is always laid out as [h; c] (hidden first, then cell).

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "srirnn/error.hpp"
#include "srirnn/matrix.hpp"
#include "srirnn/simd/kernels.hpp"

namespace srirnn {

using Signal = std::vector<double>;

// How the affine readout g(h, x) uses the input.
enum class ReadoutVariant {
  hidden_only,   // y = out_w . h + out_b
  direct_input,  // y = out_w . h + out_b + x[0]  (residual/skip connection)
};

struct LstmWeights {
  std::size_t hidden_size = 0;
  std::size_t input_size = 1;
  Matrix w_ih;               // (4 * hidden) x input, gate blocks ordered (i, f, g, o)
  Matrix w_hh;               // (4 * hidden) x hidden
  std::vector<double> bias;  // 4 * hidden, already the sum of both bias vectors
  std::vector<double> out_w; // hidden
  double out_b = 0.0;
  double train_rate = 44100.0;
  ReadoutVariant readout = ReadoutVariant::hidden_only;
};

class LstmModel {
 public:
  struct Scratch {
    std::vector<double> gates;
  };

  // Validates shapes and finiteness; throws ShapeError / ArgumentError.
  explicit LstmModel(LstmWeights weights);

  std::size_t hidden_size() const noexcept { return w_.hidden_size; }
  std::size_t state_dim() const noexcept { return 2 * w_.hidden_size; }
  std::size_t input_dim() const noexcept { return w_.input_size; }
  double train_rate() const noexcept { return w_.train_rate; }
  ReadoutVariant readout_variant() const noexcept { return w_.readout; }
  const LstmWeights& weights() const noexcept { return w_; }

  Scratch make_scratch() const { return Scratch{std::vector<double>(4 * w_.hidden_size)}; }

  // s_next = f(s_prev, x). s_next must not alias s_prev.
  void step(std::span<const double> s_prev, std::span<const double> x, std::span<double> s_next,
            Scratch& scratch) const;

  double readout(std::span<const double> s, std::span<const double> x) const;

  // d s_next / d s_prev at (s, x).
  Matrix jacobian(std::span<const double> s, std::span<const double> x) const;

 private:
  void check_shapes(std::span<const double> s, std::span<const double> x) const;

  LstmWeights w_;
};

// Affine recurrence s' = A s + B x + offset with affine readout. Its
// linearisation is exact, which makes it the reference system for checking
// the analysis against simulation.
class LinearModel {
 public:
  struct Scratch {};

  LinearModel(Matrix state_matrix, Matrix input_matrix, std::vector<double> offset,
              std::vector<double> out_w, double out_b, double train_rate = 44100.0);

  // s' = pole * s + gain * x + offset, y = s.
  static LinearModel one_pole(double pole, double gain, double offset = 0.0,
                              double train_rate = 44100.0);

  std::size_t state_dim() const noexcept { return a_.rows(); }
  std::size_t input_dim() const noexcept { return b_.cols(); }
  double train_rate() const noexcept { return train_rate_; }
  const Matrix& state_matrix() const noexcept { return a_; }
  std::span<const double> offset() const noexcept { return offset_; }

  Scratch make_scratch() const { return {}; }
  void step(std::span<const double> s_prev, std::span<const double> x, std::span<double> s_next,
            Scratch& scratch) const;
  double readout(std::span<const double> s, std::span<const double> x) const;
  Matrix jacobian(std::span<const double> s, std::span<const double> x) const;

 private:
  Matrix a_;
  Matrix b_;
  std::vector<double> offset_;
  std::vector<double> out_w_;
  double out_b_;
  double train_rate_;
};

template <class M>
concept RecurrentModel = requires(const M& m, std::span<const double> s, std::span<const double> x,
                                  std::span<double> out, typename M::Scratch& scratch) {
  { m.state_dim() } -> std::convertible_to<std::size_t>;
  { m.input_dim() } -> std::convertible_to<std::size_t>;
  { m.train_rate() } -> std::convertible_to<double>;
  { m.make_scratch() } -> std::same_as<typename M::Scratch>;
  m.step(s, x, out, scratch);
  { m.readout(s, x) } -> std::convertible_to<double>;
  { m.jacobian(s, x) } -> std::same_as<Matrix>;
};

// Ring buffer of the last `capacity` packed states; lag(0) is the newest.
class StateHistory {
 public:
  StateHistory(std::size_t state_dim, std::size_t capacity);

  std::size_t state_dim() const noexcept { return dim_; }
  std::size_t capacity() const noexcept { return capacity_; }

  void fill(std::span<const double> s);
  void push(std::span<const double> s);
  std::span<const double> lag(std::size_t k) const;

  // Pointers to lags 0..out.size()-1.
  void gather(std::span<const double*> out) const;

 private:
  std::size_t dim_;
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<double> data_;
};

namespace detail {

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

inline std::vector<double> make_input(std::size_t input_dim, std::span<const double> conditioning) {
  if (!conditioning.empty() && conditioning.size() + 1 != input_dim) {
    throw ShapeError("model expects " + std::to_string(input_dim) + " input channels, got 1 + " +
                     std::to_string(conditioning.size()) + " conditioning values");
  }
  std::vector<double> in(input_dim, 0.0);
  std::copy(conditioning.begin(), conditioning.end(), in.begin() + 1);
  return in;
}

}  // namespace detail

// Streaming inference with an FIR filter in the state feedback loop. The
// model is referenced, not copied, and must outlive the loop.
template <RecurrentModel M>
class FeedbackLoop {
 public:
  FeedbackLoop(const M& model, std::span<const double> taps,
               std::span<const double> conditioning = {})
      : model_(&model),
        taps_(taps.begin(), taps.end()),
        history_(model.state_dim(), std::max<std::size_t>(taps.size(), 1)),
        rows_(taps.size()),
        filtered_(model.state_dim()),
        next_(model.state_dim()),
        input_(detail::make_input(model.input_dim(), conditioning)),
        scratch_(model.make_scratch()) {
    if (taps_.empty()) throw ArgumentError("feedback filter must have at least one tap");
    if (!detail::all_finite(taps_)) throw ArgumentError("feedback filter taps must be finite");
  }

  void reset() {
    std::fill(next_.begin(), next_.end(), 0.0);
    history_.fill(next_);
    index_ = 0;
  }

  // Start from a given packed state (all history slots set to it).
  void reset(std::span<const double> state) {
    if (state.size() != model_->state_dim()) throw ShapeError("initial state has wrong length");
    history_.fill(state);
    index_ = 0;
  }

  // Replace taps in place; the length must not change.
  void set_taps(std::span<const double> taps) {
    if (taps.size() != taps_.size()) throw ShapeError("set_taps: tap count must not change");
    std::copy(taps.begin(), taps.end(), taps_.begin());
  }

  std::span<const double> taps() const noexcept { return taps_; }
  std::span<const double> state() const { return history_.lag(0); }
  std::size_t samples_processed() const noexcept { return index_; }

  double tick(double x) {
    const auto& k = simd::active();
    history_.gather(rows_);
    k.weighted_sum(taps_, rows_, filtered_);
    input_[0] = x;
    model_->step(filtered_, input_, next_, scratch_);
    if (!detail::all_finite(next_)) {
      throw NumericError("non-finite state at sample " + std::to_string(index_), index_);
    }
    history_.push(next_);
    ++index_;
    return model_->readout(next_, input_);
  }

 private:
  const M* model_;
  std::vector<double> taps_;
  StateHistory history_;
  std::vector<const double*> rows_;
  std::vector<double> filtered_;
  std::vector<double> next_;
  std::vector<double> input_;
  typename M::Scratch scratch_;
  std::size_t index_ = 0;
};

// y_n = g(h_n, x_n), h_n = f(h_{n-1}, x_n), from zero state.
template <RecurrentModel M>
Signal process_native(const M& model, std::span<const double> x,
                      std::span<const double> conditioning = {}) {
  if (!detail::all_finite(x)) throw ArgumentError("input signal contains non-finite samples");
  std::vector<double> input = detail::make_input(model.input_dim(), conditioning);
  std::vector<double> prev(model.state_dim(), 0.0);
  std::vector<double> next(model.state_dim(), 0.0);
  auto scratch = model.make_scratch();
  Signal y(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    input[0] = x[n];
    model.step(prev, input, next, scratch);
    if (!detail::all_finite(next)) {
      throw NumericError("non-finite state at sample " + std::to_string(n), n);
    }
    y[n] = model.readout(next, input);
    std::swap(prev, next);
  }
  return y;
}

// Inference with the fed-back state replaced by sum_k taps[k] * s_{n-1-k}.
// Throws NumericError (with the sample index) if the state blows up.
template <RecurrentModel M>
Signal process_adjusted(const M& model, std::span<const double> x, std::span<const double> taps,
                        std::span<const double> conditioning = {}) {
  if (!detail::all_finite(x)) throw ArgumentError("input signal contains non-finite samples");
  FeedbackLoop<M> loop(model, taps, conditioning);
  loop.reset();
  Signal y(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) y[n] = loop.tick(x[n]);
  return y;
}

}  // namespace srirnn
