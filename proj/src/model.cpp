#include "srirnn/model.hpp"

#include <cmath>
#include <string>

namespace srirnn {
namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace

LstmModel::LstmModel(LstmWeights weights) : w_(std::move(weights)) {
  const std::size_t hs = w_.hidden_size;
  require(hs > 0, "hidden_size must be positive");
  require(w_.input_size >= 1, "input_size must be at least 1");
  require(w_.w_ih.rows() == 4 * hs && w_.w_ih.cols() == w_.input_size,
          "w_ih must be (4*hidden_size) x input_size");
  require(w_.w_hh.rows() == 4 * hs && w_.w_hh.cols() == hs, "w_hh must be (4*hidden_size) x hidden_size");
  require(w_.bias.size() == 4 * hs, "bias must have length 4*hidden_size");
  require(w_.out_w.size() == hs, "out_w must have length hidden_size");
  if (!(w_.train_rate > 0.0)) throw ArgumentError("train_rate must be positive");
  if (!w_.w_ih.all_finite() || !w_.w_hh.all_finite() || !detail::all_finite(w_.bias) ||
      !detail::all_finite(w_.out_w) || !std::isfinite(w_.out_b)) {
    throw ArgumentError("model weights must be finite");
  }
}

void LstmModel::check_shapes(std::span<const double> s, std::span<const double> x) const {
  if (s.size() != state_dim()) {
    throw ShapeError("packed state has length " + std::to_string(s.size()) + ", expected " +
                     std::to_string(state_dim()));
  }
  if (x.size() != input_dim()) {
    throw ShapeError("input has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(input_dim()));
  }
}

void LstmModel::step(std::span<const double> s_prev, std::span<const double> x,
                     std::span<double> s_next, Scratch& scratch) const {
  check_shapes(s_prev, x);
  if (s_next.size() != state_dim()) throw ShapeError("output state has wrong length");
  const std::size_t hs = w_.hidden_size;
  const auto& k = simd::active();
  std::span<double> z = scratch.gates;
  std::span<const double> h = s_prev.first(hs);
  std::span<const double> c = s_prev.subspan(hs, hs);

  k.gemv_bias(w_.w_hh.values(), 4 * hs, hs, h, w_.bias, z);
  k.gemv_accumulate(w_.w_ih.values(), 4 * hs, w_.input_size, x, z);

  double* h_next = s_next.data();
  double* c_next = s_next.data() + hs;
  for (std::size_t j = 0; j < hs; ++j) {
    const double ig = sigmoid(z[j]);
    const double fg = sigmoid(z[hs + j]);
    const double gg = std::tanh(z[2 * hs + j]);
    const double og = sigmoid(z[3 * hs + j]);
    const double cn = fg * c[j] + ig * gg;
    c_next[j] = cn;
    h_next[j] = og * std::tanh(cn);
  }
}

double LstmModel::readout(std::span<const double> s, std::span<const double> x) const {
  const double y = simd::active().dot(w_.out_w, s.first(w_.hidden_size)) + w_.out_b;
  return w_.readout == ReadoutVariant::direct_input ? y + x[0] : y;
}

Matrix LstmModel::jacobian(std::span<const double> s, std::span<const double> x) const {
  check_shapes(s, x);
  const std::size_t hs = w_.hidden_size;
  const std::size_t n = 2 * hs;
  std::vector<double> z(4 * hs);
  const auto& k = simd::scalar_kernels();
  k.gemv_bias(w_.w_hh.values(), 4 * hs, hs, s.first(hs), w_.bias, z);
  k.gemv_accumulate(w_.w_ih.values(), 4 * hs, w_.input_size, x, z);

  Matrix jac(n, n);
  for (std::size_t j = 0; j < hs; ++j) {
    const double ig = sigmoid(z[j]);
    const double fg = sigmoid(z[hs + j]);
    const double gg = std::tanh(z[2 * hs + j]);
    const double og = sigmoid(z[3 * hs + j]);
    const double c = s[hs + j];
    const double tc = std::tanh(fg * c + ig * gg);

    // Derivatives of the gate outputs with respect to their pre-activations.
    const double di = ig * (1.0 - ig) * gg;
    const double df = fg * (1.0 - fg) * c;
    const double dg = ig * (1.0 - gg * gg);
    const double dout = og * (1.0 - og) * tc;
    const double dh_dc_next = og * (1.0 - tc * tc);

    auto wi = w_.w_hh.row(j);
    auto wf = w_.w_hh.row(hs + j);
    auto wg = w_.w_hh.row(2 * hs + j);
    auto wo = w_.w_hh.row(3 * hs + j);
    for (std::size_t m = 0; m < hs; ++m) {
      const double dc_dh = di * wi[m] + df * wf[m] + dg * wg[m];
      jac(hs + j, m) = dc_dh;
      jac(j, m) = dout * wo[m] + dh_dc_next * dc_dh;
    }
    jac(hs + j, hs + j) = fg;
    jac(j, hs + j) = dh_dc_next * fg;
  }
  return jac;
}

LinearModel::LinearModel(Matrix state_matrix, Matrix input_matrix, std::vector<double> offset,
                         std::vector<double> out_w, double out_b, double train_rate)
    : a_(std::move(state_matrix)),
      b_(std::move(input_matrix)),
      offset_(std::move(offset)),
      out_w_(std::move(out_w)),
      out_b_(out_b),
      train_rate_(train_rate) {
  const std::size_t n = a_.rows();
  require(n > 0 && a_.square(), "state matrix must be square and non-empty");
  require(b_.rows() == n && b_.cols() >= 1, "input matrix must be state_dim x input_dim");
  require(offset_.size() == n, "offset must have length state_dim");
  require(out_w_.size() == n, "out_w must have length state_dim");
  if (!(train_rate_ > 0.0)) throw ArgumentError("train_rate must be positive");
}

LinearModel LinearModel::one_pole(double pole, double gain, double offset, double train_rate) {
  return LinearModel(Matrix(1, 1, pole), Matrix(1, 1, gain), {offset}, {1.0}, 0.0, train_rate);
}

void LinearModel::step(std::span<const double> s_prev, std::span<const double> x,
                       std::span<double> s_next, Scratch&) const {
  if (s_prev.size() != state_dim() || s_next.size() != state_dim() || x.size() != input_dim()) {
    throw ShapeError("linear model: state or input has wrong length");
  }
  const auto& k = simd::active();
  k.gemv_bias(a_.values(), a_.rows(), a_.cols(), s_prev, offset_, s_next);
  k.gemv_accumulate(b_.values(), b_.rows(), b_.cols(), x, s_next);
}

double LinearModel::readout(std::span<const double> s, std::span<const double>) const {
  return simd::active().dot(out_w_, s) + out_b_;
}

Matrix LinearModel::jacobian(std::span<const double> s, std::span<const double>) const {
  if (s.size() != state_dim()) throw ShapeError("linear model: state has wrong length");
  return a_;
}

StateHistory::StateHistory(std::size_t state_dim, std::size_t capacity)
    : dim_(state_dim), capacity_(capacity), data_(state_dim * capacity, 0.0) {
  if (capacity == 0) throw ArgumentError("state history capacity must be positive");
}

void StateHistory::fill(std::span<const double> s) {
  for (std::size_t k = 0; k < capacity_; ++k) {
    std::copy(s.begin(), s.end(), data_.begin() + static_cast<std::ptrdiff_t>(k * dim_));
  }
  head_ = 0;
}

void StateHistory::push(std::span<const double> s) {
  head_ = (head_ + capacity_ - 1) % capacity_;
  std::copy(s.begin(), s.end(), data_.begin() + static_cast<std::ptrdiff_t>(head_ * dim_));
}

std::span<const double> StateHistory::lag(std::size_t k) const {
  return {data_.data() + ((head_ + k) % capacity_) * dim_, dim_};
}

void StateHistory::gather(std::span<const double*> out) const {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = data_.data() + ((head_ + k) % capacity_) * dim_;
}

}  // namespace srirnn
