#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "srirnn/error.hpp"
#include "srirnn/io/model_json.hpp"
#include "srirnn/model.hpp"
#include "srirnn/simd/kernels.hpp"

using namespace srirnn;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct BackendGuard {
  simd::Backend saved = simd::active_backend();
  ~BackendGuard() { simd::set_active_backend(saved); }
};

std::vector<simd::Backend> backends() {
  std::vector<simd::Backend> out{simd::Backend::scalar};
  if (simd::available(simd::Backend::avx2)) out.push_back(simd::Backend::avx2);
  return out;
}

LstmWeights zero_weights(std::size_t hidden) {
  LstmWeights w;
  w.hidden_size = hidden;
  w.w_ih = Matrix(4 * hidden, 1);
  w.w_hh = Matrix(4 * hidden, hidden);
  w.bias.assign(4 * hidden, 0.0);
  w.out_w.assign(hidden, 0.0);
  return w;
}

}  // namespace

TEST_CASE("zero-weight cell halves the cell state") {
  const LstmModel model(zero_weights(3));
  std::vector<double> s = {0.1, -0.2, 0.3, 1.0, -2.0, 0.5};
  std::vector<double> next(6);
  auto scratch = model.make_scratch();
  const double x[] = {0.7};
  model.step(s, x, next, scratch);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(next[3 + j] == doctest::Approx(0.5 * s[3 + j]).epsilon(1e-15));
    CHECK(next[j] == doctest::Approx(0.5 * std::tanh(0.5 * s[3 + j])).epsilon(1e-15));
  }
  CHECK(model.readout(next, x) == 0.0);
}

TEST_CASE("zero-weight Jacobian blocks at the origin") {
  const LstmModel model(zero_weights(4));
  const std::vector<double> s(8, 0.0);
  const double x[] = {0.0};
  const Matrix J = model.jacobian(s, x);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double eye = i == j ? 1.0 : 0.0;
      CHECK(J(i, j) == 0.0);
      CHECK(J(i, 4 + j) == doctest::Approx(0.25 * eye));
      CHECK(J(4 + i, j) == 0.0);
      CHECK(J(4 + i, 4 + j) == doctest::Approx(0.5 * eye));
    }
  }
}

TEST_CASE("step and readout match the textbook cell on every backend") {
  BackendGuard guard;
  std::mt19937_64 rng(3);
  for (auto b : backends()) {
    simd::set_active_backend(b);
    for (std::size_t hidden : {1u, 2u, 5u, 8u, 20u, 33u}) {
      for (std::size_t inputs : {1u, 3u}) {
        const auto variant = hidden % 2 ? ReadoutVariant::direct_input : ReadoutVariant::hidden_only;
        const LstmWeights w = oracle::random_lstm(rng, hidden, inputs, 0.5, variant);
        const LstmModel model(w);
        std::vector<double> s(2 * hidden, 0.0), mine(2 * hidden);
        auto scratch = model.make_scratch();
        for (int n = 0; n < 50; ++n) {
          const auto x = oracle::gaussian(rng, inputs, 1.0);
          const auto ref = oracle::lstm_step(w, s, x);
          model.step(s, x, mine, scratch);
          CHECK(max_abs_diff(mine, ref) <= 1e-12);
          CHECK(model.readout(ref, x) == doctest::Approx(oracle::lstm_readout(w, ref, x)).epsilon(1e-12));
          s = ref;
        }
      }
    }
  }
}

TEST_CASE("closed forget gate discards the previous cell state") {
  std::mt19937_64 rng(9);
  LstmWeights w = oracle::random_lstm(rng, 3);
  for (std::size_t j = 0; j < 3; ++j) w.bias[3 + j] = -800.0;
  const LstmModel model(w);
  std::vector<double> a = {0.1, 0.2, 0.3, 5.0, -5.0, 9.0};
  std::vector<double> b = {0.1, 0.2, 0.3, -1.0, 2.0, 0.0};
  std::vector<double> na(6), nb(6);
  auto scratch = model.make_scratch();
  const double x[] = {0.25};
  model.step(a, x, na, scratch);
  model.step(b, x, nb, scratch);
  CHECK(na == nb);
}

TEST_CASE("golden output from a reference LSTM implementation") {
  const LstmModel model = io::load_model(SRIRNN_TEST_DATA "/golden_lstm_h4.json");
  std::ifstream f(SRIRNN_TEST_DATA "/golden_lstm_h4_io.json");
  const auto doc = nlohmann::json::parse(f);
  const auto x = doc.at("input").get<std::vector<double>>();
  const auto expected = doc.at("output").get<std::vector<double>>();
  const Signal y = process_native(model, x);
  REQUIRE(y.size() == expected.size());
  CHECK(max_abs_diff(y, expected) <= 1e-12);
}

TEST_CASE("unit tap reproduces native processing bit for bit") {
  BackendGuard guard;
  std::mt19937_64 rng(21);
  for (auto b : backends()) {
    simd::set_active_backend(b);
    for (std::size_t hidden : {1u, 4u, 16u}) {
      const LstmModel model(oracle::random_lstm(rng, hidden, 1, 0.4, ReadoutVariant::direct_input));
      const auto x = oracle::gaussian(rng, 2000, 0.3);
      const double unit[] = {1.0};
      CHECK(process_adjusted(model, x, unit) == process_native(model, x));
    }
  }
}

TEST_CASE("one-pole linear model follows its difference equation") {
  const LinearModel model = LinearModel::one_pole(0.9, 0.5, 0.01);
  std::mt19937_64 rng(2);
  const auto x = oracle::gaussian(rng, 300, 1.0);
  const Signal y = process_native(model, x);
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    s = 0.9 * s + 0.5 * x[n] + 0.01;
    CHECK(y[n] == doctest::Approx(s).epsilon(1e-14));
  }
}

TEST_CASE("adjusted recursion filters the fed-back state") {
  const LinearModel model = LinearModel::one_pole(0.8, 1.0);
  const std::vector<double> taps = {1.2, -0.3, 0.1};
  std::mt19937_64 rng(4);
  const auto x = oracle::gaussian(rng, 200, 1.0);
  const Signal y = process_adjusted(model, x, taps);
  std::vector<double> hist(x.size() + 3, 0.0);  // hist[n + 3] = s_n
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double fed = taps[0] * hist[n + 2] + taps[1] * hist[n + 1] + taps[2] * hist[n];
    hist[n + 3] = 0.8 * fed + x[n];
    CHECK(y[n] == doctest::Approx(hist[n + 3]).epsilon(1e-13));
  }
}

TEST_CASE("adjusted LSTM recursion matches a hand-rolled loop") {
  std::mt19937_64 rng(8);
  const LstmWeights w = oracle::random_lstm(rng, 6, 1, 0.5);
  const LstmModel model(w);
  const std::vector<double> taps = {1.15, -0.26, 0.135, -0.03};
  const auto x = oracle::gaussian(rng, 300, 0.5);
  const Signal y = process_adjusted(model, x, taps);
  std::vector<std::vector<double>> hist(4, std::vector<double>(12, 0.0));  // newest first
  for (std::size_t n = 0; n < x.size(); ++n) {
    std::vector<double> fed(12, 0.0);
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t i = 0; i < 12; ++i) fed[i] += taps[k] * hist[k][i];
    }
    const std::vector<double> in = {x[n]};
    const auto s = oracle::lstm_step(w, fed, in);
    hist.insert(hist.begin(), s);
    hist.pop_back();
    CHECK(y[n] == doctest::Approx(oracle::lstm_readout(w, s, in)).epsilon(1e-12));
  }
}

TEST_CASE("conditioning inputs are appended after the sample") {
  std::mt19937_64 rng(13);
  const LstmWeights w = oracle::random_lstm(rng, 3, 3, 0.5);
  const LstmModel model(w);
  const std::vector<double> cond = {0.25, -0.5};
  const std::vector<double> x = {0.1, -0.2, 0.3};
  const Signal y = process_native(model, x, cond);
  std::vector<double> s(6, 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const std::vector<double> in = {x[n], cond[0], cond[1]};
    s = oracle::lstm_step(w, s, in);
    CHECK(y[n] == doctest::Approx(oracle::lstm_readout(w, s, in)).epsilon(1e-12));
  }
  const double one[] = {0.5};
  CHECK_THROWS_AS(process_native(model, x, one), ShapeError);
}

TEST_CASE("blow-up is reported with the sample index") {
  const LinearModel model = LinearModel::one_pole(2.0, 1.0);
  std::vector<double> x(5000, 0.0);
  x[0] = 1.0;
  try {
    process_native(model, x);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.index() == 1024);
  }
  const double taps[] = {1.0, 0.5};
  CHECK_THROWS_AS(process_adjusted(model, x, taps), NumericError);
}

TEST_CASE("invalid arguments") {
  const LinearModel model = LinearModel::one_pole(0.5, 1.0);
  const std::vector<double> bad = {0.0, NAN};
  CHECK_THROWS_AS(process_native(model, bad), ArgumentError);
  const std::vector<double> x = {1.0};
  CHECK_THROWS_AS(process_adjusted(model, x, std::span<const double>{}), ArgumentError);
  const double inf_tap[] = {INFINITY};
  CHECK_THROWS_AS(process_adjusted(model, x, inf_tap), ArgumentError);

  LstmWeights w = zero_weights(2);
  w.out_w.pop_back();
  CHECK_THROWS_AS(LstmModel{w}, ShapeError);
  w = zero_weights(2);
  w.bias[0] = NAN;
  CHECK_THROWS(LstmModel{w});
}

TEST_CASE("state history keeps the newest state at lag zero") {
  StateHistory h(2, 3);
  const std::vector<double> a = {1, 2}, b = {3, 4}, c = {5, 6}, d = {7, 8};
  h.fill(a);
  h.push(b);
  h.push(c);
  CHECK(h.lag(0)[0] == 5);
  CHECK(h.lag(1)[0] == 3);
  CHECK(h.lag(2)[0] == 1);
  h.push(d);
  CHECK(h.lag(0)[1] == 8);
  CHECK(h.lag(2)[1] == 4);
  std::vector<const double*> ptrs(3);
  h.gather(ptrs);
  CHECK(ptrs[1][0] == 5);
}

TEST_CASE("feedback loop taps can be swapped mid-stream") {
  const LinearModel model = LinearModel::one_pole(0.5, 1.0);
  const double unit[] = {1.0, 0.0};
  FeedbackLoop<LinearModel> loop(model, unit);
  loop.reset();
  CHECK(loop.tick(1.0) == 1.0);
  CHECK(loop.tick(0.0) == 0.5);
  const double avg[] = {0.5, 0.5};
  loop.set_taps(avg);
  CHECK(loop.tick(0.0) == doctest::Approx(0.5 * (0.5 * 0.5 + 0.5 * 1.0)));
  CHECK(loop.samples_processed() == 3);
  const double three[] = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(loop.set_taps(three), ShapeError);
}
