#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "srirnn/error.hpp"
#include "srirnn/io/model_json.hpp"
#include "srirnn/io/report.hpp"
#include "srirnn/io/wav.hpp"

using namespace srirnn;
using nlohmann::json;

namespace {

std::uint32_t le32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

std::int16_t sample16(const std::vector<std::uint8_t>& b, std::size_t i) {
  return static_cast<std::int16_t>(b[44 + 2 * i] | (b[45 + 2 * i] << 8));
}

}  // namespace

TEST_CASE("float32 round trip is exact for float-representable samples") {
  std::mt19937_64 rng(1);
  io::AudioBuffer buf;
  buf.sample_rate = 48000.0;
  for (double v : oracle::gaussian(rng, 999, 0.3)) buf.samples.push_back(static_cast<float>(v));
  const auto bytes = io::encode_wav(buf, io::SampleFormat::float32);
  const auto back = io::decode_wav(bytes);
  CHECK(back.samples == buf.samples);
  CHECK(back.sample_rate == 48000.0);
  CHECK(back.format == io::SampleFormat::float32);
}

TEST_CASE("pcm16 full scale and clipping") {
  io::AudioBuffer buf;
  buf.samples = {1.0, -1.0, 0.0, 2.0, -2.0, 0.5};
  const auto bytes = io::encode_wav(buf, io::SampleFormat::pcm16);
  REQUIRE(bytes.size() == 44 + 12);
  CHECK(std::memcmp(bytes.data(), "RIFF", 4) == 0);
  CHECK(le32(bytes, 4) == bytes.size() - 8);
  CHECK(le32(bytes, 40) == 12);
  CHECK(sample16(bytes, 0) == 32767);
  CHECK(sample16(bytes, 1) == -32768);
  CHECK(sample16(bytes, 2) == 0);
  CHECK(sample16(bytes, 3) == 32767);
  CHECK(sample16(bytes, 4) == -32768);
  CHECK(sample16(bytes, 5) == 16384);
  const auto back = io::decode_wav(bytes);
  CHECK(back.samples[1] == -1.0);
  CHECK(back.samples[0] == 32767.0 / 32768.0);
}

TEST_CASE("pcm round trips within half a step") {
  std::mt19937_64 rng(2);
  io::AudioBuffer buf;
  buf.samples = oracle::gaussian(rng, 500, 0.2);
  for (auto [fmt, step] : {std::pair{io::SampleFormat::pcm16, 1.0 / 32768.0}, {io::SampleFormat::pcm24, 1.0 / 8388608.0}}) {
    const auto back = io::decode_wav(io::encode_wav(buf, fmt));
    REQUIRE(back.samples.size() == buf.samples.size());
    for (std::size_t i = 0; i < buf.samples.size(); ++i) {
      CHECK(std::abs(back.samples[i] - buf.samples[i]) <= 0.5 * step + 1e-15);
    }
    CHECK(back.format == fmt);
  }
}

TEST_CASE("multichannel input keeps channel zero") {
  // Hand-built stereo PCM16 file: frames (100, -100), (200, -200).
  std::vector<std::uint8_t> b = {'R', 'I', 'F', 'F', 44, 0, 0, 0, 'W', 'A', 'V', 'E',
                                 'f', 'm', 't', ' ', 16, 0, 0, 0, 1, 0, 2, 0,
                                 0x44, 0xAC, 0, 0, 0x10, 0xB1, 2, 0, 4, 0, 16, 0,
                                 'L', 'I', 'S', 'T', 2, 0, 0, 0, 'x', 'y',
                                 'd', 'a', 't', 'a', 8, 0, 0, 0,
                                 100, 0, 0x9C, 0xFF, 200, 0, 0x38, 0xFF};
  const auto buf = io::decode_wav(b);
  CHECK(buf.source_channels == 2);
  REQUIRE(buf.samples.size() == 2);
  CHECK(buf.samples[0] == 100.0 / 32768.0);
  CHECK(buf.samples[1] == 200.0 / 32768.0);
  CHECK(buf.sample_rate == 44100.0);
}

TEST_CASE("malformed WAV files report an offset") {
  io::AudioBuffer buf;
  buf.samples.assign(100, 0.25);
  auto bytes = io::encode_wav(buf, io::SampleFormat::pcm16);
  SUBCASE("truncated data chunk") {
    bytes.resize(100);
    try {
      io::decode_wav(bytes);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() != FormatError::npos);
      CHECK(std::string(e.what()).find("truncated") != std::string::npos);
    }
  }
  SUBCASE("not RIFF") {
    bytes[0] = 'X';
    try {
      io::decode_wav(bytes);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 0);
    }
  }
  SUBCASE("unsupported encoding") {
    bytes[20] = 2;  // ADPCM
    CHECK_THROWS_AS(io::decode_wav(bytes), FormatError);
  }
  SUBCASE("too short for a header") {
    bytes.resize(6);
    CHECK_THROWS_AS(io::decode_wav(bytes), FormatError);
  }
}

TEST_CASE("files on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "srirnn_test_io";
  std::filesystem::create_directories(dir);
  io::AudioBuffer buf;
  buf.samples = {0.0, 0.5, -0.5};
  buf.sample_rate = 44100.0;
  io::write_wav(dir / "a.wav", buf, io::SampleFormat::float32);
  CHECK(io::read_wav(dir / "a.wav").samples == buf.samples);
  CHECK_THROWS_AS(io::read_wav(dir / "missing.wav"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("model JSON with flat arrays and extra metadata") {
  const LstmModel m = io::load_model(SRIRNN_TEST_DATA "/lstm_h2_flat.json");
  CHECK(m.hidden_size() == 2);
  CHECK(m.input_dim() == 1);
  CHECK(m.train_rate() == 44100.0);
  CHECK(m.readout_variant() == ReadoutVariant::hidden_only);
  const auto& w = m.weights();
  CHECK(w.w_ih(2, 0) == 0.3);
  CHECK(w.w_hh(3, 1) == doctest::Approx(0.05));
  CHECK(w.bias[0] == doctest::Approx(0.05));
  CHECK(w.out_w[1] == -0.25);
  CHECK(w.out_b == 0.125);
}

TEST_CASE("model JSON rejections name the problem") {
  try {
    io::load_model(SRIRNN_TEST_DATA "/gru_rejected.json");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("unsupported unit_type 'GRU'") != std::string::npos);
  }
  try {
    io::load_model(SRIRNN_TEST_DATA "/lstm_truncated_array.json");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("rec.weight_hh_l0") != std::string::npos);
  }
  json doc = json::parse(std::ifstream(SRIRNN_TEST_DATA "/lstm_h2_flat.json"));
  doc["model_data"]["num_layers"] = 2;
  CHECK_THROWS_AS(io::parse_model(doc), FormatError);
  doc["model_data"].erase("num_layers");
  doc["state_dict"].erase("lin.bias");
  CHECK_THROWS_AS(io::parse_model(doc), FormatError);
  CHECK_THROWS_AS(io::parse_model(json::array()), FormatError);
  CHECK_THROWS_AS(io::load_model(SRIRNN_TEST_DATA "/missing.json"), Error);
}

TEST_CASE("skip flag selects the direct-input readout") {
  const LstmModel m = io::load_model(SRIRNN_TEST_DATA "/golden_lstm_h4.json");
  CHECK(m.readout_variant() == ReadoutVariant::direct_input);
}

TEST_CASE("model JSON round trip") {
  std::mt19937_64 rng(4);
  auto w = oracle::random_lstm(rng, 5, 2, 0.5, ReadoutVariant::direct_input);
  w.train_rate = 48000.0;
  const LstmModel m(w);
  const LstmModel back = io::parse_model(io::model_to_json(m));
  CHECK(back.weights().w_hh == w.w_hh);
  CHECK(back.weights().bias == w.bias);
  CHECK(back.train_rate() == 48000.0);
  CHECK(back.readout_variant() == ReadoutVariant::direct_input);
}

TEST_CASE("number formatting") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(INFINITY) == "inf");
  CHECK(io::format_double(-INFINITY) == "-inf");
  CHECK(io::format_double(NAN) == "nan");
  CHECK(io::csv_field("a,b") == "\"a,b\"");
  CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(io::csv_field("plain") == "plain");
  CHECK(io::json_number(-INFINITY) == "-inf");
}

TEST_CASE("records CSV layout") {
  ExperimentRecord r;
  r.model_id = "amp,1";
  r.ratio = Ratio{160, 147};
  r.method = DesignMethod::lagrange;
  r.order = 3;
  r.snr_db = 40.5;
  r.naive_snr_db = 30.25;
  r.success = true;
  r.rho = 0.5;
  r.predicted_stable = true;
  std::ostringstream out;
  const ExperimentRecord recs[] = {r};
  io::write_records_csv(out, recs);
  CHECK(out.str() ==
        "model,ratio,method,order,snr_db,naive_snr_db,success,rho,predicted_stable\r\n"
        "\"amp,1\",160/147,lagrange,3,40.5,30.25,true,0.5,true\r\n");
}
