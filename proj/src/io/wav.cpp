#include "srirnn/io/wav.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include "srirnn/error.hpp"

namespace srirnn::io {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void seek(std::size_t p) { pos_ = p; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw FormatError(std::string("truncated WAV: expected ") + what + " at offset " +
                            std::to_string(pos_),
                        pos_);
    }
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    const auto* p = bytes_.data() + pos_;
    pos_ += 4;
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
  }

  std::uint16_t u16(const char* what) {
    need(2, what);
    const auto* p = bytes_.data() + pos_;
    pos_ += 2;
    return static_cast<std::uint16_t>(p[0] | p[1] << 8);
  }

  std::string tag(const char* what) {
    need(4, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return s;
  }

  const std::uint8_t* at(std::size_t p) const { return bytes_.data() + p; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

std::int32_t quantise(double v, double full_scale) {
  const double scaled = std::nearbyint(v * full_scale);
  const double hi = full_scale - 1.0;
  const double lo = -full_scale;
  return static_cast<std::int32_t>(scaled > hi ? hi : (scaled < lo ? lo : scaled));
}

}  // namespace

std::string_view to_string(SampleFormat f) noexcept {
  switch (f) {
    case SampleFormat::pcm16:
      return "pcm16";
    case SampleFormat::pcm24:
      return "pcm24";
    case SampleFormat::float32:
      return "float32";
  }
  return "unknown";
}

SampleFormat parse_sample_format(std::string_view text) {
  if (text == "pcm16") return SampleFormat::pcm16;
  if (text == "pcm24") return SampleFormat::pcm24;
  if (text == "float32") return SampleFormat::float32;
  throw ArgumentError("unknown sample format '" + std::string(text) +
                      "' (expected pcm16, pcm24 or float32)");
}

AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (r.tag("RIFF header") != "RIFF") throw FormatError("not a RIFF file (offset 0)", 0);
  r.u32("RIFF size");
  if (r.tag("WAVE tag") != "WAVE") throw FormatError("RIFF file is not WAVE (offset 8)", 8);

  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_pos = 0, data_len = 0;
  bool have_data = false;

  while (r.remaining() >= 8 && !have_data) {
    const std::size_t chunk_pos = r.pos();
    const std::string id = r.tag("chunk id");
    const std::uint32_t size = r.u32("chunk size");
    const std::size_t body = r.pos();
    if (id == "fmt ") {
      if (size < 16) throw FormatError("fmt chunk too small at offset " + std::to_string(chunk_pos), chunk_pos);
      format = r.u16("format tag");
      channels = r.u16("channel count");
      rate = r.u32("sample rate");
      r.u32("byte rate");
      block_align = r.u16("block align");
      bits = r.u16("bits per sample");
      if (format == kFormatExtensible) {
        if (size < 40) {
          throw FormatError("extensible fmt chunk too small at offset " + std::to_string(chunk_pos), chunk_pos);
        }
        r.u16("extension size");
        r.u16("valid bits");
        r.u32("channel mask");
        format = r.u16("sub-format");
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk at offset " + std::to_string(chunk_pos), chunk_pos);
      data_pos = body;
      data_len = size;
      if (data_len > r.remaining()) {
        throw FormatError("truncated WAV: data chunk declares " + std::to_string(size) +
                              " bytes but only " + std::to_string(r.remaining()) +
                              " remain after offset " + std::to_string(body),
                          body + r.remaining());
      }
      have_data = true;
      break;
    }
    const std::size_t next = body + size + (size & 1u);
    if (next > bytes.size()) {
      throw FormatError("truncated WAV: chunk '" + id + "' at offset " + std::to_string(chunk_pos) +
                            " runs past end of file",
                        chunk_pos);
    }
    r.seek(next);
  }
  if (!have_fmt) throw FormatError("missing fmt chunk", r.pos());
  if (!have_data) throw FormatError("missing data chunk", r.pos());
  if (channels == 0 || rate == 0) throw FormatError("fmt chunk has zero channels or sample rate", 12);

  AudioBuffer out;
  out.sample_rate = rate;
  out.source_channels = channels;
  if (format == kFormatPcm && bits == 16) {
    out.format = SampleFormat::pcm16;
  } else if (format == kFormatPcm && bits == 24) {
    out.format = SampleFormat::pcm24;
  } else if (format == kFormatFloat && bits == 32) {
    out.format = SampleFormat::float32;
  } else {
    throw FormatError("unsupported codec: format tag " + std::to_string(format) + " with " +
                          std::to_string(bits) + " bits",
                      12);
  }
  const std::size_t bytes_per_sample = bits / 8u;
  const std::size_t frame = block_align != 0 ? block_align : bytes_per_sample * channels;
  if (frame < bytes_per_sample * channels) throw FormatError("block align smaller than a frame", 12);
  const std::size_t frames = data_len / frame;
  if (frames == 0) throw FormatError("WAV file has no sample data", data_pos);
  if (channels > 1) {
    std::cerr << "warning: " << channels << "-channel WAV, using channel 0 only\n";
  }

  out.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::uint8_t* p = r.at(data_pos + i * frame);
    switch (out.format) {
      case SampleFormat::pcm16: {
        const auto v = static_cast<std::int16_t>(p[0] | p[1] << 8);
        out.samples[i] = v / 32768.0;
        break;
      }
      case SampleFormat::pcm24: {
        std::int32_t v = p[0] | p[1] << 8 | p[2] << 16;
        if (v & 0x800000) v -= 0x1000000;
        out.samples[i] = v / 8388608.0;
        break;
      }
      case SampleFormat::float32: {
        std::uint32_t u = static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
                          static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
        out.samples[i] = std::bit_cast<float>(u);
        break;
      }
    }
  }
  return out;
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, SampleFormat format) {
  if (!(buffer.sample_rate > 0.0)) throw ArgumentError("write_wav: sample rate must be positive");
  for (double v : buffer.samples) {
    if (!std::isfinite(v)) throw ArgumentError("write_wav: samples must be finite");
  }
  const std::uint16_t bits = format == SampleFormat::pcm16 ? 16 : (format == SampleFormat::pcm24 ? 24 : 32);
  const std::uint16_t tag = format == SampleFormat::float32 ? kFormatFloat : kFormatPcm;
  const std::uint32_t bytes_per_sample = bits / 8u;
  const auto data_len = static_cast<std::uint32_t>(buffer.samples.size() * bytes_per_sample);
  const auto rate = static_cast<std::uint32_t>(std::lround(buffer.sample_rate));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_len + 1);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_len + (data_len & 1u));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, tag);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * bytes_per_sample);
  put_u16(out, static_cast<std::uint16_t>(bytes_per_sample));
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_len);
  for (double v : buffer.samples) {
    switch (format) {
      case SampleFormat::pcm16:
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(quantise(v, 32768.0))));
        break;
      case SampleFormat::pcm24: {
        const auto q = static_cast<std::uint32_t>(quantise(v, 8388608.0));
        out.push_back(static_cast<std::uint8_t>(q));
        out.push_back(static_cast<std::uint8_t>(q >> 8));
        out.push_back(static_cast<std::uint8_t>(q >> 16));
        break;
      }
      case SampleFormat::float32:
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        break;
    }
  }
  if (data_len & 1u) out.push_back(0);
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer, SampleFormat format) {
  const auto bytes = encode_wav(buffer, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace srirnn::io
