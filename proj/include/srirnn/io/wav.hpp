#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace srirnn::io {

enum class SampleFormat { pcm16, pcm24, float32 };

std::string_view to_string(SampleFormat f) noexcept;
SampleFormat parse_sample_format(std::string_view text);

struct AudioBuffer {
  std::vector<double> samples;  // mono, PCM normalised to [-1, 1)
  double sample_rate = 44100.0;
  SampleFormat format = SampleFormat::float32;
  std::uint16_t source_channels = 1;
};

// RIFF/WAVE reader for PCM16, PCM24 and IEEE float32 (plain or extensible
// format chunk). Multichannel files yield channel 0 and print a warning to
// stderr. Throws FormatError with the byte offset of the problem.
AudioBuffer read_wav(const std::filesystem::path& path);
AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes);

// Writes a mono file. PCM output rounds to nearest and clips to full scale.
void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer, SampleFormat format);
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, SampleFormat format);

}  // namespace srirnn::io
