#include "wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "errors.hpp"

namespace f0lab {
namespace {

void put_u32(std::ofstream& f, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  f.write(reinterpret_cast<const char*>(b), 4);
}

void put_u16(std::ofstream& f, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  f.write(reinterpret_cast<const char*>(b), 2);
}

uint32_t get_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t get_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

void write_wav(const std::string& path, const Signal& s) {
  validate_signal(s, "write_wav");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("write_wav: cannot open " + path);

  const uint32_t n = static_cast<uint32_t>(s.samples.size());
  const uint32_t data_bytes = n * 2;
  const uint32_t sr = static_cast<uint32_t>(s.sample_rate);

  f.write("RIFF", 4);
  put_u32(f, 36 + data_bytes);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  put_u32(f, 16);
  put_u16(f, 1);   // PCM
  put_u16(f, 1);   // mono
  put_u32(f, sr);
  put_u32(f, sr * 2);  // byte rate
  put_u16(f, 2);       // block align
  put_u16(f, 16);      // bits per sample
  f.write("data", 4);
  put_u32(f, data_bytes);

  std::vector<unsigned char> buf(data_bytes);
  for (uint32_t i = 0; i < n; ++i) {
    double v = std::lrint(s.samples[i] * 32768.0);
    v = std::clamp(v, -32768.0, 32767.0);
    int16_t q = static_cast<int16_t>(v);
    buf[2 * i] = static_cast<unsigned char>(q & 0xff);
    buf[2 * i + 1] = static_cast<unsigned char>((q >> 8) & 0xff);
  }
  f.write(reinterpret_cast<const char*>(buf.data()), data_bytes);
  if (!f) throw IoError("write_wav: short write to " + path);
}

Signal read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("read_wav: cannot open " + path);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
    throw IoError("read_wav: not a RIFF/WAVE file: " + path);

  size_t pos = 12;
  int sample_rate = 0;
  uint16_t channels = 0, bits = 0, format = 0;
  bool have_fmt = false;
  Signal out;
  while (pos + 8 <= raw.size()) {
    uint32_t chunk_size = get_u32(raw.data() + pos + 4);
    const unsigned char* body = raw.data() + pos + 8;
    if (pos + 8 + chunk_size > raw.size())
      throw IoError("read_wav: truncated chunk in " + path);
    if (std::memcmp(raw.data() + pos, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw IoError("read_wav: malformed fmt chunk in " + path);
      format = get_u16(body);
      channels = get_u16(body + 2);
      sample_rate = static_cast<int>(get_u32(body + 4));
      bits = get_u16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(raw.data() + pos, "data", 4) == 0) {
      if (!have_fmt) throw IoError("read_wav: data chunk before fmt in " + path);
      if (format != 1 || channels != 1 || bits != 16)
        throw IoError("read_wav: expected mono 16-bit PCM in " + path);
      size_t n = chunk_size / 2;
      out.sample_rate = sample_rate;
      out.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        int16_t q = static_cast<int16_t>(body[2 * i] | (body[2 * i + 1] << 8));
        out.samples[i] = static_cast<double>(q) / 32768.0;
      }
      return out;
    }
    pos += 8 + chunk_size + (chunk_size & 1);
  }
  throw IoError("read_wav: no data chunk in " + path);
}

}  // namespace f0lab
