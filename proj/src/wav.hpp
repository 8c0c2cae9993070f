#pragma once

#include <string>

#include "signal.hpp"

namespace f0lab {

// Single-channel 16-bit PCM little-endian WAV. Samples are clamped onto the
// int16 grid on write and divided by 32768 on read, so quantize16 buffers
// survive a round trip bit-exactly.
void write_wav(const std::string& path, const Signal& s);
Signal read_wav(const std::string& path);

}  // namespace f0lab
