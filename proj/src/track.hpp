#pragma once

#include <vector>

namespace f0lab {

// One frame of a fundamental-frequency track. The sentinel convention is
// f0_hz == 0 for unvoiced frames; voiced implies f0_hz > 0.
struct F0Point {
  double f0_hz = 0.0;
  bool voiced = false;
};

using F0Track = std::vector<F0Point>;

}  // namespace f0lab
