#pragma once

#include <stdexcept>
#include <string>

namespace f0lab {

// I/O failures: missing files, malformed formats, unwritable paths.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures: divergence, non-finite values where finite required.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace f0lab
