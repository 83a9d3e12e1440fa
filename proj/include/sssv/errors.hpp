#pragma once

#include <stdexcept>
#include <string>

namespace sssv {

// Bad input: dimension mismatches, out-of-range parameters, malformed files.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or unwritable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sssv
