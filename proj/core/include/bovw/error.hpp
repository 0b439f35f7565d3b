#pragma once

#include <stdexcept>
#include <string>

namespace bovw {

/// Raised for malformed inputs, violated preconditions and I/O failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bovw
