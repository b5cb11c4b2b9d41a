#pragma once

#include <stdexcept>
#include <string>

namespace glance {

// Raised for bad user input: malformed files, shape mismatches, out-of-range
// arguments. The CLI maps these to exit code 1; everything else is a runtime
// failure (exit code 2).
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace glance
