#pragma once

#include <stdexcept>
#include <string>

namespace disq {

// The built triangle cannot certify the requested tolerance at this depth.
// Carries the smallest depth (and, where relevant, working precision)
// estimated to suffice.
struct InsufficientDepth : std::runtime_error {
  InsufficientDepth(const std::string& msg, int rec_depth, unsigned rec_bits = 0)
      : std::runtime_error(msg), recommended_depth(rec_depth), recommended_bits(rec_bits) {}
  int recommended_depth;
  unsigned recommended_bits;
};

}  // namespace disq
