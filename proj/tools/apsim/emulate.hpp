#pragma once

#include <cstdint>
#include <iosfwd>

#include "apsim/cycle_model.hpp"

namespace apsim::cli {

struct EmulateOptions {
  OpKind op = OpKind::addition;
  ApVariant variant = ApVariant::ap2d;
  unsigned m = 4;
  std::uint64_t l = 8;  // words in the array (add/multiply: two per row)
  std::uint64_t s = 4;  // pooling window
  std::uint64_t k = 2;  // pooling windows
  std::uint64_t i = 2;
  std::uint64_t j = 2;
  std::uint64_t u = 2;
  std::uint64_t seed = 1;
  unsigned trials = 1;
  bool verbose = false;
};

/// Runs random instances of one op on the emulated array, checks values
/// against a direct computation and the trace against the closed forms.
/// Returns the number of failed instances.
unsigned run_emulate(const EmulateOptions& opt, std::ostream& out);

}  // namespace apsim::cli
