#pragma once

#include <cstdint>
#include <vector>

#include "apsim/cycle_model.hpp"
#include "apsim/event_trace.hpp"

namespace apsim {

/// Output of one functionally emulated op instance.
struct OpResult {
  std::vector<std::int64_t> values;
  EventTrace trace;
  std::uint64_t analytic_cycles = 0;
  OpGeometry geometry;
};

/// Dense row-major integer matrix.
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> data;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

  [[nodiscard]] std::int64_t& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  [[nodiscard]] std::int64_t at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Every op below builds its own zero-initialised CamArray sized by
// op_geometry(), runs the LUT schedule on it and reads the result back.
// Unsigned operands must lie in [0, 2^m); relu takes m-bit two's complement.

/// B <- A + B for each row pair. Results are m+1 bits wide.
OpResult inplace_add(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                     unsigned m, ApVariant variant);

/// C <- A * B per row, shift-and-add over a 2m-bit product field.
OpResult multiply(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                  unsigned m, ApVariant variant);

/// Sum of all elements. Tree variants zero-pad to a power of two, the plain
/// 2D variant only to an even count.
OpResult reduce(const std::vector<std::int64_t>& a, unsigned m, ApVariant variant);

/// K (i x j) times P (j x u). Values are the i*u outputs in row-major order.
OpResult matmat(const IntMatrix& k, const IntMatrix& p, unsigned m, ApVariant variant);

/// max(v, 0) elementwise on m-bit two's complement inputs.
OpResult relu(const std::vector<std::int64_t>& v, unsigned m, ApVariant variant);

/// `values` holds k windows of s elements back to back; s must be a power of
/// two. Returns one result per window.
OpResult max_pool(const std::vector<std::int64_t>& values, std::uint64_t s, std::uint64_t k,
                  unsigned m, ApVariant variant);

/// Windowed floor(sum / s), taken by reading the sum from bit log2(s) upwards.
OpResult avg_pool(const std::vector<std::int64_t>& values, std::uint64_t s, std::uint64_t k,
                  unsigned m, ApVariant variant);

}  // namespace apsim
