#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "apsim/event_trace.hpp"

namespace apsim {

enum class ApVariant { ap1d, ap2d, ap2d_seg };

enum class OpKind { addition, multiplication, reduction, matmat, relu, max_pool, avg_pool };

std::string_view to_string(ApVariant v);
std::string_view to_string(OpKind k);
ApVariant parse_variant(std::string_view s);
OpKind parse_op(std::string_view s);

/// Parameters of one AP operation. Which fields matter depends on the op:
///   addition / multiplication: m, l (total words, two per row)
///   reduction: m, l
///   matmat: m, i, j, u
///   relu: m, l (one word per row)
///   max_pool / avg_pool: m, s (window), k (number of windows)
struct OpParams {
  unsigned m = 1;
  std::uint64_t l = 0;
  std::uint64_t s = 0;
  std::uint64_t k = 0;
  std::uint64_t i = 0;
  std::uint64_t j = 0;
  std::uint64_t u = 0;
};

std::uint64_t ceil_log2(std::uint64_t x);
std::uint64_t next_pow2(std::uint64_t x);
bool is_pow2(std::uint64_t x);

/// Closed-form runtime in stages (one stage = one cycle unit), straight from
/// the per-variant run-time table. Tree-shaped variants (1D and segmented 2D)
/// zero-pad L, j and S up to a power of two; the unsegmented 2D AP
/// accumulates one row pair at a time and needs no padding.
std::uint64_t analytic_cycles(OpKind op, const OpParams& p, ApVariant v);

/// Geometry of the array an op instance occupies.
struct OpGeometry {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
};
OpGeometry op_geometry(OpKind op, const OpParams& p, ApVariant v);

/// Closed-form EventTrace of one op instance: compare/write/read/transfer
/// stage counts from the per-stage equations, exact compared and read cell
/// counts for the canonical layout, and the expected number of written cells
/// for uniformly distributed operand bits.
EventTrace analytic_trace(OpKind op, const OpParams& p, ApVariant v);

}  // namespace apsim
