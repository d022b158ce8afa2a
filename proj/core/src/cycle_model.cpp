#include "apsim/cycle_model.hpp"

#include <cmath>

#include "apsim/errors.hpp"

namespace apsim {

std::string_view to_string(ApVariant v) {
  switch (v) {
    case ApVariant::ap1d: return "1d";
    case ApVariant::ap2d: return "2d";
    case ApVariant::ap2d_seg: return "2dseg";
  }
  return "?";
}

std::string_view to_string(OpKind k) {
  switch (k) {
    case OpKind::addition: return "add";
    case OpKind::multiplication: return "multiply";
    case OpKind::reduction: return "reduce";
    case OpKind::matmat: return "matmat";
    case OpKind::relu: return "relu";
    case OpKind::max_pool: return "maxpool";
    case OpKind::avg_pool: return "avgpool";
  }
  return "?";
}

ApVariant parse_variant(std::string_view s) {
  if (s == "1d") return ApVariant::ap1d;
  if (s == "2d") return ApVariant::ap2d;
  if (s == "2dseg") return ApVariant::ap2d_seg;
  throw UsageError("unknown AP variant '" + std::string(s) + "' (expected 1d, 2d or 2dseg)");
}

OpKind parse_op(std::string_view s) {
  for (auto k : {OpKind::addition, OpKind::multiplication, OpKind::reduction, OpKind::matmat,
                 OpKind::relu, OpKind::max_pool, OpKind::avg_pool}) {
    if (s == to_string(k)) return k;
  }
  throw UsageError("unknown op '" + std::string(s) + "'");
}

std::uint64_t ceil_log2(std::uint64_t x) {
  std::uint64_t r = 0;
  while ((std::uint64_t{1} << r) < x) ++r;
  return r;
}

std::uint64_t next_pow2(std::uint64_t x) { return x <= 1 ? 1 : std::uint64_t{1} << ceil_log2(x); }

bool is_pow2(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

namespace {

bool tree(ApVariant v) { return v != ApVariant::ap2d; }

void require(bool ok, const char* what) {
  if (!ok) throw UsageError(what);
}

std::uint64_t padded_words(std::uint64_t l, ApVariant v) {
  return tree(v) ? next_pow2(l) : l + (l & 1U);
}

std::uint64_t padded_j(std::uint64_t j, ApVariant v) { return tree(v) ? next_pow2(j) : j; }

std::uint64_t padded_window(OpKind op, std::uint64_t s, ApVariant v) {
  if (op == OpKind::avg_pool || tree(v)) return next_pow2(s);
  return s + (s & 1U);
}

void check_params(OpKind op, const OpParams& p) {
  require(p.m >= 1, "bitwidth M must be at least 1");
  switch (op) {
    case OpKind::addition:
    case OpKind::multiplication:
      require(p.l >= 2 && p.l % 2 == 0, "L must be an even word count of at least 2");
      break;
    case OpKind::reduction:
      require(p.l >= 1, "L must be at least 1");
      break;
    case OpKind::relu:
      require(p.l >= 1, "L must be at least 1");
      break;
    case OpKind::matmat:
      require(p.i >= 1 && p.j >= 1 && p.u >= 1, "matrix dimensions must be positive");
      break;
    case OpKind::max_pool:
    case OpKind::avg_pool:
      require(p.s >= 2 && p.k >= 1, "pooling needs S >= 2 and K >= 1");
      break;
  }
}

}  // namespace

std::uint64_t analytic_cycles(OpKind op, const OpParams& p, ApVariant v) {
  check_params(op, p);
  const std::uint64_t M = p.m;
  switch (op) {
    case OpKind::addition:
      return 2 * M + 8 * M + M + 1;
    case OpKind::multiplication:
      return 2 * M + 8 * M * M + 2 * M;
    case OpKind::relu:
      return 4 * M + 1;
    case OpKind::reduction: {
      if (p.l < 2) return 2 * M + 1;
      const std::uint64_t L = padded_words(p.l, v);
      switch (v) {
        case ApVariant::ap1d: {
          std::uint64_t sum = 0;
          for (std::uint64_t q = 1; q <= ceil_log2(L); ++q) sum += 8 * (M + q - 1);
          return 2 * M + sum + L - 1;
        }
        case ApVariant::ap2d:
          return 2 * M + 8 * M + 8 * (L / 2 - 1) + 1;
        case ApVariant::ap2d_seg:
          return 2 * M + 8 * M + 8 * ceil_log2(L / 2) + 1;
      }
      break;
    }
    case OpKind::matmat: {
      const std::uint64_t j = padded_j(p.j, v);
      const std::uint64_t lj = ceil_log2(j);
      const std::uint64_t iu = p.i * p.u;
      switch (v) {
        case ApVariant::ap1d: {
          std::uint64_t sum = 0;
          for (std::uint64_t q = 1; q <= lj; ++q) sum += 8 * (2 * M + q - 1);
          return 2 * M + 8 * M * M + sum + 2 * iu * (j - 1) + 2 * M + lj;
        }
        case ApVariant::ap2d:
          return 2 * M + 8 * M * M + 8 * iu * (j - 1) + 2 * M + lj;
        case ApVariant::ap2d_seg:
          return 2 * M + 8 * M * M + 8 * lj + 2 * M + lj;
      }
      break;
    }
    case OpKind::max_pool: {
      const std::uint64_t S = padded_window(op, p.s, v);
      const std::uint64_t K = p.k;
      switch (v) {
        case ApVariant::ap1d:
          return 2 * M + (8 * M + 2) * ceil_log2(S) + 2 * K * (S / 2 - 1) + M;
        case ApVariant::ap2d:
          return 2 * M + (8 * M + 2) + 10 * K * (S / 2 - 1) + M;
        case ApVariant::ap2d_seg:
          return 2 * M + (8 * M + 2) + (8 + 2 * K) * ceil_log2(S / 2) + M;
      }
      break;
    }
    case OpKind::avg_pool: {
      const std::uint64_t S = padded_window(op, p.s, v);
      const std::uint64_t K = p.k;
      switch (v) {
        case ApVariant::ap1d: {
          std::uint64_t sum = 0;
          for (std::uint64_t q = 1; q <= ceil_log2(S); ++q) sum += 8 * (M + q - 1);
          return 2 * M + 2 * K * (S / 2 - 1) + sum + M;
        }
        case ApVariant::ap2d:
          return 2 * M + 8 * M + 8 * K * (S / 2 - 1) + M;
        case ApVariant::ap2d_seg:
          return 2 * M + 8 * M + 8 * ceil_log2(S / 2) + M;
      }
      break;
    }
  }
  throw UsageError("unsupported op/variant combination");
}

OpGeometry op_geometry(OpKind op, const OpParams& p, ApVariant v) {
  check_params(op, p);
  const std::uint64_t M = p.m;
  switch (op) {
    case OpKind::addition:
      return {p.l / 2, 2 * M + 1};
    case OpKind::multiplication:
      return {p.l / 2, 4 * M};
    case OpKind::relu:
      return {p.l, M + 1};
    case OpKind::reduction: {
      if (p.l < 2) return {1, 2 * M};
      const std::uint64_t L = padded_words(p.l, v);
      const std::uint64_t lg = ceil_log2(L);
      switch (v) {
        case ApVariant::ap1d: return {L / 2, (M + lg - 1) + (M + lg)};
        case ApVariant::ap2d: return {L / 2 + 1, M + (M + lg)};
        case ApVariant::ap2d_seg: return {L / 2 + L / 4, M + (M + lg)};
      }
      break;
    }
    case OpKind::matmat: {
      const std::uint64_t j = padded_j(p.j, v);
      const std::uint64_t lanes = p.i * j * p.u;
      const std::uint64_t W = 2 * M + ceil_log2(j);
      switch (v) {
        case ApVariant::ap1d: return {lanes, 2 * M + W + (W - 1)};
        case ApVariant::ap2d: return {lanes + 1, 2 * M + W};
        case ApVariant::ap2d_seg: return {lanes + lanes / 2, 2 * M + W};
      }
      break;
    }
    case OpKind::avg_pool: {
      const std::uint64_t S = padded_window(op, p.s, v);
      const std::uint64_t J = ceil_log2(S);
      const std::uint64_t R0 = S * p.k / 2;
      switch (v) {
        case ApVariant::ap1d: return {R0, (M + J - 1) + (M + J)};
        case ApVariant::ap2d: return {R0 + 1, M + (M + J)};
        case ApVariant::ap2d_seg: return {R0 + R0 / 2, M + (M + J)};
      }
      break;
    }
    case OpKind::max_pool: {
      const std::uint64_t S = padded_window(op, p.s, v);
      const std::uint64_t R0 = S * p.k / 2;
      switch (v) {
        case ApVariant::ap1d: return {R0, 2 * M + 2};
        case ApVariant::ap2d: return {R0 + 2, 2 * M + 2};
        case ApVariant::ap2d_seg: return {R0 + 2 * (R0 / 2), 2 * M + 2};
      }
      break;
    }
  }
  throw UsageError("unsupported op/variant combination");
}

namespace {

// Expected cells written by LUT passes when every searched bit is uniform:
// each pass tags 2^-searched of the lanes and writes its write-mask width.
double expected_lut_writes(std::uint64_t searched, double write_mask_total, double lanes) {
  return write_mask_total * lanes / static_cast<double>(std::uint64_t{1} << searched);
}

// Add LUT: 3 searched roles, write masks 2+1+2+1.
double add_writes(double lanes) { return expected_lut_writes(3, 6.0, lanes); }
// Guarded add / max LUT: 4 searched roles, write masks total 6.
double wide_writes(double lanes) { return expected_lut_writes(4, 6.0, lanes); }

std::uint64_t rounded(double x) { return static_cast<std::uint64_t>(std::llround(x)); }

}  // namespace

EventTrace analytic_trace(OpKind op, const OpParams& p, ApVariant v) {
  const OpGeometry g = op_geometry(op, p, v);
  const std::uint64_t M = p.m;
  const std::uint64_t R = g.rows;
  const double Rd = static_cast<double>(R);
  EventTrace t;
  double written = 0.0;

  // Population: 2M column writes of every row.
  auto populate = [&](std::uint64_t columns) {
    t.n_write += columns;
    written += static_cast<double>(columns * R);
  };
  // One horizontal in-place add of width w over all rows.
  auto horizontal_add = [&](std::uint64_t w) {
    t.n_compare += 4 * w;
    t.n_write += 4 * w;
    t.active_cells_compared += 12 * w * R;
    written += static_cast<double>(w) * add_writes(Rd);
  };
  // Vertical row-pair sweep: 4 passes, `pairs` groups in parallel, width w.
  auto vertical = [&](std::uint64_t searched, std::uint64_t w, std::uint64_t pairs, double per_col) {
    t.n_compare += 4;
    t.n_write += 4;
    t.active_cells_compared += 4 * searched * w * pairs;
    written += per_col * static_cast<double>(w * pairs);
  };
  auto column_reads = [&](std::uint64_t n) {
    t.n_read += n;
    t.cells_read += n * R;
  };
  auto transfers = [&](std::uint64_t n, std::uint64_t width) {
    t.n_read += n;
    t.n_write += n;
    t.n_transfer += n;
    t.cells_read += n * width;
    written += static_cast<double>(n * width);
    t.bits_transferred += n * width;
  };

  switch (op) {
    case OpKind::addition:
      populate(2 * M);
      horizontal_add(M);
      column_reads(M + 1);
      break;

    case OpKind::multiplication:
      populate(2 * M);
      t.n_compare += 4 * M * M;
      t.n_write += 4 * M * M;
      t.active_cells_compared += 16 * M * M * R;
      written += static_cast<double>(M * M) * wide_writes(Rd);
      column_reads(2 * M);
      break;

    case OpKind::relu:
      populate(M);
      t.n_read += 1;
      t.cells_read += R;
      t.n_write += 2;
      written += 2.0 * Rd;
      t.n_compare += M - 1;
      t.n_write += M - 1;
      t.active_cells_compared += 2 * (M - 1) * R;
      written += static_cast<double>(M - 1) * expected_lut_writes(2, 1.0, Rd);
      column_reads(M);
      break;

    case OpKind::reduction: {
      if (p.l < 2) {
        populate(2 * M);
        t.n_read += 1;
        t.cells_read += M;
        break;
      }
      const std::uint64_t L = padded_words(p.l, v);
      const std::uint64_t lg = ceil_log2(L);
      const std::uint64_t wB = M + lg;
      populate(2 * M);
      if (v == ApVariant::ap1d) {
        const std::uint64_t wA = M + lg - 1;
        for (std::uint64_t q = 1; q <= lg; ++q) {
          horizontal_add(M + q - 1);
          if (q < lg) transfers(R >> q, wA);
        }
      } else {
        horizontal_add(M);
        if (v == ApVariant::ap2d) {
          for (std::uint64_t r = 1; r < L / 2; ++r) vertical(3, wB, 1, 0.75);
        } else {
          for (std::uint64_t s = 1; s <= ceil_log2(L / 2); ++s) vertical(3, wB, (L / 2) >> s, 0.75);
        }
      }
      t.n_read += 1;
      t.cells_read += wB;
      break;
    }

    case OpKind::matmat: {
      const std::uint64_t j = padded_j(p.j, v);
      const std::uint64_t lj = ceil_log2(j);
      const std::uint64_t groups = p.i * p.u;
      const std::uint64_t W = 2 * M + lj;
      populate(2 * M);
      t.n_compare += 4 * M * M;
      t.n_write += 4 * M * M;
      t.active_cells_compared += 16 * M * M * R;
      written += static_cast<double>(M * M) * wide_writes(Rd);
      if (v == ApVariant::ap1d) {
        for (std::uint64_t q = 1; q <= lj; ++q) {
          transfers(groups * (j >> q), W - 1);
          horizontal_add(2 * M + q - 1);
        }
      } else if (v == ApVariant::ap2d) {
        for (std::uint64_t n = 0; n < groups * (j - 1); ++n) vertical(3, W, 1, 0.75);
      } else {
        for (std::uint64_t s = 1; s <= lj; ++s) vertical(3, W, groups * (j >> s), 0.75);
      }
      column_reads(W);
      break;
    }

    case OpKind::avg_pool: {
      const std::uint64_t S = padded_window(op, p.s, v);
      const std::uint64_t J = ceil_log2(S);
      const std::uint64_t K = p.k;
      const std::uint64_t wB = M + J;
      populate(2 * M);
      if (v == ApVariant::ap1d) {
        const std::uint64_t wA = M + J - 1;
        for (std::uint64_t q = 1; q <= J; ++q) {
          horizontal_add(M + q - 1);
          if (q < J) transfers(K * ((S / 2) >> q), wA);
        }
      } else {
        horizontal_add(M);
        if (v == ApVariant::ap2d) {
          for (std::uint64_t n = 0; n < K * (S / 2 - 1); ++n) vertical(3, wB, 1, 0.75);
        } else {
          for (std::uint64_t s = 1; s <= ceil_log2(S / 2); ++s) vertical(3, wB, K * ((S / 2) >> s), 0.75);
        }
      }
      column_reads(M);
      break;
    }

    case OpKind::max_pool: {
      const std::uint64_t S = padded_window(op, p.s, v);
      const std::uint64_t J = ceil_log2(S);
      const std::uint64_t K = p.k;
      auto horizontal_max = [&] {
        t.n_compare += 4 * M;
        t.n_write += 4 * M;
        t.active_cells_compared += 16 * M * R;
        written += static_cast<double>(M) * wide_writes(Rd);
      };
      auto reset_flag_columns = [&] {
        t.n_write += 2;
        written += 2.0 * Rd;
      };
      populate(2 * M);
      if (v == ApVariant::ap1d) {
        for (std::uint64_t r = 1; r <= J; ++r) {
          horizontal_max();
          reset_flag_columns();
          if (r < J) transfers(K * ((S / 2) >> r), M);
        }
      } else {
        horizontal_max();
        reset_flag_columns();
        if (v == ApVariant::ap2d) {
          for (std::uint64_t n = 0; n < K * (S / 2 - 1); ++n) {
            vertical(4, M, 1, 0.375);
            t.n_write += 2;
            written += 2.0 * static_cast<double>(M);
          }
        } else {
          for (std::uint64_t s = 1; s <= ceil_log2(S / 2); ++s) {
            vertical(4, M, K * ((S / 2) >> s), 0.375);
            t.n_write += 2 * K;
            written += 2.0 * static_cast<double>(K * (S / 4) * M);
          }
        }
      }
      column_reads(M);
      break;
    }
  }
  t.cells_written = rounded(written);
  return t;
}

}  // namespace apsim
