#include "apsim/ap_ops.hpp"

#include <string>

#include "apsim/cam_array.hpp"
#include "apsim/errors.hpp"
#include "apsim/lut.hpp"

namespace apsim {

namespace {

void check_unsigned(const std::vector<std::int64_t>& v, unsigned m, const char* name) {
  if (m < 1 || m > 32) throw ValidationError("bitwidth must be in [1, 32], got " + std::to_string(m));
  const std::int64_t limit = std::int64_t{1} << m;
  for (auto x : v) {
    if (x < 0 || x >= limit) {
      throw ValidationError(std::string(name) + " value " + std::to_string(x) + " does not fit " +
                            std::to_string(m) + " unsigned bits");
    }
  }
}

void check_signed(const std::vector<std::int64_t>& v, unsigned m) {
  if (m < 1 || m > 32) throw ValidationError("bitwidth must be in [1, 32], got " + std::to_string(m));
  const std::int64_t lo = -(std::int64_t{1} << (m - 1));
  const std::int64_t hi = (std::int64_t{1} << (m - 1)) - 1;
  for (auto x : v) {
    if (x < lo || x > hi) {
      throw ValidationError("value " + std::to_string(x) + " does not fit " + std::to_string(m) +
                            "-bit two's complement");
    }
  }
}

// Thin driver over one CamArray holding the op's fields.
class Emu {
 public:
  explicit Emu(OpGeometry g) : cam_(g.rows, g.cols) {}

  CamArray& cam() { return cam_; }

  // Bit-sequential population: one column write per bit of the field.
  void populate(std::size_t first_col, unsigned width, const std::vector<std::uint64_t>& rows) {
    BitVector col(cam_.rows(), 0);
    for (unsigned b = 0; b < width; ++b) {
      for (std::size_t r = 0; r < col.size(); ++r) {
        col[r] = r < rows.size() ? static_cast<std::uint8_t>((rows[r] >> b) & 1U) : 0;
      }
      cam_.write_column(first_col + b, col);
    }
  }

  // One horizontal pass sequence of `prog` with role i bound to column cols[i].
  void lut(const LutProgram& prog, const std::vector<std::size_t>& cols) {
    for (const auto& pass : prog.passes) {
      KeyMask search{Orientation::horizontal, BitVector(cam_.cols(), 0), {}, {}};
      KeyMask write{Orientation::horizontal, BitVector(cam_.cols(), 0), {}, {}};
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (pass.match[i] >= 0) {
          search.mask.push_back(cols[i]);
          search.key[cols[i]] = static_cast<std::uint8_t>(pass.match[i]);
        }
        if (pass.write[i] >= 0) {
          write.mask.push_back(cols[i]);
          write.key[cols[i]] = static_cast<std::uint8_t>(pass.write[i]);
        }
      }
      const BitVector tags = cam_.compare(search);
      cam_.selective_write(write, tags);
    }
  }

  // In-place B[0..w) += A[0..w), carry out landing in B[w].
  void add(std::size_t a, std::size_t b, unsigned w) {
    for (unsigned i = 0; i < w; ++i) lut(add_lut(), {b + w, a + i, b + i});
  }

  void vertical(const LutProgram& prog, const std::vector<std::vector<std::size_t>>& groups,
                Window cols, SweepDirection dir, const std::vector<std::size_t>& chained) {
    cam_.vertical_program(prog.passes, groups, cols, dir, chained);
  }

  void vertical_add(const std::vector<std::vector<std::size_t>>& groups, Window cols) {
    vertical(add_lut(), groups, cols, SweepDirection::lsb_first, {0});
  }

  void transfer(std::size_t src_row, std::size_t src_col, std::size_t width, std::size_t dst_row,
                std::size_t dst_col) {
    transfer_word(cam_, src_row, Window{src_col, width}, cam_, dst_row, dst_col);
  }

  // Clear the given rows over a column window with one vertical write.
  void clear_rows(const std::vector<std::size_t>& rows, Window cols) {
    KeyMask km{Orientation::vertical, BitVector(cam_.rows(), 0), rows, {}};
    BitVector tags(cam_.cols(), 0);
    for (std::size_t c = cols.first; c < cols.first + cols.count; ++c) tags[c] = 1;
    cam_.selective_write(km, tags);
  }

  void clear_column(std::size_t col) {
    const BitVector zeros(cam_.rows(), 0);
    cam_.write_column(col, zeros);
  }

  // Bit-sequential read of a field: one read per column, value per row.
  std::vector<std::uint64_t> read_field(std::size_t first_col, unsigned width) {
    std::vector<std::uint64_t> out(cam_.rows(), 0);
    for (unsigned b = 0; b < width; ++b) {
      const BitVector col = cam_.read_bit_sequential(first_col + b);
      for (std::size_t r = 0; r < out.size(); ++r) out[r] |= std::uint64_t{col[r]} << b;
    }
    return out;
  }

  std::uint64_t read_word(std::size_t row, std::size_t first_col, unsigned width) {
    const BitVector bits = cam_.read_word_sequential(row, {first_col, width});
    std::uint64_t v = 0;
    for (unsigned b = 0; b < width; ++b) v |= std::uint64_t{bits[b]} << b;
    return v;
  }

 private:
  CamArray cam_;
};

std::vector<std::uint64_t> as_u64(const std::vector<std::int64_t>& v) {
  return {v.begin(), v.end()};
}

// Splits a flat word list into the two per-row words, zero padded to `rows`.
void split_pairs(const std::vector<std::int64_t>& words, std::size_t rows,
                 std::vector<std::uint64_t>& a, std::vector<std::uint64_t>& b) {
  a.assign(rows, 0);
  b.assign(rows, 0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    (i % 2 == 0 ? a : b)[i / 2] = static_cast<std::uint64_t>(words[i]);
  }
}

OpResult finish(Emu& emu, std::vector<std::int64_t> values, OpKind op, const OpParams& p,
                ApVariant v) {
  OpResult r;
  r.values = std::move(values);
  r.trace = emu.cam().trace();
  r.analytic_cycles = analytic_cycles(op, p, v);
  r.geometry = {emu.cam().rows(), emu.cam().cols()};
  return r;
}

}  // namespace

OpResult inplace_add(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                     unsigned m, ApVariant variant) {
  if (a.size() != b.size() || a.empty()) {
    throw DimensionError("inplace_add needs equal, non-empty operand vectors");
  }
  check_unsigned(a, m, "A");
  check_unsigned(b, m, "B");
  const OpParams p{.m = m, .l = 2 * a.size()};
  Emu emu(op_geometry(OpKind::addition, p, variant));
  const std::size_t A = 0;
  const std::size_t B = m;
  emu.populate(A, m, as_u64(a));
  emu.populate(B, m, as_u64(b));
  emu.add(A, B, m);
  const auto sums = emu.read_field(B, m + 1);
  return finish(emu, {sums.begin(), sums.end()}, OpKind::addition, p, variant);
}

OpResult multiply(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                  unsigned m, ApVariant variant) {
  if (a.size() != b.size() || a.empty()) {
    throw DimensionError("multiply needs equal, non-empty operand vectors");
  }
  check_unsigned(a, m, "A");
  check_unsigned(b, m, "B");
  const OpParams p{.m = m, .l = 2 * a.size()};
  Emu emu(op_geometry(OpKind::multiplication, p, variant));
  const std::size_t A = 0;
  const std::size_t B = m;
  const std::size_t C = 2 * m;
  emu.populate(A, m, as_u64(a));
  emu.populate(B, m, as_u64(b));
  for (unsigned j = 0; j < m; ++j) {
    for (unsigned i = 0; i < m; ++i) emu.lut(guarded_add_lut(), {B + j, C + j + m, A + i, C + i + j});
  }
  const auto prod = emu.read_field(C, 2 * m);
  return finish(emu, {prod.begin(), prod.end()}, OpKind::multiplication, p, variant);
}

OpResult reduce(const std::vector<std::int64_t>& a, unsigned m, ApVariant variant) {
  if (a.empty()) throw DimensionError("reduce needs at least one element");
  check_unsigned(a, m, "A");
  const OpParams p{.m = m, .l = a.size()};
  const OpGeometry g = op_geometry(OpKind::reduction, p, variant);
  Emu emu(g);

  if (a.size() < 2) {
    emu.populate(0, m, as_u64(a));
    emu.populate(m, m, {});
    const auto v = emu.read_word(0, 0, m);
    return finish(emu, {static_cast<std::int64_t>(v)}, OpKind::reduction, p, variant);
  }

  const bool tree = variant != ApVariant::ap2d;
  const std::size_t L = tree ? next_pow2(a.size()) : a.size() + (a.size() & 1U);
  const auto lg = static_cast<unsigned>(ceil_log2(L));
  const std::size_t half = L / 2;
  std::vector<std::uint64_t> av;
  std::vector<std::uint64_t> bv;
  split_pairs(a, half, av, bv);

  const std::size_t A = 0;
  const unsigned wA = variant == ApVariant::ap1d ? m + lg - 1 : m;
  const std::size_t B = wA;
  const unsigned wB = m + lg;
  emu.populate(A, m, av);
  emu.populate(B, m, bv);

  if (variant == ApVariant::ap1d) {
    for (unsigned q = 1; q <= lg; ++q) {
      emu.add(A, B, m + q - 1);
      if (q == lg) break;
      const std::size_t stride = std::size_t{1} << q;
      for (std::size_t r = 0; r < half; r += stride) emu.transfer(r + stride / 2, B, wA, r, A);
    }
  } else {
    emu.add(A, B, m);
    if (variant == ApVariant::ap2d) {
      const std::size_t carry = half;
      for (std::size_t r = 1; r < half; ++r) emu.vertical_add({{carry, r, 0}}, {B, wB});
    } else {
      for (std::size_t stride = 2; stride <= half; stride *= 2) {
        std::vector<std::vector<std::size_t>> groups;
        for (std::size_t r = 0; r < half; r += stride) groups.push_back({half + r / 2, r + stride / 2, r});
        emu.vertical_add(groups, {B, wB});
      }
    }
  }
  const auto sum = emu.read_word(0, B, wB);
  return finish(emu, {static_cast<std::int64_t>(sum)}, OpKind::reduction, p, variant);
}

OpResult matmat(const IntMatrix& k, const IntMatrix& p_mat, unsigned m, ApVariant variant) {
  if (k.rows == 0 || k.cols == 0 || p_mat.cols == 0) throw DimensionError("matmat needs non-empty matrices");
  if (k.cols != p_mat.rows) {
    throw DimensionError("matmat inner dimensions differ: " + std::to_string(k.cols) + " vs " +
                         std::to_string(p_mat.rows));
  }
  if (k.data.size() != k.rows * k.cols || p_mat.data.size() != p_mat.rows * p_mat.cols) {
    throw DimensionError("matrix storage does not match its shape");
  }
  check_unsigned(k.data, m, "K");
  check_unsigned(p_mat.data, m, "P");

  const OpParams p{.m = m, .i = k.rows, .j = k.cols, .u = p_mat.cols};
  Emu emu(op_geometry(OpKind::matmat, p, variant));
  const std::size_t j = variant == ApVariant::ap2d ? k.cols : next_pow2(k.cols);
  const auto lj = static_cast<unsigned>(ceil_log2(j));
  const std::size_t groups = k.rows * p_mat.cols;
  const std::size_t lanes = groups * j;
  const unsigned W = 2 * m + lj;
  const std::size_t A = 0;
  const std::size_t B = m;
  const std::size_t C = 2 * m;
  const std::size_t X = C + W;

  // Lane ((a*u + b)*j + t) holds K[a][t] and P[t][b].
  std::vector<std::uint64_t> av(lanes, 0);
  std::vector<std::uint64_t> bv(lanes, 0);
  for (std::size_t a = 0; a < k.rows; ++a) {
    for (std::size_t b = 0; b < p_mat.cols; ++b) {
      for (std::size_t t = 0; t < k.cols; ++t) {
        const std::size_t lane = (a * p_mat.cols + b) * j + t;
        av[lane] = static_cast<std::uint64_t>(k.at(a, t));
        bv[lane] = static_cast<std::uint64_t>(p_mat.at(t, b));
      }
    }
  }
  emu.populate(A, m, av);
  emu.populate(B, m, bv);
  for (unsigned jb = 0; jb < m; ++jb) {
    for (unsigned ib = 0; ib < m; ++ib) {
      emu.lut(guarded_add_lut(), {B + jb, C + jb + m, A + ib, C + ib + jb});
    }
  }

  if (variant == ApVariant::ap1d) {
    for (unsigned q = 1; q <= lj; ++q) {
      const std::size_t stride = std::size_t{1} << q;
      for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t t = 0; t < j; t += stride) {
          emu.transfer(g * j + t + stride / 2, C, W - 1, g * j + t, X);
        }
      }
      emu.add(X, C, 2 * m + q - 1);
    }
  } else if (variant == ApVariant::ap2d) {
    const std::size_t carry = lanes;
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t t = 1; t < j; ++t) emu.vertical_add({{carry, g * j + t, g * j}}, {C, W});
    }
  } else {
    for (std::size_t stride = 2; stride <= j; stride *= 2) {
      std::vector<std::vector<std::size_t>> pairs;
      for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t t = 0; t < j; t += stride) {
          const std::size_t row = g * j + t;
          pairs.push_back({lanes + row / 2, row + stride / 2, row});
        }
      }
      emu.vertical_add(pairs, {C, W});
    }
  }

  const auto field = emu.read_field(C, W);
  std::vector<std::int64_t> out(groups);
  for (std::size_t g = 0; g < groups; ++g) out[g] = static_cast<std::int64_t>(field[g * j]);
  return finish(emu, std::move(out), OpKind::matmat, p, variant);
}

OpResult relu(const std::vector<std::int64_t>& v, unsigned m, ApVariant variant) {
  if (v.empty()) throw DimensionError("relu needs at least one element");
  check_signed(v, m);
  const OpParams p{.m = m, .l = v.size()};
  Emu emu(op_geometry(OpKind::relu, p, variant));
  const std::uint64_t field_mask = (std::uint64_t{1} << m) - 1;
  std::vector<std::uint64_t> bits(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) bits[i] = static_cast<std::uint64_t>(v[i]) & field_mask;

  const std::size_t F = m;
  const std::size_t msb = m - 1;
  emu.populate(0, m, bits);
  // Sign bits move into the flag column, then the sign column is cleared.
  const BitVector sign = emu.cam().read_bit_sequential(msb);
  emu.cam().write_column(F, sign);
  emu.clear_column(msb);
  for (std::size_t i = msb; i-- > 0;) emu.lut(relu_lut(), {i, F});
  const auto out = emu.read_field(0, m);
  return finish(emu, {out.begin(), out.end()}, OpKind::relu, p, variant);
}

namespace {

void check_pool(const std::vector<std::int64_t>& values, std::uint64_t s, std::uint64_t k, unsigned m) {
  if (s < 2 || !is_pow2(s)) throw ShapeError("pooling window must be a power of two >= 2");
  if (k < 1) throw ShapeError("pooling needs at least one window");
  if (values.size() != s * k) {
    throw ShapeError("pooling expects " + std::to_string(s * k) + " values, got " +
                     std::to_string(values.size()));
  }
  check_unsigned(values, m, "pooling");
}

}  // namespace

OpResult max_pool(const std::vector<std::int64_t>& values, std::uint64_t s, std::uint64_t k,
                  unsigned m, ApVariant variant) {
  check_pool(values, s, k, m);
  const OpParams p{.m = m, .s = s, .k = k};
  Emu emu(op_geometry(OpKind::max_pool, p, variant));
  const std::size_t rows_per_window = s / 2;
  const std::size_t R0 = s * k / 2;
  const auto J = static_cast<unsigned>(ceil_log2(s));
  std::vector<std::uint64_t> av;
  std::vector<std::uint64_t> bv;
  split_pairs(values, R0, av, bv);

  const std::size_t A = 0;
  const std::size_t B = m;
  const std::size_t F1 = 2 * m;
  const std::size_t F2 = 2 * m + 1;
  emu.populate(A, m, av);
  emu.populate(B, m, bv);

  auto horizontal_max = [&] {
    for (unsigned b = m; b-- > 0;) emu.lut(max_lut(), {A + b, B + b, F1, F2});
    emu.clear_column(F1);
    emu.clear_column(F2);
  };
  const std::vector<std::size_t> flags{2, 3};

  if (variant == ApVariant::ap1d) {
    for (unsigned r = 1; r <= J; ++r) {
      horizontal_max();
      if (r == J) break;
      const std::size_t stride = std::size_t{1} << r;
      for (std::size_t w = 0; w < k; ++w) {
        for (std::size_t t = 0; t < rows_per_window; t += stride) {
          const std::size_t row = w * rows_per_window + t;
          emu.transfer(row + stride / 2, B, m, row, A);
        }
      }
    }
  } else if (variant == ApVariant::ap2d) {
    horizontal_max();
    const std::size_t f1 = R0;
    const std::size_t f2 = R0 + 1;
    for (std::size_t w = 0; w < k; ++w) {
      const std::size_t base = w * rows_per_window;
      for (std::size_t t = 1; t < rows_per_window; ++t) {
        emu.vertical(max_lut(), {{base + t, base, f1, f2}}, {B, m}, SweepDirection::msb_first, flags);
        emu.clear_rows({f1}, {B, m});
        emu.clear_rows({f2}, {B, m});
      }
    }
  } else {
    horizontal_max();
    const std::size_t f1_base = R0;
    const std::size_t f2_base = R0 + R0 / 2;
    for (std::size_t stride = 2; stride <= rows_per_window; stride *= 2) {
      std::vector<std::vector<std::size_t>> groups;
      for (std::size_t w = 0; w < k; ++w) {
        for (std::size_t t = 0; t < rows_per_window; t += stride) {
          const std::size_t row = w * rows_per_window + t;
          groups.push_back({row + stride / 2, row, f1_base + row / 2, f2_base + row / 2});
        }
      }
      emu.vertical(max_lut(), groups, {B, m}, SweepDirection::msb_first, flags);
      for (std::size_t w = 0; w < k; ++w) {
        std::vector<std::size_t> f1_rows;
        std::vector<std::size_t> f2_rows;
        for (std::size_t x = 0; x < rows_per_window / 2; ++x) {
          f1_rows.push_back(f1_base + w * rows_per_window / 2 + x);
          f2_rows.push_back(f2_base + w * rows_per_window / 2 + x);
        }
        emu.clear_rows(f1_rows, {B, m});
        emu.clear_rows(f2_rows, {B, m});
      }
    }
  }

  const auto field = emu.read_field(B, m);
  std::vector<std::int64_t> out(k);
  for (std::size_t w = 0; w < k; ++w) out[w] = static_cast<std::int64_t>(field[w * rows_per_window]);
  return finish(emu, std::move(out), OpKind::max_pool, p, variant);
}

OpResult avg_pool(const std::vector<std::int64_t>& values, std::uint64_t s, std::uint64_t k,
                  unsigned m, ApVariant variant) {
  check_pool(values, s, k, m);
  const OpParams p{.m = m, .s = s, .k = k};
  Emu emu(op_geometry(OpKind::avg_pool, p, variant));
  const std::size_t rows_per_window = s / 2;
  const std::size_t R0 = s * k / 2;
  const auto J = static_cast<unsigned>(ceil_log2(s));
  std::vector<std::uint64_t> av;
  std::vector<std::uint64_t> bv;
  split_pairs(values, R0, av, bv);

  const std::size_t A = 0;
  const unsigned wA = variant == ApVariant::ap1d ? m + J - 1 : m;
  const std::size_t B = wA;
  const unsigned wB = m + J;
  emu.populate(A, m, av);
  emu.populate(B, m, bv);

  if (variant == ApVariant::ap1d) {
    for (unsigned q = 1; q <= J; ++q) {
      emu.add(A, B, m + q - 1);
      if (q == J) break;
      const std::size_t stride = std::size_t{1} << q;
      for (std::size_t w = 0; w < k; ++w) {
        for (std::size_t t = 0; t < rows_per_window; t += stride) {
          const std::size_t row = w * rows_per_window + t;
          emu.transfer(row + stride / 2, B, wA, row, A);
        }
      }
    }
  } else if (variant == ApVariant::ap2d) {
    emu.add(A, B, m);
    const std::size_t carry = R0;
    for (std::size_t w = 0; w < k; ++w) {
      const std::size_t base = w * rows_per_window;
      for (std::size_t t = 1; t < rows_per_window; ++t) emu.vertical_add({{carry, base + t, base}}, {B, wB});
    }
  } else {
    emu.add(A, B, m);
    for (std::size_t stride = 2; stride <= rows_per_window; stride *= 2) {
      std::vector<std::vector<std::size_t>> groups;
      for (std::size_t w = 0; w < k; ++w) {
        for (std::size_t t = 0; t < rows_per_window; t += stride) {
          const std::size_t row = w * rows_per_window + t;
          groups.push_back({R0 + row / 2, row + stride / 2, row});
        }
      }
      emu.vertical_add(groups, {B, wB});
    }
  }

  const auto field = emu.read_field(B + J, m);
  std::vector<std::int64_t> out(k);
  for (std::size_t w = 0; w < k; ++w) out[w] = static_cast<std::int64_t>(field[w * rows_per_window]);
  return finish(emu, std::move(out), OpKind::avg_pool, p, variant);
}

}  // namespace apsim
