#include "apsim/cam_array.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <string>

#include "apsim/errors.hpp"

namespace apsim {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t words_for(std::size_t n) { return (n + kWordBits - 1) / kWordBits; }

// Packed lane mask covering rows [first, first + count).
std::vector<std::uint64_t> lane_mask(std::size_t words, Window w) {
  std::vector<std::uint64_t> m(words, 0);
  for (std::size_t r = w.first; r < w.first + w.count; ++r) {
    m[r / kWordBits] |= std::uint64_t{1} << (r % kWordBits);
  }
  return m;
}

std::vector<std::uint64_t> pack(const BitVector& v, std::size_t words) {
  std::vector<std::uint64_t> out(words, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0) out[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
  }
  return out;
}

std::string where(std::size_t value, std::size_t bound) {
  return std::to_string(value) + " (limit " + std::to_string(bound) + ")";
}

}  // namespace

CamArray::CamArray(std::size_t rows, std::size_t cols)
    : rows_(rows),
      cols_(cols),
      words_(words_for(rows)),
      bits_(words_ * cols, 0),
      h_tags_(rows, 0),
      v_tags_(cols, 0) {}

void CamArray::check_row(std::size_t row) const {
  if (row >= rows_) throw DimensionError("row index out of range: " + where(row, rows_));
}

void CamArray::check_col(std::size_t col) const {
  if (col >= cols_) throw DimensionError("column index out of range: " + where(col, cols_));
}

bool CamArray::get(std::size_t row, std::size_t col) const {
  check_row(row);
  check_col(col);
  return ((column(col)[row / kWordBits] >> (row % kWordBits)) & 1U) != 0;
}

void CamArray::set(std::size_t row, std::size_t col, bool value) {
  check_row(row);
  check_col(col);
  auto& w = column(col)[row / kWordBits];
  const auto bit = std::uint64_t{1} << (row % kWordBits);
  w = value ? (w | bit) : (w & ~bit);
}

Window CamArray::resolve_lanes(const KeyMask& km) const {
  const std::size_t extent = km.orientation == Orientation::horizontal ? rows_ : cols_;
  if (km.lanes.count == 0) return {0, extent};
  if (km.lanes.first + km.lanes.count > extent) {
    throw DimensionError("lane window exceeds array: " +
                         where(km.lanes.first + km.lanes.count, extent));
  }
  return km.lanes;
}

void CamArray::validate(const KeyMask& km, bool need_mask) const {
  const bool horiz = km.orientation == Orientation::horizontal;
  const std::size_t key_len = horiz ? cols_ : rows_;
  if (need_mask && km.mask.empty()) throw UsageError("compare requires a non-empty mask");
  if (km.key.size() != key_len) {
    throw DimensionError("key length " + std::to_string(km.key.size()) + " does not match " +
                         std::to_string(key_len));
  }
  for (auto m : km.mask) {
    if (m >= key_len) throw DimensionError("mask position out of range: " + where(m, key_len));
  }
}

const BitVector& CamArray::compare(const KeyMask& km) {
  validate(km, true);
  const Window lanes = resolve_lanes(km);
  if (km.orientation == Orientation::horizontal) {
    auto acc = lane_mask(words_, lanes);
    for (auto c : km.mask) {
      const auto* col = column(c);
      if (km.key[c] != 0) {
        for (std::size_t w = 0; w < words_; ++w) acc[w] &= col[w];
      } else {
        for (std::size_t w = 0; w < words_; ++w) acc[w] &= ~col[w];
      }
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      h_tags_[r] = static_cast<std::uint8_t>((acc[r / kWordBits] >> (r % kWordBits)) & 1U);
    }
    ++trace_.n_compare;
    trace_.active_cells_compared += km.mask.size() * lanes.count;
    return h_tags_;
  }
  std::fill(v_tags_.begin(), v_tags_.end(), 0);
  for (std::size_t c = lanes.first; c < lanes.first + lanes.count; ++c) {
    bool match = true;
    for (auto r : km.mask) {
      if (get(r, c) != (km.key[r] != 0)) {
        match = false;
        break;
      }
    }
    v_tags_[c] = match ? 1 : 0;
  }
  ++trace_.n_compare;
  trace_.active_cells_compared += km.mask.size() * lanes.count;
  return v_tags_;
}

void CamArray::selective_write(const KeyMask& km, const BitVector& tags) {
  validate(km, false);
  const bool horiz = km.orientation == Orientation::horizontal;
  const std::size_t tag_len = horiz ? rows_ : cols_;
  if (tags.size() != tag_len) {
    throw DimensionError("tag vector length " + std::to_string(tags.size()) +
                         " does not match " + std::to_string(tag_len));
  }
  const auto tagged = static_cast<std::size_t>(std::count_if(
      tags.begin(), tags.end(), [](std::uint8_t t) { return t != 0; }));
  if (horiz) {
    const auto packed = pack(tags, words_);
    for (auto c : km.mask) {
      auto* col = column(c);
      for (std::size_t w = 0; w < words_; ++w) {
        col[w] = (col[w] & ~packed[w]) | (km.key[c] != 0 ? packed[w] : 0);
      }
    }
  } else {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (tags[c] == 0) continue;
      for (auto r : km.mask) set(r, c, km.key[r] != 0);
    }
  }
  ++trace_.n_write;
  trace_.cells_written += km.mask.size() * tagged;
}

BitVector CamArray::read_bit_sequential(std::size_t col) {
  check_col(col);
  // A search with only `col` unmasked and key bit 1 tags exactly the rows
  // holding a one, so the tag register ends up as a copy of the column.
  const auto* bits = column(col);
  for (std::size_t r = 0; r < rows_; ++r) {
    h_tags_[r] = static_cast<std::uint8_t>((bits[r / kWordBits] >> (r % kWordBits)) & 1U);
  }
  ++trace_.n_read;
  trace_.cells_read += rows_;
  return h_tags_;
}

BitVector CamArray::read_word_sequential(std::size_t row) {
  return read_word_sequential(row, {0, cols_});
}

BitVector CamArray::read_word_sequential(std::size_t row, Window cols) {
  check_row(row);
  if (cols.first + cols.count > cols_) {
    throw DimensionError("word window exceeds array: " + where(cols.first + cols.count, cols_));
  }
  std::fill(v_tags_.begin(), v_tags_.end(), 0);
  BitVector out(cols.count, 0);
  for (std::size_t i = 0; i < cols.count; ++i) {
    out[i] = get(row, cols.first + i) ? 1 : 0;
    v_tags_[cols.first + i] = out[i];
  }
  ++trace_.n_read;
  trace_.cells_read += cols.count;
  return out;
}

void CamArray::write_column(std::size_t col, std::span<const std::uint8_t> bits) {
  check_col(col);
  if (bits.size() != rows_) {
    throw DimensionError("column write length " + std::to_string(bits.size()) +
                         " does not match rows " + std::to_string(rows_));
  }
  auto* dst = column(col);
  std::fill(dst, dst + words_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (bits[r] != 0) dst[r / kWordBits] |= std::uint64_t{1} << (r % kWordBits);
  }
  ++trace_.n_write;
  trace_.cells_written += rows_;
}

void CamArray::write_word(std::size_t row, std::size_t first_col,
                          std::span<const std::uint8_t> bits) {
  check_row(row);
  if (first_col + bits.size() > cols_) {
    throw DimensionError("word write exceeds array: " + where(first_col + bits.size(), cols_));
  }
  for (std::size_t i = 0; i < bits.size(); ++i) set(row, first_col + i, bits[i] != 0);
  ++trace_.n_write;
  trace_.cells_written += bits.size();
}

void CamArray::vertical_program(std::span<const LutPass> passes,
                                std::span<const std::vector<std::size_t>> groups, Window cols,
                                SweepDirection dir, std::span<const std::size_t> chained_roles) {
  if (passes.empty()) throw UsageError("vertical program has no passes");
  const std::size_t roles = passes.front().match.size();
  for (const auto& p : passes) {
    if (p.match.size() != roles || p.write.size() != roles) {
      throw UsageError("LUT passes disagree on role count");
    }
  }
  for (const auto& g : groups) {
    if (g.size() != roles) throw DimensionError("row group does not match LUT role count");
    for (auto r : g) check_row(r);
  }
  for (auto role : chained_roles) {
    if (role >= roles) throw UsageError("chained role out of range");
  }
  if (cols.first + cols.count > cols_) {
    throw DimensionError("column window exceeds array: " + where(cols.first + cols.count, cols_));
  }

  for (const auto& p : passes) {
    const auto searched = static_cast<std::size_t>(
        std::count_if(p.match.begin(), p.match.end(), [](std::int8_t v) { return v >= 0; }));
    ++trace_.n_compare;
    ++trace_.n_write;
    trace_.active_cells_compared += searched * cols.count * groups.size();
  }

  for (std::size_t step = 0; step < cols.count; ++step) {
    const std::size_t c = dir == SweepDirection::lsb_first ? cols.first + step
                                                           : cols.first + cols.count - 1 - step;
    for (const auto& p : passes) {
      for (const auto& g : groups) {
        bool match = true;
        for (std::size_t k = 0; k < roles && match; ++k) {
          if (p.match[k] >= 0 && get(g[k], c) != (p.match[k] != 0)) match = false;
        }
        if (!match) continue;
        for (std::size_t k = 0; k < roles; ++k) {
          if (p.write[k] < 0) continue;
          set(g[k], c, p.write[k] != 0);
          ++trace_.cells_written;
        }
      }
    }
    if (step + 1 == cols.count) break;
    const std::size_t next = dir == SweepDirection::lsb_first ? c + 1 : c - 1;
    for (const auto& g : groups) {
      for (auto role : chained_roles) {
        const std::size_t r = g[role];
        if (get(r, c)) {
          set(r, next, true);
          set(r, c, false);
        }
      }
    }
  }
}

void CamArray::dump(std::ostream& os) const {
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) os << (get(r, c) ? '1' : '0');
    os << '\n';
  }
}

void transfer_word(CamArray& src, std::size_t src_row, CamArray& dst, std::size_t dst_row) {
  if (src.cols() != dst.cols()) {
    throw DimensionError("transfer width mismatch: " + std::to_string(src.cols()) + " vs " +
                         std::to_string(dst.cols()));
  }
  transfer_word(src, src_row, {0, src.cols()}, dst, dst_row, 0);
}

void transfer_word(CamArray& src, std::size_t src_row, Window src_cols, CamArray& dst,
                   std::size_t dst_row, std::size_t dst_first_col) {
  if (dst_first_col + src_cols.count > dst.cols()) {
    throw DimensionError("transfer does not fit destination row");
  }
  const BitVector word = src.read_word_sequential(src_row, src_cols);
  dst.write_word(dst_row, dst_first_col, word);
  ++dst.trace_.n_transfer;
  dst.trace_.bits_transferred += word.size();
}

}  // namespace apsim
