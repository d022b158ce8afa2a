#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "apsim/event_trace.hpp"

namespace apsim {

/// One bit per element, values restricted to {0,1}.
using BitVector = std::vector<std::uint8_t>;

enum class Orientation { horizontal, vertical };

/// Half-open window [first, first + count) along one array dimension.
struct Window {
  std::size_t first = 0;
  std::size_t count = 0;
};

/// Key and mask registers for one search or write.
///
/// Horizontal: `key` is indexed by column and `mask` lists columns; the search
/// runs over every row in `lanes` (all rows when lanes.count == 0) and results
/// land in the horizontal (per-row) tag register. Vertical is the transpose:
/// `key` is indexed by row, `mask` lists rows, `lanes` selects columns, and
/// tags are per column. Lanes outside the window are deactivated: they are
/// never tagged and never counted as active cells.
struct KeyMask {
  Orientation orientation = Orientation::horizontal;
  BitVector key;
  std::vector<std::size_t> mask;
  Window lanes;
};

/// One LUT pass over a small group of "roles" (columns or rows). A value of
/// -1 in `match` means the role is not searched; -1 in `write` means it is not
/// written. Both vectors have one entry per role.
struct LutPass {
  std::vector<std::int8_t> match;
  std::vector<std::int8_t> write;

  friend bool operator==(const LutPass&, const LutPass&) = default;
};

enum class SweepDirection { lsb_first, msb_first };

/// Rectangular CAM with horizontal and vertical search, masked selective
/// writes, single-buffered tag registers in both orientations, and an
/// EventTrace accumulator.
///
/// Cells are stored column-major as packed 64-bit row masks, which makes the
/// word-parallel (horizontal) passes a handful of word operations per column.
/// Not thread-safe: one writer per array.
class CamArray {
 public:
  CamArray(std::size_t rows, std::size_t cols);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

  // Direct cell access for setup and inspection; never traced.
  [[nodiscard]] bool get(std::size_t row, std::size_t col) const;
  void set(std::size_t row, std::size_t col, bool value);

  /// Search stage. Returns (and stores) the tag vector of the orientation.
  const BitVector& compare(const KeyMask& km);

  /// Write stage: masked positions of every tagged lane take the key bits.
  void selective_write(const KeyMask& km, const BitVector& tags);

  /// Bit-sequential read: the column lands in the horizontal tags.
  BitVector read_bit_sequential(std::size_t col);

  /// Word-sequential read of a full row, or of `cols` within it.
  BitVector read_word_sequential(std::size_t row);
  BitVector read_word_sequential(std::size_t row, Window cols);

  /// Bit-sequential write mode: one whole column in a single write stage.
  void write_column(std::size_t col, std::span<const std::uint8_t> bits);

  /// Word-sequential write mode: `bits` into row `row` starting at `first_col`.
  void write_word(std::size_t row, std::size_t first_col, std::span<const std::uint8_t> bits);

  /// Vertical LUT program applied between row groups, one column at a time.
  ///
  /// Each group lists the rows playing each role of `passes`. Columns in `cols`
  /// are visited in `dir` order; after all passes run on a column the rows in
  /// `chained_roles` hand their state to the next column (carry or flag chain)
  /// and are cleared in the current one. The whole sweep is one row-pair
  /// operation: every pass costs one compare stage and one write stage no
  /// matter how many columns or groups take part, and active cells are
  /// |searched roles| x columns x groups per pass.
  void vertical_program(std::span<const LutPass> passes,
                        std::span<const std::vector<std::size_t>> groups, Window cols,
                        SweepDirection dir, std::span<const std::size_t> chained_roles);

  [[nodiscard]] const BitVector& h_tags() const noexcept { return h_tags_; }
  [[nodiscard]] const BitVector& v_tags() const noexcept { return v_tags_; }

  [[nodiscard]] const EventTrace& trace() const noexcept { return trace_; }
  void reset_trace() noexcept { trace_ = {}; }

  /// Rows of '0'/'1', one row per line.
  void dump(std::ostream& os) const;

  friend void transfer_word(CamArray& src, std::size_t src_row, CamArray& dst,
                            std::size_t dst_row);
  friend void transfer_word(CamArray& src, std::size_t src_row, Window src_cols, CamArray& dst,
                            std::size_t dst_row, std::size_t dst_first_col);

 private:
  [[nodiscard]] std::uint64_t* column(std::size_t c) noexcept { return &bits_[c * words_]; }
  [[nodiscard]] const std::uint64_t* column(std::size_t c) const noexcept {
    return &bits_[c * words_];
  }
  [[nodiscard]] Window resolve_lanes(const KeyMask& km) const;
  void validate(const KeyMask& km, bool need_mask) const;
  void check_row(std::size_t row) const;
  void check_col(std::size_t col) const;

  std::size_t rows_;
  std::size_t cols_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
  BitVector h_tags_;
  BitVector v_tags_;
  EventTrace trace_;
};

/// Word transfer between two arrays (or within one): one read plus one write.
void transfer_word(CamArray& src, std::size_t src_row, CamArray& dst, std::size_t dst_row);
void transfer_word(CamArray& src, std::size_t src_row, Window src_cols, CamArray& dst,
                   std::size_t dst_row, std::size_t dst_first_col);

}  // namespace apsim
