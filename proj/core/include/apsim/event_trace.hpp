#pragma once

#include <cstdint>
#include <ostream>

namespace apsim {

/// Stage and activity counters produced by functional emulation or by the
/// closed-form cycle model. A transfer bumps n_transfer and also one read and
/// one write, so total_stages() never double counts it.
struct EventTrace {
  std::uint64_t n_compare = 0;
  std::uint64_t n_write = 0;
  std::uint64_t n_read = 0;
  std::uint64_t n_transfer = 0;
  std::uint64_t active_cells_compared = 0;
  std::uint64_t cells_written = 0;
  std::uint64_t cells_read = 0;
  std::uint64_t bits_transferred = 0;

  [[nodiscard]] std::uint64_t total_stages() const noexcept {
    return n_compare + n_write + n_read;
  }

  /// Cycle count with write stages stretched by `write_multiplier`.
  [[nodiscard]] std::uint64_t cycles(std::uint64_t write_multiplier = 1) const noexcept {
    return n_compare + n_write * write_multiplier + n_read;
  }

  EventTrace& operator+=(const EventTrace& o) noexcept {
    n_compare += o.n_compare;
    n_write += o.n_write;
    n_read += o.n_read;
    n_transfer += o.n_transfer;
    active_cells_compared += o.active_cells_compared;
    cells_written += o.cells_written;
    cells_read += o.cells_read;
    bits_transferred += o.bits_transferred;
    return *this;
  }

  friend EventTrace operator+(EventTrace a, const EventTrace& b) noexcept { return a += b; }
  friend bool operator==(const EventTrace&, const EventTrace&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const EventTrace& t) {
  return os << "{compare=" << t.n_compare << " write=" << t.n_write << " read=" << t.n_read
            << " transfer=" << t.n_transfer << " cmp_cells=" << t.active_cells_compared
            << " wr_cells=" << t.cells_written << " rd_cells=" << t.cells_read
            << " bits_xfer=" << t.bits_transferred << "}";
}

}  // namespace apsim
