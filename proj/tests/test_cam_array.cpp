#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "apsim/cam_array.hpp"
#include "apsim/errors.hpp"

using namespace apsim;

namespace {

CamArray from_rows(const std::vector<std::string>& rows) {
  CamArray a(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) a.set(r, c, rows[r][c] == '1');
  return a;
}

KeyMask hkey(std::size_t cols, std::vector<std::size_t> mask, const std::string& bits) {
  KeyMask km{Orientation::horizontal, BitVector(cols, 0), std::move(mask), {}};
  for (std::size_t c = 0; c < bits.size(); ++c) km.key[c] = bits[c] == '1';
  return km;
}

CamArray random_array(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  CamArray a(rows, cols);
  std::bernoulli_distribution bit(0.5);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) a.set(r, c, bit(rng));
  return a;
}

}  // namespace

TEST(CamCompare, TwoByTwoExample) {
  auto a = from_rows({"10", "01"});
  const auto& tags = a.compare(hkey(2, {0, 1}, "10"));
  EXPECT_EQ(tags, (BitVector{1, 0}));
  EXPECT_EQ(a.h_tags(), (BitVector{1, 0}));
  EXPECT_EQ(a.trace().n_compare, 1U);
  EXPECT_EQ(a.trace().active_cells_compared, 4U);
}

TEST(CamCompare, SingleColumnKeyOneCopiesColumn) {
  std::mt19937_64 rng(7);
  auto a = random_array(rng, 37, 5);
  for (std::size_t c = 0; c < 5; ++c) {
    KeyMask km{Orientation::horizontal, BitVector(5, 0), {c}, {}};
    km.key[c] = 1;
    const auto tags = a.compare(km);
    for (std::size_t r = 0; r < 37; ++r) EXPECT_EQ(tags[r] != 0, a.get(r, c));
  }
}

TEST(CamCompare, VerticalMatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_array(rng, 4, 3);
    KeyMask km{Orientation::vertical, BitVector(4, 0), {}, {}};
    std::bernoulli_distribution bit(0.5);
    for (std::size_t r = 0; r < 4; ++r) {
      km.key[r] = bit(rng);
      if (bit(rng)) km.mask.push_back(r);
    }
    if (km.mask.empty()) km.mask.push_back(0);
    const auto tags = a.compare(km);
    for (std::size_t c = 0; c < 3; ++c) {
      bool match = true;
      for (auto r : km.mask) match = match && (a.get(r, c) == (km.key[r] != 0));
      EXPECT_EQ(tags[c] != 0, match);
    }
  }
}

TEST(CamCompare, CompareLeavesCellsUntouched) {
  std::mt19937_64 rng(3);
  auto a = random_array(rng, 70, 6);
  std::ostringstream before;
  a.dump(before);
  a.compare(hkey(6, {1, 4}, "010010"));
  std::ostringstream after;
  a.dump(after);
  EXPECT_EQ(before.str(), after.str());
}

TEST(CamCompare, LaneWindowRestrictsActiveCells) {
  CamArray a(10, 4);
  auto km = hkey(4, {0}, "0000");
  km.lanes = {2, 3};
  const auto tags = a.compare(km);
  EXPECT_EQ(std::count(tags.begin(), tags.end(), 1), 3);
  EXPECT_EQ(tags[1], 0);
  EXPECT_EQ(a.trace().active_cells_compared, 3U);
}

TEST(CamCompare, Errors) {
  CamArray a(2, 2);
  EXPECT_THROW(a.compare(hkey(2, {}, "00")), UsageError);
  EXPECT_THROW(a.compare(hkey(2, {2}, "00")), DimensionError);
  EXPECT_THROW(a.compare(hkey(3, {0}, "000")), DimensionError);
}

TEST(CamWrite, ZeroTagsLeaveArrayButCountStage) {
  auto a = from_rows({"101", "011"});
  a.selective_write(hkey(3, {0, 1, 2}, "000"), BitVector{0, 0});
  std::ostringstream os;
  a.dump(os);
  EXPECT_EQ(os.str(), "101\n011\n");
  EXPECT_EQ(a.trace().n_write, 1U);
  EXPECT_EQ(a.trace().cells_written, 0U);
}

TEST(CamWrite, ClearColumnTwoInBothRows) {
  auto a = from_rows({"111", "001"});
  a.selective_write(hkey(3, {2}, "000"), BitVector{1, 1});
  EXPECT_FALSE(a.get(0, 2));
  EXPECT_FALSE(a.get(1, 2));
  EXPECT_TRUE(a.get(0, 0));
  EXPECT_EQ(a.trace().cells_written, 2U);
}

TEST(CamWrite, RewritesExactlyMatchingRows) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    auto a = random_array(rng, 130, 5);
    CamArray ref = a;
    const auto tags = a.compare(hkey(5, {0, 3}, "10010"));
    a.selective_write(hkey(5, {1, 4}, "01001"), tags);
    for (std::size_t r = 0; r < 130; ++r) {
      const bool hit = ref.get(r, 0) && ref.get(r, 3);
      for (std::size_t c = 0; c < 5; ++c) {
        bool expect = ref.get(r, c);
        if (hit && c == 1) expect = true;
        if (hit && c == 4) expect = true;
        EXPECT_EQ(a.get(r, c), expect) << "row " << r << " col " << c;
      }
    }
  }
}

TEST(CamWrite, TagLengthMismatch) {
  CamArray a(3, 2);
  EXPECT_THROW(a.selective_write(hkey(2, {0}, "00"), BitVector{1, 1}), DimensionError);
}

TEST(CamRead, BitSequentialReturnsColumn) {
  auto a = from_rows({"1", "0", "1", "1"});
  EXPECT_EQ(a.read_bit_sequential(0), (BitVector{1, 0, 1, 1}));
  EXPECT_EQ(a.trace().n_read, 1U);
  EXPECT_THROW(a.read_bit_sequential(1), DimensionError);
}

TEST(CamRead, ExhaustiveColumnAndRowReadback) {
  std::mt19937_64 rng(5);
  auto a = random_array(rng, 64, 64);
  for (std::size_t c = 0; c < 64; ++c) {
    const auto col = a.read_bit_sequential(c);
    for (std::size_t r = 0; r < 64; ++r) ASSERT_EQ(col[r] != 0, a.get(r, c));
  }
  for (std::size_t r = 0; r < 64; ++r) {
    const auto row = a.read_word_sequential(r);
    for (std::size_t c = 0; c < 64; ++c) ASSERT_EQ(row[c] != 0, a.get(r, c));
  }
  EXPECT_EQ(a.trace().n_read, 128U);
}

TEST(CamRead, WordSequentialExample) {
  auto a = from_rows({"0110"});
  EXPECT_EQ(a.read_word_sequential(0), (BitVector{0, 1, 1, 0}));
}

TEST(CamRead, ReadThenRewriteRoundTrip) {
  std::mt19937_64 rng(9);
  auto a = random_array(rng, 50, 3);
  const auto col = a.read_bit_sequential(0);
  a.write_column(2, col);
  for (std::size_t r = 0; r < 50; ++r) EXPECT_EQ(a.get(r, 0), a.get(r, 2));
}

TEST(CamTransfer, LandsVerbatimAndCountsStages) {
  auto src = from_rows({"101"});
  CamArray dst(2, 3);
  transfer_word(src, 0, dst, 1);
  EXPECT_EQ(dst.read_word_sequential(1), (BitVector{1, 0, 1}));
  EXPECT_EQ(src.trace().n_read, 1U);
  EXPECT_EQ(dst.trace().n_transfer, 1U);
  EXPECT_EQ(dst.trace().bits_transferred, 3U);
}

TEST(CamTransfer, SelfTransferIsIdentity) {
  auto a = from_rows({"1100", "0011"});
  transfer_word(a, 1, a, 1);
  std::ostringstream os;
  a.dump(os);
  EXPECT_EQ(os.str(), "1100\n0011\n");
}

TEST(CamTransfer, ChainCostsOneReadAndWriteEach) {
  CamArray a(8, 4);
  for (std::size_t k = 0; k < 7; ++k) transfer_word(a, k, a, k + 1);
  EXPECT_EQ(a.trace().n_read, 7U);
  EXPECT_EQ(a.trace().n_write, 7U);
  EXPECT_EQ(a.trace().n_transfer, 7U);
  EXPECT_EQ(a.trace().total_stages(), 14U);
}

TEST(CamTransfer, WidthMismatch) {
  CamArray a(1, 3);
  CamArray b(1, 4);
  EXPECT_THROW(transfer_word(a, 0, b, 0), DimensionError);
}

TEST(CamTrace, AdditiveAcrossStages) {
  std::mt19937_64 rng(2);
  auto a = random_array(rng, 20, 4);
  a.compare(hkey(4, {0}, "1000"));
  const EventTrace first = a.trace();
  a.reset_trace();
  a.selective_write(hkey(4, {1}, "0100"), a.h_tags());
  a.read_bit_sequential(3);
  const EventTrace second = a.trace();

  std::mt19937_64 rng2(2);
  auto c = random_array(rng2, 20, 4);
  c.compare(hkey(4, {0}, "1000"));
  c.selective_write(hkey(4, {1}, "0100"), c.h_tags());
  c.read_bit_sequential(3);
  EXPECT_EQ(c.trace(), first + second);
}

TEST(CamTrace, CycleMultiplierStretchesWrites) {
  EventTrace t;
  t.n_compare = 4;
  t.n_write = 3;
  t.n_read = 2;
  EXPECT_EQ(t.cycles(), 9U);
  EXPECT_EQ(t.cycles(2), 12U);
}

TEST(CamVertical, SweepCostsOneStagePerPass) {
  CamArray a(3, 8);
  const std::vector<LutPass> passes{{{1, -1}, {-1, 0}}, {{0, 1}, {1, -1}}};
  const std::vector<std::vector<std::size_t>> groups{{0, 1}, {1, 2}};
  a.vertical_program(passes, groups, {2, 5}, SweepDirection::lsb_first, {});
  EXPECT_EQ(a.trace().n_compare, 2U);
  EXPECT_EQ(a.trace().n_write, 2U);
  EXPECT_EQ(a.trace().active_cells_compared, (1U + 2U) * 5U * 2U);
}

TEST(CamDump, RowsOfBits) {
  auto a = from_rows({"10", "11"});
  std::ostringstream os;
  a.dump(os);
  EXPECT_EQ(os.str(), "10\n11\n");
}
