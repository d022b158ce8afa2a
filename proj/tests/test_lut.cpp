#include <gtest/gtest.h>

#include "apsim/errors.hpp"
#include "apsim/lut.hpp"

using namespace apsim;

namespace {

const LutRow& row_of(const std::vector<LutRow>& table, const std::string& before) {
  for (const auto& r : table)
    if (r.before == before) return r;
  throw std::runtime_error("missing row " + before);
}

}  // namespace

TEST(Lut, AddIsAFullAdder) {
  // Roles C, A, B: after the passes B holds the sum bit and C the carry.
  for (const auto& r : truth_table(add_lut())) {
    const int c = r.before[0] - '0';
    const int a = r.before[1] - '0';
    const int b = r.before[2] - '0';
    const int total = a + b + c;
    EXPECT_EQ(r.after[2] - '0', total & 1) << r.before;
    EXPECT_EQ(r.after[0] - '0', total >> 1) << r.before;
    EXPECT_EQ(r.after[1], r.before[1]) << "A must stay intact";
  }
  EXPECT_EQ(add_lut().passes.size(), 4U);
}

TEST(Lut, GuardedAddOnlyActsWhenGuardIsSet) {
  for (const auto& r : truth_table(guarded_add_lut())) {
    const int guard = r.before[0] - '0';
    const int c = r.before[1] - '0';
    const int a = r.before[2] - '0';
    const int p = r.before[3] - '0';
    if (guard == 0) {
      EXPECT_EQ(r.after, r.before);
      continue;
    }
    const int total = a + p + c;
    EXPECT_EQ(r.after[3] - '0', total & 1);
    EXPECT_EQ(r.after[1] - '0', total >> 1);
  }
}

TEST(Lut, ReluTable) {
  const auto t = truth_table(relu_lut());
  EXPECT_EQ(row_of(t, "11").after, "01");
  EXPECT_EQ(row_of(t, "11").pass, "1st");
  EXPECT_EQ(row_of(t, "10").after, "10");
  EXPECT_EQ(row_of(t, "01").pass, "NC");
  EXPECT_EQ(row_of(t, "00").pass, "NC");
}

TEST(Lut, MaxPoolingTable) {
  // Rows of the published max-pooling LUT: (A, B, F1, F2) before and after.
  const auto t = truth_table(max_lut());
  EXPECT_EQ(row_of(t, "1000").after, "1101");
  EXPECT_EQ(row_of(t, "1000").pass, "1st");
  EXPECT_EQ(row_of(t, "0100").after, "0111");
  EXPECT_EQ(row_of(t, "0100").pass, "2nd");
  EXPECT_EQ(row_of(t, "1001").after, "1101");
  EXPECT_EQ(row_of(t, "1001").pass, "3rd");
  EXPECT_EQ(row_of(t, "0101").after, "0001");
  EXPECT_EQ(row_of(t, "0101").pass, "4th");
  for (const char* unchanged : {"0000", "1100", "0011", "1111", "0111", "1011"}) {
    EXPECT_EQ(row_of(t, unchanged).pass, "NC") << unchanged;
  }
}

TEST(Lut, MaxOfTwoWordsMsbFirst) {
  // Drive the max LUT bit by bit over all 4-bit word pairs.
  const auto& lut = max_lut();
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      int f1 = 0, f2 = 0, out = b;
      for (int bit = 3; bit >= 0; --bit) {
        int st[4] = {(a >> bit) & 1, (out >> bit) & 1, f1, f2};
        for (const auto& p : lut.passes) {
          bool hit = true;
          for (int k = 0; k < 4; ++k)
            if (p.match[k] >= 0 && p.match[k] != st[k]) hit = false;
          if (!hit) continue;
          for (int k = 0; k < 4; ++k)
            if (p.write[k] >= 0) st[k] = p.write[k];
        }
        out = (out & ~(1 << bit)) | (st[1] << bit);
        f1 = st[2];
        f2 = st[3];
      }
      EXPECT_EQ(out, std::max(a, b)) << a << "," << b;
    }
  }
}

TEST(Lut, TextRoundTrip) {
  for (const auto* p : {&add_lut(), &guarded_add_lut(), &relu_lut(), &max_lut()}) {
    EXPECT_EQ(parse_lut(to_text(*p)), *p);
  }
  EXPECT_EQ(to_text(relu_lut()), "lut relu\nroles A F\npass 11 0x\n");
}

TEST(Lut, ParseErrors) {
  EXPECT_THROW(parse_lut("roles A B\npass 11 00\n"), ConfigError);
  EXPECT_THROW(parse_lut("lut x\nroles A B\npass 111 000\n"), ConfigError);
  EXPECT_THROW(parse_lut("lut x\nroles A\nbogus\n"), ConfigError);
  EXPECT_THROW(parse_lut("lut x\nroles A\npass 1\n"), ConfigError);
}
