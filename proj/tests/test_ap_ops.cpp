#include <gtest/gtest.h>

#include <random>

#include "apsim/ap_ops.hpp"
#include "apsim/errors.hpp"
#include "oracles.hpp"

using namespace apsim;

namespace {

constexpr ApVariant kVariants[] = {ApVariant::ap1d, ApVariant::ap2d, ApVariant::ap2d_seg};

IntMatrix matrix(std::size_t r, std::size_t c, const oracle::Vec& data) {
  IntMatrix m(r, c);
  m.data = data;
  return m;
}

// Everything in the emulated trace except written cells is fully determined
// by the schedule, so it must equal the closed-form trace exactly.
void expect_trace_matches(const OpResult& r, OpKind op, const OpParams& p, ApVariant v) {
  const EventTrace a = analytic_trace(op, p, v);
  const EventTrace& e = r.trace;
  EXPECT_EQ(e.total_stages(), r.analytic_cycles);
  EXPECT_EQ(e.n_compare, a.n_compare);
  EXPECT_EQ(e.n_write, a.n_write);
  EXPECT_EQ(e.n_read, a.n_read);
  EXPECT_EQ(e.n_transfer, a.n_transfer);
  EXPECT_EQ(e.active_cells_compared, a.active_cells_compared);
  EXPECT_EQ(e.cells_read, a.cells_read);
  EXPECT_EQ(e.bits_transferred, a.bits_transferred);
  const OpGeometry g = op_geometry(op, p, v);
  EXPECT_EQ(r.geometry.rows, g.rows);
  EXPECT_EQ(r.geometry.cols, g.cols);
}

}  // namespace

TEST(ApAdd, Examples) {
  for (auto v : kVariants) {
    for (std::int64_t x : {0, 1, 77, 255}) {
      EXPECT_EQ(inplace_add({0}, {x}, 8, v).values, (oracle::Vec{x}));
    }
    EXPECT_EQ(inplace_add({255}, {255}, 8, v).values, (oracle::Vec{510}));
    EXPECT_EQ(inplace_add({3}, {4}, 8, v).analytic_cycles, 89U);
  }
}

TEST(ApAdd, RandomAgainstOracleAndTrace) {
  std::mt19937_64 rng(1);
  for (auto v : kVariants) {
    for (unsigned m = 1; m <= 8; ++m) {
      for (std::size_t n : {1U, 2U, 4U, 8U, 67U}) {
        const auto a = oracle::random_unsigned(rng, n, m);
        const auto b = oracle::random_unsigned(rng, n, m);
        const auto r = inplace_add(a, b, m, v);
        EXPECT_EQ(r.values, oracle::add(a, b));
        expect_trace_matches(r, OpKind::addition, {.m = m, .l = 2 * n}, v);
      }
    }
  }
}

TEST(ApAdd, Validation) {
  EXPECT_THROW(inplace_add({16}, {0}, 4, ApVariant::ap1d), ValidationError);
  EXPECT_THROW(inplace_add({-1}, {0}, 4, ApVariant::ap1d), ValidationError);
  EXPECT_THROW(inplace_add({1, 2}, {0}, 4, ApVariant::ap1d), DimensionError);
}

TEST(ApAdd, WrittenCellsNearExpectation) {
  std::mt19937_64 rng(4);
  const auto a = oracle::random_unsigned(rng, 4096, 8);
  const auto b = oracle::random_unsigned(rng, 4096, 8);
  const auto r = inplace_add(a, b, 8, ApVariant::ap2d);
  const auto expected = analytic_trace(OpKind::addition, {.m = 8, .l = 8192}, ApVariant::ap2d);
  EXPECT_NEAR(static_cast<double>(r.trace.cells_written),
              static_cast<double>(expected.cells_written), 0.05 * expected.cells_written);
}

TEST(ApMultiply, Examples) {
  for (auto v : kVariants) {
    EXPECT_EQ(multiply({5, 9, 15}, {0, 0, 0}, 4, v).values, (oracle::Vec{0, 0, 0}));
    EXPECT_EQ(multiply({15}, {15}, 4, v).values, (oracle::Vec{225}));
    EXPECT_EQ(multiply({1}, {1}, 4, v).analytic_cycles, 144U);
  }
}

TEST(ApMultiply, RandomAgainstOracleAndTrace) {
  std::mt19937_64 rng(2);
  for (auto v : kVariants) {
    for (unsigned m = 1; m <= 8; ++m) {
      for (std::size_t n : {1U, 3U, 8U, 70U}) {
        const auto a = oracle::random_unsigned(rng, n, m);
        const auto b = oracle::random_unsigned(rng, n, m);
        const auto r = multiply(a, b, m, v);
        EXPECT_EQ(r.values, oracle::mul(a, b));
        expect_trace_matches(r, OpKind::multiplication, {.m = m, .l = 2 * n}, v);
      }
    }
  }
}

TEST(ApMultiply, WrittenCellsNearExpectation) {
  std::mt19937_64 rng(8);
  const auto a = oracle::random_unsigned(rng, 4096, 6);
  const auto b = oracle::random_unsigned(rng, 4096, 6);
  const auto r = multiply(a, b, 6, ApVariant::ap1d);
  const auto expected = analytic_trace(OpKind::multiplication, {.m = 6, .l = 8192}, ApVariant::ap1d);
  // Partial products are not uniform bits, so the estimate is loose.
  EXPECT_NEAR(static_cast<double>(r.trace.cells_written),
              static_cast<double>(expected.cells_written), 0.25 * expected.cells_written);
}

TEST(ApReduce, Examples) {
  for (auto v : kVariants) {
    const auto single = reduce({5}, 4, v);
    EXPECT_EQ(single.values, (oracle::Vec{5}));
    EXPECT_EQ(single.trace.total_stages(), 2U * 4 + 1);
    EXPECT_EQ(reduce({15, 15, 15, 15, 15, 15, 15, 15}, 4, v).values, (oracle::Vec{120}));
  }
  EXPECT_EQ(reduce({1, 2, 3, 4, 5, 6, 7, 8}, 4, ApVariant::ap2d).analytic_cycles, 65U);
}

TEST(ApReduce, RandomAgainstOracleAndTrace) {
  std::mt19937_64 rng(3);
  for (auto v : kVariants) {
    for (unsigned m = 1; m <= 8; ++m) {
      for (std::size_t l : {1U, 2U, 3U, 4U, 5U, 8U, 16U, 33U}) {
        const auto a = oracle::random_unsigned(rng, l, m);
        const auto r = reduce(a, m, v);
        EXPECT_EQ(r.values, (oracle::Vec{oracle::sum(a)})) << to_string(v) << " m=" << m << " l=" << l;
        expect_trace_matches(r, OpKind::reduction, {.m = m, .l = l}, v);
      }
    }
  }
}

TEST(ApReduce, EachTreeLevelAddsOneBit) {
  // All-ones inputs saturate the result width M + log2(L).
  for (auto v : kVariants) {
    for (unsigned m = 1; m <= 6; ++m) {
      for (std::size_t l : {2U, 4U, 8U, 16U}) {
        const std::int64_t top = (std::int64_t{1} << m) - 1;
        const auto r = reduce(oracle::Vec(l, top), m, v);
        EXPECT_EQ(r.values[0], top * static_cast<std::int64_t>(l));
        EXPECT_LT(r.values[0], std::int64_t{1} << (m + ceil_log2(l)));
      }
    }
  }
}

TEST(ApMatmat, IdentityKernel) {
  const auto id = matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  const auto p = matrix(3, 2, {5, 6, 7, 1, 0, 3});
  for (auto v : kVariants) EXPECT_EQ(matmat(id, p, 3, v).values, p.data);
}

TEST(ApMatmat, ConvolutionViaIm2col) {
  // 2x2x2 input, two 2x2x2 filters, stride 1, no padding: one output pixel per
  // filter. Kernel rows unroll each filter, the single input patch is 8x1.
  const int input[2][2][2] = {{{1, 2}, {3, 0}}, {{2, 1}, {0, 3}}};     // [c][h][w]
  const int filt[2][2][2][2] = {{{{1, 0}, {2, 1}}, {{0, 1}, {1, 2}}},  // [k][c][h][w]
                                {{{3, 1}, {0, 0}}, {{1, 1}, {2, 0}}}};
  IntMatrix kmat(2, 8);
  IntMatrix patch(8, 1);
  oracle::Vec direct(2, 0);
  for (int k = 0; k < 2; ++k) {
    int col = 0;
    for (int c = 0; c < 2; ++c)
      for (int h = 0; h < 2; ++h)
        for (int w = 0; w < 2; ++w, ++col) {
          kmat.at(k, col) = filt[k][c][h][w];
          patch.at(col, 0) = input[c][h][w];
          direct[k] += filt[k][c][h][w] * input[c][h][w];
        }
  }
  for (auto v : kVariants) EXPECT_EQ(matmat(kmat, patch, 2, v).values, direct);
}

TEST(ApMatmat, RandomAgainstOracleAndTrace) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  for (auto v : kVariants) {
    for (int trial = 0; trial < 120; ++trial) {
      const std::size_t i = dim(rng), j = dim(rng), u = dim(rng);
      const unsigned m = 1 + trial % 4;
      const auto k = oracle::random_unsigned(rng, i * j, m);
      const auto p = oracle::random_unsigned(rng, j * u, m);
      const auto r = matmat(matrix(i, j, k), matrix(j, u, p), m, v);
      ASSERT_EQ(r.values, oracle::gemm(k, p, i, j, u)) << i << "x" << j << "x" << u;
      expect_trace_matches(r, OpKind::matmat, {.m = m, .i = i, .j = j, .u = u}, v);
    }
  }
}

TEST(ApMatmat, ResultWidth) {
  // Worst case sums fill exactly 2M + log2(j) bits.
  for (auto v : kVariants) {
    const unsigned m = 3;
    const std::size_t j = 8;
    const auto k = matrix(1, j, oracle::Vec(j, 7));
    const auto p = matrix(j, 1, oracle::Vec(j, 7));
    const auto r = matmat(k, p, m, v);
    EXPECT_EQ(r.values[0], 392);
    EXPECT_LT(r.values[0], 1 << (2 * m + 3));
  }
}

TEST(ApMatmat, DimensionMismatch) {
  EXPECT_THROW(matmat(IntMatrix(2, 3), IntMatrix(2, 2), 4, ApVariant::ap2d), DimensionError);
}

TEST(ApRelu, Examples) {
  for (auto v : kVariants) {
    EXPECT_EQ(relu({-3, 0, 7}, 4, v).values, (oracle::Vec{0, 0, 7}));
    EXPECT_EQ(relu({-8, -1, 1}, 4, v).values, (oracle::Vec{0, 0, 1}));
  }
  EXPECT_EQ(relu({1}, 8, ApVariant::ap1d).analytic_cycles, 33U);
  EXPECT_THROW(relu({8}, 4, ApVariant::ap1d), ValidationError);
}

TEST(ApRelu, RandomAgainstOracleAndTrace) {
  std::mt19937_64 rng(6);
  for (auto v : kVariants) {
    for (unsigned m = 1; m <= 8; ++m) {
      for (std::size_t n : {1U, 5U, 64U, 100U}) {
        const auto x = oracle::random_signed(rng, n, m);
        const auto r = relu(x, m, v);
        EXPECT_EQ(r.values, oracle::relu(x));
        expect_trace_matches(r, OpKind::relu, {.m = m, .l = n}, v);
      }
    }
  }
}

TEST(ApMaxPool, Examples) {
  for (auto v : kVariants) {
    EXPECT_EQ(max_pool({1, 7, 3, 5, 2, 2, 9, 0}, 4, 2, 4, v).values, (oracle::Vec{7, 9}));
    EXPECT_EQ(max_pool(oracle::Vec(8, 6), 8, 1, 4, v).values, (oracle::Vec{6}));
  }
  EXPECT_EQ(max_pool(oracle::Vec(16, 1), 4, 4, 8, ApVariant::ap2d_seg).analytic_cycles, 106U);
}

TEST(ApMaxPool, RandomAgainstOracleAndTrace) {
  std::mt19937_64 rng(7);
  for (auto v : kVariants) {
    for (unsigned m = 1; m <= 8; ++m) {
      for (std::uint64_t s : {2U, 4U, 8U, 16U}) {
        for (std::uint64_t k : {1U, 3U, 4U}) {
          const auto x = oracle::random_unsigned(rng, s * k, m);
          const auto r = max_pool(x, s, k, m, v);
          EXPECT_EQ(r.values, oracle::window_max(x, s)) << to_string(v) << " s=" << s << " k=" << k;
          expect_trace_matches(r, OpKind::max_pool, {.m = m, .s = s, .k = k}, v);
        }
      }
    }
  }
}

TEST(ApMaxPool, ShapeErrors) {
  EXPECT_THROW(max_pool({1, 2, 3}, 4, 1, 4, ApVariant::ap1d), ShapeError);
  EXPECT_THROW(max_pool({1, 2, 3, 4, 5, 6}, 3, 2, 4, ApVariant::ap1d), ShapeError);
}

TEST(ApAvgPool, Examples) {
  for (auto v : kVariants) {
    EXPECT_EQ(avg_pool({1, 2, 3, 6}, 4, 1, 4, v).values, (oracle::Vec{3}));
    EXPECT_EQ(avg_pool(oracle::Vec(8, 13), 4, 2, 4, v).values, (oracle::Vec{13, 13}));
  }
  EXPECT_EQ(avg_pool(oracle::Vec(16, 1), 4, 4, 8, ApVariant::ap2d).analytic_cycles, 120U);
}

TEST(ApAvgPool, RandomAgainstOracleAndTrace) {
  std::mt19937_64 rng(8);
  for (auto v : kVariants) {
    for (unsigned m = 1; m <= 8; ++m) {
      for (std::uint64_t s : {2U, 4U, 8U, 16U}) {
        for (std::uint64_t k : {1U, 3U, 4U}) {
          const auto x = oracle::random_unsigned(rng, s * k, m);
          const auto r = avg_pool(x, s, k, m, v);
          EXPECT_EQ(r.values, oracle::window_floor_mean(x, s)) << to_string(v) << " s=" << s;
          expect_trace_matches(r, OpKind::avg_pool, {.m = m, .s = s, .k = k}, v);
        }
      }
    }
  }
}
