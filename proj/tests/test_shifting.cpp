#include <gtest/gtest.h>

#include <random>

#include "cubeiso/shifting.hpp"
#include "oracles.hpp"

using namespace cubeiso;

TEST(IShift, SingleSwapInQ1) {
  const CubeDim q1(1);
  const Partition P(VertexSet::of(q1, {0}), VertexSet::of(q1, {1}));
  const auto Q = i_shift(P, 0);
  EXPECT_EQ(Q.A(), VertexSet::of(q1, {1}));
  EXPECT_EQ(Q.B(), VertexSet::of(q1, {0}));
  EXPECT_EQ(shift_potential(P), -1);
  EXPECT_EQ(shift_potential(Q), 1);
}

TEST(IShift, Q2CaseTable) {
  const CubeDim q2(2);
  const Partition P(VertexSet::of(q2, {0}), VertexSet::of(q2, {3}));
  const auto Q = i_shift(P, 0);
  EXPECT_EQ(Q.A(), VertexSet::of(q2, {1}));
  EXPECT_EQ(Q.B(), VertexSet::of(q2, {2}));
  EXPECT_EQ(shift_potential(Partition(VertexSet::full(q2), VertexSet(q2))), 4);
  EXPECT_THROW(i_shift(P, 2), std::out_of_range);
}

TEST(IShift, MatchesOracleOnAllQ3Partitions) {
  for (std::uint64_t code = 0; code < 6561; ++code) {
    const auto l = oracle::labels_from_code(code, 3);
    const auto P = oracle::to_partition(l, 3);
    for (int c = 0; c < 3; ++c) {
      const auto [Q, swaps] = i_shift_counted(P, c);
      const auto ref = oracle::shift(l, 3, c);
      ASSERT_EQ(Q, oracle::to_partition(ref, 3));
      if (swaps) ASSERT_GT(shift_potential(Q), shift_potential(P));
      else ASSERT_EQ(Q, P);
    }
  }
}

TEST(IShift, MatchesOracleAcrossWords) {
  std::mt19937_64 gen(17);
  for (int n : {7, 9}) {
    for (int t = 0; t < 10; ++t) {
      const auto l = oracle::random_labels(n, gen);
      const auto P = oracle::to_partition(l, n);
      for (int c = 0; c < n; ++c) ASSERT_EQ(i_shift(P, c), oracle::to_partition(oracle::shift(l, n, c), n));
    }
  }
}

TEST(Compress, FixedPointAndGuarantees) {
  std::mt19937_64 gen(23);
  for (int t = 0; t < 100; ++t) {
    const int n = 4;
    const auto l = oracle::random_labels(n, gen);
    const auto P = oracle::to_partition(l, n);
    const auto trace = compress(P);
    const auto& Q = trace.final;
    const auto qa = oracle::bits_of(Q.A()), qb = oracle::bits_of(Q.B());
    EXPECT_TRUE(oracle::increasing(qa, n));
    EXPECT_TRUE(oracle::decreasing(qb, n));
    EXPECT_EQ(Q.A().size(), P.A().size());
    EXPECT_EQ(Q.B().size(), P.B().size());
    for (int c = 0; c < n; ++c) {
      EXPECT_EQ(i_shift(Q, c), Q);
      EXPECT_LE(oracle::cross_dir(qa, qb, n, c),
                oracle::cross_dir(oracle::bits_of(P.A()), oracle::bits_of(P.B()), n, c));
    }
    EXPECT_LE(trace.nontrivial_steps(), static_cast<std::uint64_t>(n) << n);
    // the trace ends with a full pass of identity shifts
    ASSERT_GE(trace.steps.size(), static_cast<std::size_t>(n));
    for (std::size_t s = trace.steps.size() - n; s < trace.steps.size(); ++s) EXPECT_EQ(trace.steps[s].swaps, 0u);
  }
}

TEST(Compress, AlreadyCompressedIsUntouched) {
  const CubeDim q3(3);
  const Partition P(VertexSet::of(q3, {7, 3, 5, 6}), VertexSet::of(q3, {0}));
  const auto trace = compress(P);
  EXPECT_EQ(trace.nontrivial_steps(), 0u);
  EXPECT_EQ(trace.final, P);
  const auto one = compress(Partition(VertexSet::of(CubeDim(1), {0}), VertexSet::of(CubeDim(1), {1})));
  EXPECT_EQ(one.nontrivial_steps(), 1u);
  EXPECT_EQ(one.final.A(), VertexSet::of(CubeDim(1), {1}));
}
