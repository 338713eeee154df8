#include <gtest/gtest.h>

#include <cmath>

#include "cubeiso/verification.hpp"
#include "oracles.hpp"

using namespace cubeiso;

TEST(SetScan, MainMinimumMatchesOracle) {
  for (int n = 1; n <= 3; ++n) {
    double ref = 1e9;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << (1u << n)); ++m) {
      const auto b = oracle::from_mask(m, n);
      const double mu = static_cast<double>(oracle::count(b)) / (1u << n);
      ref = std::min(ref, oracle::beta_integral(b, n) - 2 * mu * (1 - mu));
    }
    const auto r = exhaustive_verify_sets(n, SetInequality::kMain);
    EXPECT_NEAR(r.min_margin, ref, 1e-12);
    EXPECT_EQ(r.scanned, std::uint64_t{1} << (1u << n));
    EXPECT_TRUE(r.passed());
    EXPECT_FALSE(r.witnesses.empty());
  }
}

TEST(SetScan, TalagrandAndGeneric) {
  const auto t = exhaustive_verify_sets(4, SetInequality::kTalagrand);
  EXPECT_TRUE(t.passed());
  EXPECT_GE(t.min_margin, -1e-9);
  const auto spec = FunctionalSpec::beta_power(4, 2);
  const auto g = exhaustive_verify_sets(3, SetInequality::kGeneric, {}, &spec);
  EXPECT_EQ(g.scanned, 256u);
  EXPECT_THROW(exhaustive_verify_sets(3, SetInequality::kGeneric), std::invalid_argument);
}

TEST(SetScan, DimensionCaps) {
  EXPECT_THROW(exhaustive_verify_sets(5, SetInequality::kMain), std::invalid_argument);
  EXPECT_THROW(exhaustive_verify_sets(9, SetInequality::kMain), std::invalid_argument);
  EXPECT_THROW(exhaustive_verify_sets(0, SetInequality::kMain), std::invalid_argument);
  EXPECT_THROW(exhaustive_verify_partitions(4, PartitionInequality::kCorKPi), std::invalid_argument);
}

TEST(SetScan, DeterministicAcrossThreadsAndChunks) {
  const auto a = exhaustive_verify_sets(4, SetInequality::kMain, ScanOptions{1, kDefaultChunk, false});
  const auto b = exhaustive_verify_sets(4, SetInequality::kMain, ScanOptions{4, 1000, false});
  EXPECT_EQ(a.min_margin, b.min_margin);
  EXPECT_EQ(a.witnesses, b.witnesses);
  const auto c = exhaustive_verify_partitions(3, PartitionInequality::kCorKPi, {}, ScanOptions{1, kDefaultChunk, false});
  const auto d = exhaustive_verify_partitions(3, PartitionInequality::kCorKPi, {}, ScanOptions{3, 7, false});
  EXPECT_EQ(c.min_margin, d.min_margin);
  EXPECT_EQ(c.witnesses, d.witnesses);
  EXPECT_EQ(c.scanned, d.scanned);
}

TEST(Census, ClassesMatchOracle) {
  for (int n = 1; n <= 3; ++n) {
    // classes of exact equality, found by brute force with orbit minima
    std::vector<std::uint64_t> ref;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << (1u << n)); ++m) {
      const auto b = oracle::from_mask(m, n);
      const double mu = static_cast<double>(oracle::count(b)) / (1u << n);
      if (std::abs(oracle::beta_integral(b, n) - 2 * mu * (1 - mu)) <= 1e-9) ref.push_back(oracle::canonical(m, n));
    }
    std::sort(ref.begin(), ref.end());
    ref.erase(std::unique(ref.begin(), ref.end()), ref.end());
    const auto census = equality_census(n);
    ASSERT_EQ(census.size(), ref.size()) << "n=" << n;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_EQ(census[i].set.mask(), ref[i]);
      EXPECT_EQ(census[i].subcube_codim.has_value() || census[i].set.empty(),
                oracle::is_subcube(oracle::from_mask(ref[i], n), n) || ref[i] == 0);
    }
  }
  const auto two = equality_census(2);
  std::vector<std::string> labels;
  for (const auto& e : two) labels.push_back(e.label());
  std::sort(labels.begin(), labels.end());
  EXPECT_EQ(labels, (std::vector<std::string>{"empty", "full", "subcube-codim-1", "subcube-codim-2"}));
  const auto one = equality_census(1);
  ASSERT_EQ(one.size(), 3u);
}

TEST(PartitionScan, CorKPiAndCubeSep) {
  const auto c = exhaustive_verify_partitions(3, PartitionInequality::kCorKPi);
  EXPECT_EQ(c.scanned, 6561u);
  EXPECT_TRUE(c.passed());
  EXPECT_GE(c.min_margin, -1e-9);

  // n = 2, W empty, mu(A) = 1/2: min |grad(A,B)| is 2
  std::uint64_t best = 99;
  for (std::uint64_t m = 0; m < 16; ++m) {
    if (std::popcount(m) != 2) continue;
    const auto a = oracle::from_mask(m, 2);
    best = std::min(best, oracle::edge_boundary(a, 2));
  }
  EXPECT_EQ(best, 2u);

  const auto s = exhaustive_verify_partitions(3, PartitionInequality::kCubeSep);
  EXPECT_TRUE(s.passed());
  EXPECT_NEAR(s.min_margin, 0.0, 1e-9);  // attained by the half cube
  // every scanned partition has |A| = 4: C(8,4) * 2^4
  EXPECT_EQ(s.scanned, 70u * 16u);
}

TEST(Harris, MatchesOracleOnIncreasingPairs) {
  const int n = 3;
  std::vector<std::uint64_t> inc;
  for (std::uint64_t m = 0; m < 256; ++m)
    if (oracle::increasing(oracle::from_mask(m, n), n)) inc.push_back(m);
  EXPECT_EQ(inc.size(), 20u);
  EXPECT_EQ(increasing_sets(n).size(), 20u);
  const std::vector<double> p{0.3, 0.6, 0.3};
  double ref = 1e9;
  for (auto a : inc)
    for (auto b : inc) {
      const auto A = oracle::from_mask(a, n), B = oracle::from_mask(b, n);
      oracle::Bits AB(A.size());
      for (std::size_t x = 0; x < A.size(); ++x) AB[x] = A[x] && B[x];
      ref = std::min(ref, oracle::product_measure(AB, p) - oracle::product_measure(A, p) * oracle::product_measure(B, p));
    }
  const auto r = verify_harris(n, p);
  EXPECT_EQ(r.scanned, 400u);
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(r.min_margin, ref, 1e-15);
  const std::vector<double> bad{0.0, 0.5, 0.5};
  EXPECT_THROW(verify_harris(n, bad), std::invalid_argument);
  const std::vector<double> short_p{0.5};
  EXPECT_THROW(verify_harris(n, short_p), std::invalid_argument);
}

TEST(Plus1, ConstantsAndSamples) {
  const double beta = std::log2(1.5);
  for (int c : {0, 1, 4, 10}) {
    const std::vector<int> f(5, c);
    const auto inst = plus1_instance(f);
    EXPECT_NEAR(inst.lhs, std::pow(c + 1.0, beta), 1e-12);
    EXPECT_NEAR(inst.rhs, std::pow(c + 1.0, beta), 1e-12);
  }
  const auto r = verify_plus1_lemma(2000, 42, 2000);
  EXPECT_TRUE(r.passed());
  EXPECT_GE(r.min_margin, -1e-9);
  EXPECT_GE(r.stats.at("convexity_min_second_difference"), -1e-12);
  const auto again = verify_plus1_lemma(2000, 42, 2000);
  EXPECT_EQ(r.min_margin, again.min_margin);
}

TEST(GPos, IdentitiesAndGrid) {
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    EXPECT_NEAR(gpos_g(x, x), 0.0, 1e-12);
    if (x >= 0.5) {
      EXPECT_NEAR(gpos_g(x, x * (2 * x - 1)), x * (1 - x) * (2 * x - 1) * (2 * x - 1), 1e-9);
    }
  }
  const auto r = verify_gpos(200);
  EXPECT_TRUE(r.passed());
  EXPECT_GE(r.min_margin, -1e-9);
  EXPECT_EQ(r.scanned, 200u * 200u);
  EXPECT_THROW(verify_gpos(1), std::invalid_argument);
}
