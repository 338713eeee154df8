#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cubeiso/stability.hpp"
#include "oracles.hpp"

using namespace cubeiso;

namespace {

Partition with_complement(const VertexSet& A) { return Partition(A, A.complement()); }

const StabilityOptions kAnyEps{std::numeric_limits<double>::infinity()};

}  // namespace

TEST(Hypotheses, EqualityCasesHoldAtZero) {
  for (int n : {3, 8}) {
    const CubeDim d(n);
    const auto half = with_complement(subcube_set(Subcube{1, 0}, d));
    EXPECT_TRUE(check_hypotheses(half, 1, 0.0).holds());
    EXPECT_EQ(min_epsilon(half, 1), 0.0);
    const auto quarter = with_complement(subcube_set(Subcube{3, 0}, d));
    EXPECT_EQ(cross_boundary_size(quarter.A(), quarter.B()), 2u * (1u << (n - 2)));
    EXPECT_TRUE(check_hypotheses(quarter, 2, 0.0).holds());
    EXPECT_THROW(check_hypotheses(half, 0, 0.1), std::invalid_argument);
    EXPECT_THROW(check_hypotheses(half, n + 1, 0.1), std::invalid_argument);
  }
}

TEST(Hypotheses, MiddleLayerViolatesWBound) {
  const int n = 9;
  const CubeDim d(n);
  VertexSet A(d), B(d);
  for (std::uint32_t x = 0; x < (1u << n); ++x) {
    const int w = std::popcount(x);
    if (w >= 5) A.insert(Vertex{x});
    else if (w <= 3) B.insert(Vertex{x});
  }
  const Partition P(A, B);
  EXPECT_EQ(measure(A).value(), 0.5);
  EXPECT_NEAR(measure(P.W()).value(), 126.0 / 512.0, 1e-15);
  const auto m = check_hypotheses(P, 1, 0.01);
  EXPECT_FALSE(m.holds());
  EXPECT_LT(m.w, 0.0);
  EXPECT_THROW(recover_subcube(P, 1), HypothesisFailure);
}

TEST(Directions, CodimOneAndTwo) {
  for (int n : {2, 5, 8}) {
    const CubeDim d(n);
    const auto r = find_direction_set(with_complement(subcube_set(Subcube{1, 1}, d)), 1);
    ASSERT_EQ(r.I, std::vector<int>{0});
    EXPECT_EQ(r.per_i.at(0).boundary, std::uint64_t{1} << (n - 1));
    EXPECT_EQ(r.per_i.at(0).defect, 0.0);
    const auto r2 = find_direction_set(with_complement(subcube_set(Subcube{3, 0}, d)), 2);
    EXPECT_EQ(r2.I, (std::vector<int>{0, 1}));
  }
}

TEST(Subcube, ExactRecoveryAllSubcubesQ5) {
  const int n = 5;
  const CubeDim d(n);
  for (int k = 1; k <= 2; ++k)
    for (std::uint32_t fixed : detail::k_subsets(n, k))
      for (const auto& C : subcubes_on(fixed)) {
        const auto r = recover_subcube(with_complement(subcube_set(C, d)), k);
        ASSERT_TRUE(r.cube);
        EXPECT_EQ(r.cube->fixed, C.fixed);
        EXPECT_EQ(r.cube->z, C.z);
        EXPECT_EQ(r.symdiff, 0.0);
        EXPECT_EQ(r.min_epsilon, 0.0);
        EXPECT_EQ(r.exception_mass, 0.0);
        EXPECT_EQ(r.cross_ratio, 1.0);
      }
}

TEST(Subcube, Codim2MinusOneVertex) {
  for (int n : {4, 7, 10}) {
    const CubeDim d(n);
    const Subcube C{0b110, 0b010};
    const auto cube = subcube_set(C, d);
    VertexSet A = cube;
    A.erase(Vertex{0b010});
    const Partition P(A, cube.complement());
    const auto r = recover_subcube(P, 2, kAnyEps);
    ASSERT_TRUE(r.cube);
    EXPECT_EQ(r.cube->fixed, C.fixed);
    EXPECT_EQ(r.cube->z, C.z);
    EXPECT_EQ(r.symdiff, std::ldexp(1.0, -n));
    EXPECT_EQ(r.I, (std::vector<int>{1, 2}));
  }
}

TEST(Subcube, AmbiguousAndFailing) {
  const int n = 6;
  const CubeDim d(n);
  VertexSet A(d);
  for (std::uint32_t x = 0; x < (1u << n); ++x)
    if (((x ^ (x >> 1)) & 1u) == 0) A.insert(Vertex{x});
  const auto P = with_complement(A);
  EXPECT_THROW(recover_subcube(P, 1), HypothesisFailure);
  try {
    recover_subcube(P, 1, kAnyEps);
    FAIL() << "expected ambiguity";
  } catch (const AmbiguousSubcube& e) {
    EXPECT_EQ(e.deltas.size(), 2u);
    for (double v : e.deltas) EXPECT_EQ(v, 0.5);
  }
}

TEST(Generic, MatchesSpecialisedPipeline) {
  for (int k = 1; k <= 2; ++k) {
    const int n = 7;
    const CubeDim d(n);
    VertexSet A = subcube_set(Subcube{k == 1 ? 4u : 12u, 0}, d);
    A.erase(Vertex{0});
    const auto P = Partition(A, subcube_set(Subcube{k == 1 ? 4u : 12u, 0}, d).complement());
    const auto spec = FunctionalSpec::beta_power(n, k);
    const auto g = stability_generic(P, spec, k, kAnyEps);
    const auto r = recover_subcube(P, k, kAnyEps);
    EXPECT_EQ(g.I, r.I);
    EXPECT_EQ(g.cube->z, r.cube->z);
    EXPECT_EQ(g.symdiff, r.symdiff);
    EXPECT_EQ(g.deltas, r.deltas);
    EXPECT_THROW(stability_generic(P, spec, 3 - k, kAnyEps), std::invalid_argument);
  }
}

TEST(Histogram, MassAtK) {
  for (int n : {4, 9}) {
    const CubeDim d(n);
    const auto h1 = h_ab_histogram(with_complement(subcube_set(Subcube{1, 0}, d)));
    ASSERT_EQ(h1.size(), 1u);
    EXPECT_EQ(h1.at(1), 0.5);
    const auto h2 = h_ab_histogram(with_complement(subcube_set(Subcube{5, 1}, d)));
    ASSERT_EQ(h2.size(), 1u);
    EXPECT_EQ(h2.at(2), 0.25);
  }
}

TEST(Concentration, ExactAndMovedVertex) {
  const CubeDim q4(4);
  const auto V0 = subcube_set(Subcube{1, 0}, q4);
  const auto exact = cube_from_boundary_concentration(V0, 1, 0.0);
  EXPECT_EQ(exact.cube.z, 0u);
  EXPECT_EQ(exact.symdiff, 0.0);
  EXPECT_EQ(exact.residual, 0u);

  VertexSet moved = V0;
  moved.erase(Vertex{0b0110});
  moved.insert(Vertex{0b0111});
  const auto r = cube_from_boundary_concentration(moved, 1, 1.0);
  EXPECT_EQ(r.cube.z, 0u);
  EXPECT_EQ(r.symdiff, 2.0 / 16.0);
  EXPECT_EQ(r.residual, 6u);
  EXPECT_EQ(r.counts, (std::vector<std::uint64_t>{7, 1}));
  EXPECT_THROW(cube_from_boundary_concentration(moved, 1, 0.1), HypothesisFailure);
  EXPECT_THROW(cube_from_boundary_concentration(moved, 0, 1.0), std::invalid_argument);
}
