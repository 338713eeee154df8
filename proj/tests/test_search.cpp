#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cubeiso/search.hpp"
#include "oracles.hpp"

using namespace cubeiso;

namespace {

const double beta = std::log2(1.5);

// Margin of each objective straight from the definitions; nullopt outside
// the objective's domain.
std::optional<double> oracle_margin(ObjectiveKind kind, double K, const oracle::Labels& l, int n) {
  const auto A = oracle::part(l, oracle::kA), B = oracle::part(l, oracle::kB), W = oracle::part(l, oracle::kW);
  const double N = 1u << n;
  const double a = static_cast<double>(oracle::count(A)), w = static_cast<double>(oracle::count(W));
  const double cross = static_cast<double>(oracle::cross(A, B, n));
  switch (kind) {
    case ObjectiveKind::kMainDeficit: {
      const double t = a / N;
      return oracle::beta_integral(A, n) - 2 * t * (1 - t);
    }
    case ObjectiveKind::kCubeSep:
      if (2 * a != N) return std::nullopt;
      return cross + std::pow(n, beta) * w - N / 2;
    case ObjectiveKind::kConjFixedK:
      if (2 * a != N) return std::nullopt;
      return cross + K * std::sqrt(static_cast<double>(n)) * w - N / 2;
    case ObjectiveKind::kConjMaximal: {
      if (a == 0 || a == N) return std::nullopt;
      const auto ai = static_cast<std::uint64_t>(a);
      return cross / static_cast<double>(oracle::min_edge_boundary(ai, n)) +
             w / static_cast<double>(oracle::min_vertex_boundary(ai, n)) - 1.0;
    }
  }
  return std::nullopt;
}

const ObjectiveKind kAll[] = {ObjectiveKind::kConjFixedK, ObjectiveKind::kConjMaximal, ObjectiveKind::kCubeSep,
                              ObjectiveKind::kMainDeficit};

}  // namespace

TEST(Objective, ParseAndValidate) {
  for (auto k : kAll) EXPECT_EQ(parse_objective(to_string(k)), k);
  EXPECT_THROW(parse_objective("nope"), std::invalid_argument);
  Objective o{ObjectiveKind::kConjFixedK, 0.0, std::nullopt};
  EXPECT_THROW(o.validate(3), std::invalid_argument);
  o = {ObjectiveKind::kCubeSep, 1.0, std::uint64_t{3}};
  EXPECT_THROW(o.validate(3), std::invalid_argument);
  EXPECT_TRUE(Objective{ObjectiveKind::kCubeSep}.proved());
  EXPECT_FALSE(Objective{ObjectiveKind::kConjMaximal}.proved());
}

TEST(Evaluator, MatchesDefinitionsOnQ3) {
  std::mt19937_64 gen(31);
  for (auto kind : kAll) {
    Objective obj{kind, 1.3, std::nullopt};
    Evaluator eval(3, obj);
    int checked = 0;
    for (int t = 0; t < 3000 && checked < 200; ++t) {
      const auto l = oracle::random_labels(3, gen);
      const auto ref = oracle_margin(kind, 1.3, l, 3);
      const auto P = oracle::to_partition(l, 3);
      ASSERT_EQ(eval.admissible(P.A().size()), ref.has_value());
      if (!ref) continue;
      ++checked;
      EXPECT_NEAR(eval(P), *ref, 1e-12);
      EXPECT_NEAR(static_cast<double>(evaluate_ld(obj, P)), *ref, 1e-12);
    }
    EXPECT_GT(checked, 20);
  }
}

TEST(Evaluator, SpecialPartitions) {
  for (int n : {3, 6, 8}) {
    const CubeDim d(n);
    const auto half = subcube_set(Subcube{1, 0}, d);
    const Partition P(half, half.complement());
    EXPECT_NEAR(Evaluator(n, {ObjectiveKind::kCubeSep})(P), 0.0, 1e-12);
    EXPECT_NEAR(Evaluator(n, {ObjectiveKind::kConjFixedK, 1.0})(P), 0.0, 1e-12);
    EXPECT_NEAR(Evaluator(n, {ObjectiveKind::kConjMaximal})(P), 0.0, 1e-12);
    EXPECT_NEAR(conj_maximal_score(P), 1.0, 1e-12);

    // Harper ball: W is its vertex boundary, so the score is exactly 1
    const auto ball = simplicial_prefix(1u + static_cast<std::uint32_t>(n), d);
    const auto W = vertex_boundary(ball);
    const Partition H(ball, (ball | W).complement());
    EXPECT_EQ(cross_boundary_size(H.A(), H.B()), 0u);
    EXPECT_NEAR(conj_maximal_score(H), 1.0, 1e-12);
  }
}

TEST(Evaluator, MiddleLayerFamily) {
  // W = weight floor(n/2), A = heavier side padded to measure 1/2
  const int n = 9;
  const CubeDim d(n);
  VertexSet A(d), B(d);
  std::vector<std::uint32_t> middle;
  for (std::uint32_t x = 0; x < (1u << n); ++x) {
    const int w = std::popcount(x);
    if (w > n / 2) A.insert(Vertex{x});
    else if (w < n / 2) B.insert(Vertex{x});
    else middle.push_back(x);
  }
  for (std::size_t i = 0; A.size() < (1u << (n - 1)); ++i) A.insert(Vertex{middle[i]});
  const Partition P(A, B);
  EXPECT_EQ(cross_boundary_size(A, B), 0u);
  const double m_small = conj_fixedK_margin(P, 0.05);
  EXPECT_NEAR(m_small, 0.05 * 3.0 * 126.0 - 256.0, 1e-9);
  const double m_large = conj_fixedK_margin(P, 5.0);
  EXPECT_LT(m_small, 0.0);
  EXPECT_GT(m_large, 0.0);
  EXPECT_NEAR(Evaluator(n, {ObjectiveKind::kConjFixedK, 0.05})(P), m_small, 1e-9);
}

TEST(Exhaustive, MinimaMatchBruteForce) {
  for (int n = 1; n <= 3; ++n) {
    std::uint64_t total = 1;
    for (std::uint32_t x = 0; x < (1u << n); ++x) total *= 3;
    for (auto kind : kAll) {
      double ref = std::numeric_limits<double>::infinity();
      for (std::uint64_t code = 0; code < total; ++code)
        if (auto m = oracle_margin(kind, 1.0, oracle::labels_from_code(code, n), n)) ref = std::min(ref, *m);
      const auto r = exhaustive_minimum(Objective{kind, 1.0}, n);
      EXPECT_NEAR(r.min_margin, ref, 1e-12) << to_string(kind) << " n=" << n;
    }
  }
}

TEST(Exhaustive, MinFeasibleK) {
  EXPECT_EQ(min_feasible_K(1).K, 1.0);
  for (int n = 2; n <= 3; ++n) {
    std::uint64_t total = 1;
    for (std::uint32_t x = 0; x < (1u << n); ++x) total *= 3;
    double ref = 0.0;
    const double half = 1u << (n - 1);
    for (std::uint64_t code = 0; code < total; ++code) {
      const auto l = oracle::labels_from_code(code, n);
      const auto A = oracle::part(l, oracle::kA), B = oracle::part(l, oracle::kB);
      const double w = static_cast<double>(oracle::count(oracle::part(l, oracle::kW)));
      if (static_cast<double>(oracle::count(A)) != half || w == 0) continue;
      ref = std::max(ref, (half - static_cast<double>(oracle::cross(A, B, n))) / (std::sqrt(n) * w));
    }
    const auto fk = min_feasible_K(n);
    EXPECT_NEAR(fk.K, ref, 1e-12) << "n=" << n;
    ASSERT_TRUE(fk.witness);
    EXPECT_NEAR(conj_fixedK_margin(*fk.witness, fk.K), 0.0, 1e-9);
  }
}

TEST(Anneal, DeterministicForFixedSeed) {
  SearchConfig cfg;
  cfg.n = 5;
  cfg.seed = 7;
  cfg.iterations = 20000;
  cfg.restarts = 3;
  const Objective obj{ObjectiveKind::kConjFixedK, 5.0};
  const auto a = anneal(obj, cfg);
  cfg.threads = 3;
  const auto b = anneal(obj, cfg);
  EXPECT_EQ(a.best_value, b.best_value);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.best, b.best);
  EXPECT_GE(a.best_value, 0.0);
  cfg.seed = 8;
  const auto c = anneal(obj, cfg);
  EXPECT_NE(a.chains.at(0).seed, c.chains.at(0).seed);
}

TEST(Anneal, FindsSubcubeMinimumOfMainDeficit) {
  SearchConfig cfg;
  cfg.n = 4;
  cfg.seed = 1;
  cfg.iterations = 20000;
  cfg.restarts = 4;
  const auto r = anneal(Objective{ObjectiveKind::kMainDeficit}, cfg);
  EXPECT_NEAR(r.best_value, 0.0, 1e-9);
  EXPECT_FALSE(r.negative_verified);
  ASSERT_TRUE(r.best);
  EXPECT_TRUE(r.best->A().empty() || r.best->A().size() == 16 || subcube_codimension(r.best->A()).has_value());
}

TEST(Anneal, RejectsBadConfig) {
  SearchConfig cfg;
  cfg.decay = 1.0;
  EXPECT_THROW(anneal(Objective{}, cfg), std::invalid_argument);
  cfg = {};
  cfg.restarts = 0;
  EXPECT_THROW(anneal(Objective{}, cfg), std::invalid_argument);
}
