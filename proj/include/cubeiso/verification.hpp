#pragma once

// Exhaustive and randomized verification engines.
//
// Set scans walk all 2^{2^n} masks (n <= 4, or n = 5 on request);
// partition scans walk all 3^{2^n} labelings (n <= 3, or n = 4 on request)
// as (A, B) with B a submask of the complement of A. Each chunk keeps its
// local minimum and the masks within tolerance of it; the merge folds chunks
// in index order and re-filters against the global minimum, so reports do
// not depend on the thread count or chunk size.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "cubeiso/cube.hpp"
#include "cubeiso/functionals.hpp"
#include "cubeiso/parallel.hpp"
#include "cubeiso/rng.hpp"

namespace cubeiso {

inline constexpr int kMaxSetScanDim = 4;
inline constexpr int kMaxSetScanDimLarge = 5;
inline constexpr int kMaxPartitionScanDim = 3;
inline constexpr int kMaxPartitionScanDimLarge = 4;
inline constexpr std::uint64_t kDefaultChunk = std::uint64_t{1} << 20;
inline constexpr std::size_t kWitnessCap = 4096;

struct Witness {
  VertexSet A;
  std::optional<VertexSet> B;  // set for partition witnesses
  double margin;

  friend bool operator==(const Witness&, const Witness&) = default;
};

struct ScanReport {
  int n = 0;
  std::string inequality;
  std::uint64_t scanned = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double tolerance = kTolerance;
  std::uint64_t violations = 0;
  std::vector<Witness> witnesses;
  std::map<std::string, double> stats;
  double runtime_ms = 0.0;

  bool passed() const noexcept { return violations == 0; }
};

struct ScanOptions {
  int threads = 1;
  std::uint64_t chunk = kDefaultChunk;
  bool allow_large = false;
};

namespace detail {

struct Candidate {
  word_t a;
  word_t b;
  double margin;
};

struct ChunkResult {
  double min = std::numeric_limits<double>::infinity();
  std::vector<Candidate> near;
  std::uint64_t scanned = 0;
  std::uint64_t violations = 0;

  void offer(word_t a, word_t b, double m, double tol) {
    ++scanned;
    if (m < -tol) ++violations;
    if (m < min - tol) {
      // drop candidates no longer within tolerance of the new minimum
      min = m;
      std::erase_if(near, [&](const Candidate& c) { return c.margin > min + tol; });
    } else {
      min = std::min(min, m);
    }
    if (m <= min + tol && near.size() < 4 * kWitnessCap) near.push_back({a, b, m});
  }
};

struct MergedScan {
  double min = std::numeric_limits<double>::infinity();
  std::vector<Candidate> near;
  std::uint64_t scanned = 0;
  std::uint64_t violations = 0;
};

inline MergedScan merge(std::vector<ChunkResult>& chunks, double tol) {
  MergedScan out;
  for (const auto& c : chunks) {
    out.min = std::min(out.min, c.min);
    out.scanned += c.scanned;
    out.violations += c.violations;
  }
  for (auto& c : chunks)
    for (const auto& cand : c.near)
      if (cand.margin <= out.min + tol) out.near.push_back(cand);
  return out;
}

inline std::vector<Witness> canonical_witnesses(const std::vector<Candidate>& near, int n,
                                                bool partitions) {
  CubeDim dim(n);
  std::vector<Candidate> keyed;
  keyed.reserve(near.size());
  for (const auto& c : near) {
    Candidate k = c;
    if (n <= detail::kCanonicalMaxDim) {
      if (partitions) {
        std::tie(k.a, k.b) = canonical_pair(c.a, c.b, n);
      } else {
        k.a = canonical_mask(c.a, n);
      }
    }
    keyed.push_back(k);
  }
  std::sort(keyed.begin(), keyed.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const Candidate& x, const Candidate& y) { return x.a == y.a && x.b == y.b; }),
              keyed.end());
  if (keyed.size() > kWitnessCap) keyed.resize(kWitnessCap);
  std::vector<Witness> out;
  out.reserve(keyed.size());
  for (const auto& k : keyed) {
    Witness w{VertexSet::from_mask(dim, k.a), std::nullopt, k.margin};
    if (partitions) w.B = VertexSet::from_mask(dim, k.b);
    out.push_back(std::move(w));
  }
  return out;
}

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// margin(mask) over every subset of Q_n (single-word n).
template <class Margin>
detail::MergedScan scan_all_sets(int n, const ScanOptions& opt, double tol, Margin&& margin) {
  const std::uint64_t total = std::uint64_t{1} << (1u << n);
  auto chunks = parallel_chunks<detail::ChunkResult>(
      total, opt.chunk, opt.threads, [&](std::uint64_t begin, std::uint64_t end) {
        detail::ChunkResult r;
        for (std::uint64_t m = begin; m < end; ++m) r.offer(m, 0, margin(static_cast<word_t>(m)), tol);
        return r;
      });
  return detail::merge(chunks, tol);
}

// margin(a, b) -> optional<double> over every partition (A, B, W) of Q_n;
// nullopt excludes the partition from the scan.
template <class Margin>
detail::MergedScan scan_all_partitions(int n, const ScanOptions& opt, double tol, Margin&& margin) {
  const std::uint64_t total = std::uint64_t{1} << (1u << n);
  const word_t full = bits::tail_mask(n);
  const std::uint64_t chunk = std::max<std::uint64_t>(1, opt.chunk >> ((1u << n) / 2));
  auto chunks = parallel_chunks<detail::ChunkResult>(
      total, chunk, opt.threads, [&](std::uint64_t begin, std::uint64_t end) {
        detail::ChunkResult r;
        for (std::uint64_t am = begin; am < end; ++am) {
          const word_t a = static_cast<word_t>(am);
          const word_t rest = full & ~a;
          word_t b = 0;
          do {
            if (auto m = margin(a, b)) r.offer(a, b, *m, tol);
            b = (b - rest) & rest;
          } while (b != 0);
        }
        return r;
      });
  return detail::merge(chunks, tol);
}

// ---------------------------------------------------------------------------
// Set inequalities

enum class SetInequality { kMain, kTalagrand, kGeneric };

inline std::string to_string(SetInequality q) {
  switch (q) {
    case SetInequality::kMain: return "main";
    case SetInequality::kTalagrand: return "talagrand";
    case SetInequality::kGeneric: return "generic";
  }
  return "?";
}

inline void require_set_scan_dim(int n, bool allow_large) {
  const int cap = allow_large ? kMaxSetScanDimLarge : kMaxSetScanDim;
  if (n < 1 || n > cap)
    throw std::invalid_argument("exhaustive set scans need 1 <= n <= " + std::to_string(cap) +
                                (allow_large ? "" : " (n = 5 needs the large-n flag)"));
}

inline ScanReport exhaustive_verify_sets(int n, SetInequality which, const ScanOptions& opt = {},
                                         const FunctionalSpec* spec = nullptr) {
  require_set_scan_dim(n, opt.allow_large);
  detail::Stopwatch clock;

  std::vector<double> table;
  std::function<double(double)> bound;
  switch (which) {
    case SetInequality::kMain:
      table = power_table(n, kBeta);
      bound = main_bound;
      break;
    case SetInequality::kTalagrand:
      table = power_table(n, 0.5);
      bound = talagrand_bound;
      break;
    case SetInequality::kGeneric:
      if (!spec) throw std::invalid_argument("generic scan needs a functional spec");
      if (spec->max_arg() < n) throw std::invalid_argument("functional spec table shorter than n + 1");
      table.assign(spec->f_table().begin(), spec->f_table().begin() + n + 1);
      bound = [spec](double t) { return spec->g(t); };
      break;
  }

  const word_t full = bits::tail_mask(n);
  const double inv = std::ldexp(1.0, -n);
  auto margin = [&](word_t a) {
    std::array<std::uint32_t, 8> hist{};
    bits::degree_histogram_word(a, full & ~a, n, hist);
    const double value = integrate_histogram<std::uint32_t>(std::span(hist).first(static_cast<std::size_t>(n) + 1), table, n);
    return value - bound(static_cast<double>(bits::popcount(a)) * inv);
  };
  auto merged = scan_all_sets(n, opt, kTolerance, margin);

  ScanReport r;
  r.n = n;
  r.inequality = to_string(which);
  r.scanned = merged.scanned;
  r.min_margin = merged.min;
  r.violations = merged.violations;
  r.witnesses = detail::canonical_witnesses(merged.near, n, false);
  r.runtime_ms = clock.elapsed_ms();
  return r;
}

// ---------------------------------------------------------------------------
// Equality census for the main inequality

struct CensusEntry {
  VertexSet set;             // canonical representative
  long double deficit;       // long-double re-evaluation
  std::optional<int> subcube_codim;  // set when the class is a subcube

  std::string label() const {
    if (set.empty()) return "empty";
    if (set.size() == set.dim().vertex_count()) return "full";
    if (subcube_codim) return "subcube-codim-" + std::to_string(*subcube_codim);
    return "other";
  }
};

// Codimension of A if A is a non-empty subcube.
inline std::optional<int> subcube_codimension(const VertexSet& A) {
  if (A.empty()) return std::nullopt;
  std::uint32_t all = ~0u, any = 0;
  A.for_each([&](Vertex v) { all &= v.index; any |= v.index; });
  const std::uint32_t varying = all ^ any;
  const int free_coords = std::popcount(varying);
  if (A.size() != (std::uint64_t{1} << free_coords)) return std::nullopt;
  return A.n() - free_coords;
}

inline std::vector<CensusEntry> equality_census(int n, const ScanOptions& opt = {}) {
  if (n < 1 || n > kMaxSetScanDim) throw std::invalid_argument("equality census needs 1 <= n <= 4");
  const auto table = power_table(n, kBeta);
  const word_t full = bits::tail_mask(n);
  const double inv = std::ldexp(1.0, -n);
  const std::uint64_t total = std::uint64_t{1} << (1u << n);
  auto chunks = parallel_chunks<std::vector<word_t>>(
      total, opt.chunk, opt.threads, [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<word_t> hits;
        for (std::uint64_t m = begin; m < end; ++m) {
          const word_t a = static_cast<word_t>(m);
          std::array<std::uint32_t, 8> hist{};
          bits::degree_histogram_word(a, full & ~a, n, hist);
          const double value = integrate_histogram<std::uint32_t>(std::span(hist).first(static_cast<std::size_t>(n) + 1), table, n);
          const double d = value - main_bound(static_cast<double>(bits::popcount(a)) * inv);
          if (std::abs(d) <= kTolerance) hits.push_back(canonical_mask(a, n));
        }
        return hits;
      });
  std::vector<word_t> all;
  for (auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  CubeDim dim(n);
  std::vector<CensusEntry> out;
  for (word_t m : all) {
    VertexSet s = VertexSet::from_mask(dim, m);
    const long double d = main_deficit_ld(s);
    if (std::abs(d) > static_cast<long double>(kTolerance)) continue;
    out.push_back({s, d, subcube_codimension(s)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Partition inequalities

enum class PartitionInequality { kCorKPi, kCubeSep };

struct PartitionScanParams {
  // cube separation: |nabla(A,B)| + coef |W| >= 2^{n-1} with coef = n^beta,
  // or coef = K sqrt(n) when K is given.
  std::optional<double> K;
};

inline void require_partition_scan_dim(int n, bool allow_large) {
  const int cap = allow_large ? kMaxPartitionScanDimLarge : kMaxPartitionScanDim;
  if (n < 1 || n > cap)
    throw std::invalid_argument("exhaustive partition scans need 1 <= n <= " + std::to_string(cap) +
                                (allow_large ? "" : " (n = 4 needs the large-n flag)"));
}

inline std::uint64_t cross_count_word(word_t a, word_t b, int n) noexcept {
  std::uint64_t t = 0;
  for (int c = 0; c < n; ++c) t += static_cast<std::uint64_t>(bits::popcount(a & bits::flip_word(b, c)));
  return t;
}

inline ScanReport exhaustive_verify_partitions(int n, PartitionInequality which,
                                               const PartitionScanParams& params = {},
                                               const ScanOptions& opt = {}) {
  require_partition_scan_dim(n, opt.allow_large);
  detail::Stopwatch clock;
  const word_t full = bits::tail_mask(n);
  const std::uint64_t N = std::uint64_t{1} << n;
  const double inv = std::ldexp(1.0, -n);
  const auto table = power_table(n, kBeta);
  const double n_beta = std::pow(n, kBeta);

  ScanReport r;
  r.n = n;
  detail::MergedScan merged;
  if (which == PartitionInequality::kCorKPi) {
    r.inequality = "corkpi";
    merged = scan_all_partitions(n, opt, kTolerance, [&](word_t a, word_t b) -> std::optional<double> {
      std::array<std::uint32_t, 8> hist{};
      bits::degree_histogram_word(a, b, n, hist);
      const double lhs = integrate_histogram<std::uint32_t>(std::span(hist).first(static_cast<std::size_t>(n) + 1), table, n);
      const word_t w = full & ~(a | b);
      const double alpha = static_cast<double>(bits::popcount(a | w)) * inv;
      const double rhs = main_bound(alpha) - n_beta * static_cast<double>(bits::popcount(w)) * inv;
      return lhs - rhs;
    });
  } else {
    const double coef = params.K ? *params.K * std::sqrt(static_cast<double>(n)) : n_beta;
    r.inequality = params.K ? "cubesep-K" : "cubesep";
    if (params.K) r.stats["K"] = *params.K;
    r.stats["coefficient"] = coef;
    const double target = static_cast<double>(N / 2);
    merged = scan_all_partitions(n, opt, kTolerance, [&](word_t a, word_t b) -> std::optional<double> {
      if (static_cast<std::uint64_t>(bits::popcount(a)) != N / 2) return std::nullopt;
      const word_t w = full & ~(a | b);
      return static_cast<double>(cross_count_word(a, b, n)) + coef * bits::popcount(w) - target;
    });
  }
  r.scanned = merged.scanned;
  r.min_margin = merged.min;
  r.violations = merged.violations;
  r.witnesses = detail::canonical_witnesses(merged.near, n, true);
  r.runtime_ms = clock.elapsed_ms();
  return r;
}

// ---------------------------------------------------------------------------
// Correlation of increasing sets under a product measure

inline bool is_increasing_word(word_t a, int n) noexcept {
  for (int c = 0; c < n; ++c)
    if (a & bits::kLowHalf[static_cast<std::size_t>(c)] & ~bits::flip_word(a, c)) return false;
  return true;
}

inline std::vector<word_t> increasing_sets(int n) {
  if (n < 1 || n > kMaxSetScanDim) throw std::invalid_argument("increasing-set enumeration needs 1 <= n <= 4");
  std::vector<word_t> out;
  const std::uint64_t total = std::uint64_t{1} << (1u << n);
  for (std::uint64_t m = 0; m < total; ++m)
    if (is_increasing_word(m, n)) out.push_back(m);
  return out;
}

// nu(x) = prod_c p_c^{x_c} (1 - p_c)^{1 - x_c}
inline std::vector<double> product_measure(std::span<const double> p) {
  const int n = static_cast<int>(p.size());
  for (double q : p)
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("product measure biases must lie in (0, 1)");
  std::vector<double> nu(std::size_t{1} << n);
  for (std::uint32_t x = 0; x < nu.size(); ++x) {
    double w = 1.0;
    for (int c = 0; c < n; ++c) w *= ((x >> c) & 1u) ? p[static_cast<std::size_t>(c)] : 1.0 - p[static_cast<std::size_t>(c)];
    nu[x] = w;
  }
  return nu;
}

inline constexpr double kHarrisTolerance = 1e-12;

inline ScanReport verify_harris(int n, std::span<const double> p) {
  if (static_cast<int>(p.size()) != n) throw std::invalid_argument("bias vector length must equal n");
  detail::Stopwatch clock;
  const auto nu = product_measure(p);
  const auto sets = increasing_sets(n);
  auto measure_of = [&](word_t m) {
    double s = 0.0;
    while (m) {
      s += nu[static_cast<std::size_t>(std::countr_zero(m))];
      m &= m - 1;
    }
    return s;
  };
  std::vector<double> mass(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) mass[i] = measure_of(sets[i]);

  ScanReport r;
  r.n = n;
  r.inequality = "harris";
  r.tolerance = kHarrisTolerance;
  detail::ChunkResult acc;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = 0; j < sets.size(); ++j)
      acc.offer(sets[i], sets[j], measure_of(sets[i] & sets[j]) - mass[i] * mass[j], kHarrisTolerance);
  r.scanned = acc.scanned;
  r.min_margin = acc.min;
  r.violations = acc.violations;
  r.stats["increasing_sets"] = static_cast<double>(sets.size());
  r.runtime_ms = clock.elapsed_ms();
  return r;
}

// ---------------------------------------------------------------------------
// Numeric checks of the analytic lemmas

// (x^{1/beta} + 1)^beta
inline double plus1_p(double x) { return std::pow(std::pow(x, 1.0 / kBeta) + 1.0, kBeta); }

inline constexpr double kConvexityTolerance = 1e-12;
inline constexpr int kPlus1Dim = 4;
inline constexpr int kPlus1MaxValue = 10;

struct Plus1Instance {
  double lhs;  // mean of (f + 1)^beta over X
  double rhs;  // (T + 1)^beta
};

// Mean of f^beta over X defines T^beta; returns both sides of the +1 bound.
inline Plus1Instance plus1_instance(std::span<const int> f_on_x) {
  if (f_on_x.empty()) throw std::invalid_argument("plus1 lemma needs a non-empty X");
  double mb = 0.0, mp = 0.0;
  for (int v : f_on_x) {
    mb += v == 0 ? 0.0 : std::pow(v, kBeta);
    mp += std::pow(v + 1, kBeta);
  }
  const double size = static_cast<double>(f_on_x.size());
  mb /= size;
  mp /= size;
  const double T = std::pow(mb, 1.0 / kBeta);
  return {mp, std::pow(T + 1.0, kBeta)};
}

inline ScanReport verify_plus1_lemma(std::uint64_t trials, std::uint64_t seed, int grid_points = 10000) {
  detail::Stopwatch clock;
  ScanReport r;
  r.n = kPlus1Dim;
  r.inequality = "plus1";
  Rng rng(seed);
  const std::uint64_t N = std::uint64_t{1} << kPlus1Dim;
  std::vector<int> f;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const word_t x = 1 + rng.below((std::uint64_t{1} << N) - 1);
    f.clear();
    for (std::uint64_t v = 0; v < N; ++v)
      if ((x >> v) & 1u) f.push_back(static_cast<int>(rng.below(kPlus1MaxValue + 1)));
    const auto inst = plus1_instance(f);
    const double m = inst.lhs - inst.rhs;
    ++r.scanned;
    if (m < -kTolerance) ++r.violations;
    r.min_margin = std::min(r.min_margin, m);
  }

  // second differences of p on a uniform grid over [0, 100]
  const double h = 100.0 / (grid_points - 1);
  double min_d2 = std::numeric_limits<double>::infinity();
  std::uint64_t convexity_failures = 0;
  for (int i = 1; i + 1 < grid_points; ++i) {
    const double x = i * h;
    const double d2 = plus1_p(x - h) - 2.0 * plus1_p(x) + plus1_p(x + h);
    if (d2 < -kConvexityTolerance) ++convexity_failures;
    min_d2 = std::min(min_d2, d2);
  }
  r.violations += convexity_failures;
  r.stats["seed"] = static_cast<double>(seed);
  r.stats["trials"] = static_cast<double>(trials);
  r.stats["convexity_points"] = grid_points;
  r.stats["convexity_min_second_difference"] = min_d2;
  r.stats["convexity_failures"] = static_cast<double>(convexity_failures);
  r.runtime_ms = clock.elapsed_ms();
  return r;
}

// g(x, y) = ((2x(1-x))^{1/beta} + (x-y)^{1/beta})^beta - 2(x + y^2) + (x + y)^2
inline double gpos_g(double x, double y) {
  const double b = 2.0 * x * (1.0 - x);
  const double a = std::max(0.0, x - y);
  return std::pow(std::pow(b, 1.0 / kBeta) + std::pow(a, 1.0 / kBeta), kBeta) - 2.0 * (x + y * y) +
         (x + y) * (x + y);
}

// Grid over {0 <= x <= 1, max(0, x(2x-1)) <= y <= x}: `points` values of x
// and, per x, `points` evenly spaced values of y.
inline ScanReport verify_gpos(int points = 1000, const ScanOptions& opt = {}) {
  if (points < 2) throw std::invalid_argument("gpos grid needs at least 2 points per axis");
  detail::Stopwatch clock;
  struct Row {
    double min_g = std::numeric_limits<double>::infinity();
    double diag_err = 0.0;
    double lower_err = 0.0;
    std::uint64_t below = 0;
  };
  const double step = 1.0 / (points - 1);
  auto rows = parallel_chunks<Row>(static_cast<std::uint64_t>(points), 16, opt.threads,
                                   [&](std::uint64_t begin, std::uint64_t end) {
    Row r;
    for (std::uint64_t i = begin; i < end; ++i) {
      const double x = static_cast<double>(i) * step;
      const double lo = std::max(0.0, x * (2.0 * x - 1.0));
      for (int j = 0; j < points; ++j) {
        const double y = lo + (x - lo) * (static_cast<double>(j) / (points - 1));
        const double g = gpos_g(x, y);
        if (g < -kTolerance) ++r.below;
        r.min_g = std::min(r.min_g, g);
      }
      r.diag_err = std::max(r.diag_err, std::abs(gpos_g(x, x)));
      const double t = 2.0 * x - 1.0;
      r.lower_err = std::max(r.lower_err, std::abs(gpos_g(x, x * t) - x * (1.0 - x) * t * t));
    }
    return r;
  });
  ScanReport r;
  r.inequality = "gpos";
  double diag = 0.0, lower = 0.0;
  for (const auto& row : rows) {
    r.min_margin = std::min(r.min_margin, row.min_g);
    r.violations += row.below;
    diag = std::max(diag, row.diag_err);
    lower = std::max(lower, row.lower_err);
  }
  r.scanned = static_cast<std::uint64_t>(points) * static_cast<std::uint64_t>(points);
  if (diag > kTolerance) ++r.violations;
  if (lower > kTolerance) ++r.violations;
  r.stats["grid_points_per_axis"] = points;
  r.stats["diagonal_identity_max_error"] = diag;
  r.stats["lower_edge_identity_max_error"] = lower;
  r.runtime_ms = clock.elapsed_ms();
  return r;
}

}  // namespace cubeiso
