#pragma once

// Margins of the cube-separation statements, their exhaustive minima at
// small n, and seeded simulated annealing over partitions.
//
// Every objective is a margin to MINIMISE; a negative value on a proved
// statement is a bug, on a conjecture a potential counterexample.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cubeiso/cube.hpp"
#include "cubeiso/functionals.hpp"
#include "cubeiso/parallel.hpp"
#include "cubeiso/rng.hpp"
#include "cubeiso/verification.hpp"

namespace cubeiso {

enum class ObjectiveKind { kConjFixedK, kConjMaximal, kCubeSep, kMainDeficit };

inline std::string to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::kConjFixedK: return "conj-fixedK";
    case ObjectiveKind::kConjMaximal: return "conj-maximal";
    case ObjectiveKind::kCubeSep: return "cubesep";
    case ObjectiveKind::kMainDeficit: return "main-deficit";
  }
  return "?";
}

inline ObjectiveKind parse_objective(const std::string& s) {
  for (auto k : {ObjectiveKind::kConjFixedK, ObjectiveKind::kConjMaximal, ObjectiveKind::kCubeSep,
                 ObjectiveKind::kMainDeficit})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown objective '" + s + "'");
}

struct Objective {
  Objective() = default;
  Objective(ObjectiveKind k, double k_const = 1.0, std::optional<std::uint64_t> size = std::nullopt)
      : kind(k), K(k_const), exact_size(size) {}

  ObjectiveKind kind = ObjectiveKind::kMainDeficit;
  double K = 1.0;                         // conj-fixedK only
  std::optional<std::uint64_t> exact_size;  // required |A|

  // Proved statements must never go negative.
  bool proved() const noexcept {
    return kind == ObjectiveKind::kCubeSep || kind == ObjectiveKind::kMainDeficit;
  }

  // |A| that the objective pins, if any.
  std::optional<std::uint64_t> required_size(int n) const {
    if (kind == ObjectiveKind::kConjFixedK || kind == ObjectiveKind::kCubeSep)
      return std::uint64_t{1} << (n - 1);
    return exact_size;
  }

  void validate(int n) const {
    if (kind == ObjectiveKind::kConjFixedK && !(K > 0.0)) throw std::invalid_argument("K must be positive");
    const std::uint64_t N = std::uint64_t{1} << n;
    if (exact_size && *exact_size > N) throw std::invalid_argument("required |A| exceeds 2^n");
    if ((kind == ObjectiveKind::kConjFixedK || kind == ObjectiveKind::kCubeSep) && exact_size &&
        *exact_size != N / 2)
      throw std::invalid_argument("this objective fixes |A| = 2^{n-1}");
    if (kind == ObjectiveKind::kConjMaximal && exact_size && (*exact_size == 0 || *exact_size == N))
      throw std::invalid_argument("conj-maximal needs 0 < |A| < 2^n");
  }
};

// ---------------------------------------------------------------------------
// Direct margins on Partition values

// |nabla(A,B)| + K sqrt(n) |W| - 2^{n-1}, defined for mu(A) = 1/2.
inline double conj_fixedK_margin(const Partition& P, double K) {
  const std::uint64_t N = P.dim().vertex_count();
  if (P.A().size() * 2 != N) throw std::invalid_argument("conj_fixedK_margin needs mu(A) = 1/2");
  return static_cast<double>(cross_boundary_size(P.A(), P.B())) +
         K * std::sqrt(static_cast<double>(P.n())) * static_cast<double>(P.W().size()) -
         static_cast<double>(N / 2);
}

// |nabla(A,B)| + n^beta |W| - 2^{n-1}, defined for mu(A) = 1/2.
inline double cubesep_margin(const Partition& P) {
  const std::uint64_t N = P.dim().vertex_count();
  if (P.A().size() * 2 != N) throw std::invalid_argument("cubesep_margin needs mu(A) = 1/2");
  return static_cast<double>(cross_boundary_size(P.A(), P.B())) +
         std::pow(P.n(), kBeta) * static_cast<double>(P.W().size()) - static_cast<double>(N / 2);
}

// |nabla(A,B)| / nabla(a) + |W| / partial(a), a = |A| in (0, 2^n).
inline double conj_maximal_score(const Partition& P) {
  const std::uint64_t a = P.A().size();
  if (a == 0 || a == P.dim().vertex_count())
    throw std::invalid_argument("conj_maximal_score needs 0 < |A| < 2^n");
  return static_cast<double>(cross_boundary_size(P.A(), P.B())) / static_cast<double>(nabla_min(a, P.dim())) +
         static_cast<double>(P.W().size()) / static_cast<double>(partial_min(a, P.dim()));
}

// ---------------------------------------------------------------------------
// Fast evaluator over raw masks

class Evaluator {
 public:
  Evaluator(int n, Objective obj) : n_(n), obj_(obj), profiles_(CubeDim(n)) {
    obj_.validate(n);
    beta_table_ = power_table(n, kBeta);
    w_coef_ = obj.kind == ObjectiveKind::kConjFixedK ? obj.K * std::sqrt(static_cast<double>(n))
                                                     : std::pow(n, kBeta);
    words_ = bits::word_count(n);
    counters_.resize(words_);
  }

  int n() const noexcept { return n_; }
  const Objective& objective() const noexcept { return obj_; }

  // False when |A| is outside the objective's domain.
  bool admissible(std::uint64_t a_size) const noexcept {
    const std::uint64_t N = std::uint64_t{1} << n_;
    if (auto req = obj_.required_size(n_); req && a_size != *req) return false;
    if (obj_.kind == ObjectiveKind::kConjMaximal && (a_size == 0 || a_size == N)) return false;
    return true;
  }

  double operator()(std::span<const word_t> a, std::span<const word_t> b) {
    const std::uint64_t N = std::uint64_t{1} << n_;
    std::uint64_t asz = 0, bsz = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      asz += static_cast<std::uint64_t>(bits::popcount(a[w]));
      bsz += static_cast<std::uint64_t>(bits::popcount(b[w]));
    }
    const std::uint64_t wsz = N - asz - bsz;
    switch (obj_.kind) {
      case ObjectiveKind::kMainDeficit: {
        std::array<std::uint64_t, kMaxDim + 1> hist{};
        h_histogram(a, hist);
        double s = 0.0;
        for (int h = 0; h <= n_; ++h) s += static_cast<double>(hist[static_cast<std::size_t>(h)]) * beta_table_[static_cast<std::size_t>(h)];
        return std::ldexp(s, -n_) - main_bound(std::ldexp(static_cast<double>(asz), -n_));
      }
      case ObjectiveKind::kCubeSep:
      case ObjectiveKind::kConjFixedK:
        return static_cast<double>(cross(a, b)) + w_coef_ * static_cast<double>(wsz) - static_cast<double>(N / 2);
      case ObjectiveKind::kConjMaximal:
        return static_cast<double>(cross(a, b)) / static_cast<double>(profiles_.nabla[asz]) +
               static_cast<double>(wsz) / static_cast<double>(profiles_.partial[asz]) - 1.0;
    }
    return 0.0;
  }

  double operator()(const Partition& P) { return (*this)(P.A().words(), P.B().words()); }

 private:
  std::uint64_t cross(std::span<const word_t> a, std::span<const word_t> b) const {
    std::uint64_t t = 0;
    for (int c = 0; c < n_; ++c) {
      if (c < bits::kWordLog) {
        for (std::size_t w = 0; w < words_; ++w)
          t += static_cast<std::uint64_t>(bits::popcount(a[w] & bits::flip_word(b[w], c)));
      } else {
        const std::size_t stride = std::size_t{1} << (c - bits::kWordLog);
        for (std::size_t w = 0; w < words_; ++w)
          t += static_cast<std::uint64_t>(bits::popcount(a[w] & b[w ^ stride]));
      }
    }
    return t;
  }

  // h_A over A: neighbours outside A.
  void h_histogram(std::span<const word_t> a, std::array<std::uint64_t, kMaxDim + 1>& hist) {
    const word_t tail = bits::tail_mask(n_);
    for (auto& c : counters_) c = {};
    for (int c = 0; c < n_; ++c) {
      for (std::size_t w = 0; w < words_; ++w) {
        const std::size_t src = c < bits::kWordLog ? w : (w ^ (std::size_t{1} << (c - bits::kWordLog)));
        const word_t valid = src + 1 == words_ ? tail : ~word_t{0};
        const word_t out = ~a[src] & valid;
        counters_[w].add(c < bits::kWordLog ? bits::flip_word(out, c) : out);
      }
    }
    for (std::size_t w = 0; w < words_; ++w) {
      if (!a[w]) continue;
      for (int d = 0; d <= n_; ++d)
        hist[static_cast<std::size_t>(d)] += static_cast<std::uint64_t>(bits::popcount(a[w] & counters_[w].equals(d)));
    }
  }

  int n_;
  Objective obj_;
  IsoProfiles profiles_;
  std::vector<double> beta_table_;
  double w_coef_ = 0.0;
  std::size_t words_ = 1;
  std::vector<bits::SlicedCounter> counters_;
};

// Independent long-double re-evaluation by per-vertex loops.
inline long double evaluate_ld(const Objective& obj, const Partition& P) {
  const int n = P.n();
  const std::uint64_t N = P.dim().vertex_count();
  const std::uint64_t a = P.A().size();
  const std::uint64_t w = P.W().size();
  std::uint64_t cross = 0;
  P.A().for_each([&](Vertex x) { cross += static_cast<std::uint64_t>(deg_in(x, P.B())); });
  switch (obj.kind) {
    case ObjectiveKind::kMainDeficit: {
      long double s = 0.0L;
      P.A().for_each([&](Vertex x) {
        const int h = h_value(x, P.A());
        if (h) s += std::pow(static_cast<long double>(h), kBetaLd);
      });
      const long double t = static_cast<long double>(a) / static_cast<long double>(N);
      return s / static_cast<long double>(N) - 2.0L * t * (1.0L - t);
    }
    case ObjectiveKind::kCubeSep:
      return static_cast<long double>(cross) + std::pow(static_cast<long double>(n), kBetaLd) * w -
             static_cast<long double>(N / 2);
    case ObjectiveKind::kConjFixedK:
      return static_cast<long double>(cross) +
             static_cast<long double>(obj.K) * std::sqrt(static_cast<long double>(n)) * w -
             static_cast<long double>(N / 2);
    case ObjectiveKind::kConjMaximal:
      return static_cast<long double>(cross) / nabla_min(a, P.dim()) +
             static_cast<long double>(w) / partial_min(a, P.dim()) - 1.0L;
  }
  return 0.0L;
}

// ---------------------------------------------------------------------------
// Exhaustive minima (n <= 3, or n = 4 on request)

inline ScanReport exhaustive_minimum(const Objective& obj, int n, const ScanOptions& opt = {}) {
  require_partition_scan_dim(n, opt.allow_large);
  detail::Stopwatch clock;
  obj.validate(n);
  const std::uint64_t total = std::uint64_t{1} << (1u << n);
  const word_t full = bits::tail_mask(n);
  const std::uint64_t chunk = std::max<std::uint64_t>(1, opt.chunk >> ((1u << n) / 2));
  auto chunks = parallel_chunks<detail::ChunkResult>(
      total, chunk, opt.threads, [&](std::uint64_t begin, std::uint64_t end) {
        Evaluator eval(n, obj);
        detail::ChunkResult r;
        for (std::uint64_t am = begin; am < end; ++am) {
          const word_t a = static_cast<word_t>(am);
          if (!eval.admissible(static_cast<std::uint64_t>(bits::popcount(a)))) continue;
          const word_t rest = full & ~a;
          word_t b = 0;
          do {
            r.offer(a, b, eval(std::span(&a, 1), std::span(&b, 1)), kTolerance);
            b = (b - rest) & rest;
          } while (b != 0);
        }
        return r;
      });
  auto merged = detail::merge(chunks, kTolerance);
  ScanReport r;
  r.n = n;
  r.inequality = to_string(obj.kind);
  r.scanned = merged.scanned;
  r.min_margin = merged.min;
  r.violations = obj.proved() ? merged.violations : 0;
  r.stats["negative_partitions"] = static_cast<double>(merged.violations);
  if (obj.kind == ObjectiveKind::kConjFixedK) r.stats["K"] = obj.K;
  r.witnesses = detail::canonical_witnesses(merged.near, n, true);
  r.runtime_ms = clock.elapsed_ms();
  return r;
}

// Smallest K with |nabla(A,B)| + K sqrt(n) |W| >= 2^{n-1} for every
// partition with mu(A) = 1/2: max over W != empty of
// (2^{n-1} - |nabla(A,B)|) / (sqrt(n) |W|), floored at 0.
struct FeasibleK {
  double K = 0.0;
  std::optional<Partition> witness;  // canonical maximiser, when K > 0
  std::uint64_t scanned = 0;
};

inline FeasibleK min_feasible_K(int n, const ScanOptions& opt = {}) {
  require_partition_scan_dim(n, opt.allow_large);
  const std::uint64_t N = std::uint64_t{1} << n;
  const double rn = std::sqrt(static_cast<double>(n));
  auto merged = scan_all_partitions(n, opt, kTolerance, [&](word_t a, word_t b) -> std::optional<double> {
    if (static_cast<std::uint64_t>(bits::popcount(a)) != N / 2) return std::nullopt;
    const int w = static_cast<int>(N) - bits::popcount(a) - bits::popcount(b);
    if (w == 0) return std::nullopt;
    const double shortfall = static_cast<double>(N / 2) - static_cast<double>(cross_count_word(a, b, n));
    return -shortfall / (rn * w);
  });
  FeasibleK out;
  out.scanned = merged.scanned;
  if (merged.scanned == 0 || -merged.min <= 0.0) return out;
  out.K = -merged.min;
  auto ws = detail::canonical_witnesses(merged.near, n, true);
  out.witness = Partition(ws.front().A, *ws.front().B);
  return out;
}

// ---------------------------------------------------------------------------
// Simulated annealing

struct MoveWeights {
  double relabel = 0.4;  // one vertex A<->W or B<->W (paired when |A| is pinned)
  double swap_ab = 0.3;  // exchange an A-vertex with a B-vertex
  double pair = 0.3;     // exchange labels of x and x^c
};

struct SearchConfig {
  int n = 3;
  std::uint64_t seed = 0;
  std::uint64_t iterations = 1'000'000;
  int restarts = 10;
  double t0 = 1.0;
  double decay = 0.999;
  MoveWeights weights;
  int threads = 1;

  void validate() const {
    CubeDim{n};
    if (iterations == 0) throw std::invalid_argument("iterations must be positive");
    if (restarts < 1) throw std::invalid_argument("restarts must be positive");
    if (!(decay > 0.0 && decay < 1.0)) throw std::invalid_argument("decay must lie in (0, 1)");
    if (!(t0 >= 0.0)) throw std::invalid_argument("initial temperature must be non-negative");
    if (weights.relabel < 0 || weights.swap_ab < 0 || weights.pair < 0 ||
        weights.relabel + weights.swap_ab + weights.pair <= 0)
      throw std::invalid_argument("move weights must be non-negative with a positive sum");
  }
};

struct TracePoint {
  int restart;
  std::uint64_t iteration;
  double best;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct ChainResult {
  int restart = 0;
  std::uint64_t seed = 0;
  double start_value = 0.0;
  double best_value = 0.0;
  std::uint64_t best_iteration = 0;
  std::vector<word_t> best_a, best_b;
  std::uint64_t accepted = 0;
  std::vector<TracePoint> trace;
};

struct AnnealResult {
  double best_value = std::numeric_limits<double>::infinity();
  std::optional<Partition> best;
  int best_restart = -1;
  std::uint64_t best_iteration = 0;
  std::vector<ChainResult> chains;
  std::vector<TracePoint> trace;
  // Set when best_value < -tolerance survives long-double re-evaluation.
  bool negative_verified = false;
  long double best_value_ld = 0.0L;
};

namespace detail {

enum Label : std::uint8_t { kA = 0, kB = 1, kW = 2 };

class ChainState {
 public:
  ChainState(int n, Rng& rng, std::optional<std::uint64_t> a_size, bool keep_interior)
      : n_(n), N_(std::uint32_t{1} << n), label_(N_), pos_(N_),
        a_(bits::word_count(n), 0), b_(bits::word_count(n), 0) {
    std::vector<std::uint32_t> perm(N_);
    for (std::uint32_t v = 0; v < N_; ++v) perm[v] = v;
    for (std::uint32_t i = N_ - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    const std::uint64_t s = a_size ? *a_size : rng.below(N_ + 1);
    for (std::uint32_t i = 0; i < N_; ++i) {
      const Label l = i < s ? kA : (rng.below(2) ? kB : kW);
      place(perm[i], l);
    }
    if (keep_interior) {
      if (members_[kA].empty()) relabel(members_[kB].empty() ? members_[kW][0] : members_[kB][0], kA);
      if (members_[kA].size() == N_) relabel(members_[kA][0], kW);
    }
  }

  Label label(std::uint32_t v) const { return static_cast<Label>(label_[v]); }
  const std::vector<std::uint32_t>& members(Label l) const { return members_[l]; }
  std::span<const word_t> a() const { return a_; }
  std::span<const word_t> b() const { return b_; }
  std::uint32_t vertex_count() const { return N_; }

  void relabel(std::uint32_t v, Label to) {
    const Label from = label(v);
    if (from == to) return;
    // remove from its member list
    auto& list = members_[from];
    const std::uint32_t last = list.back();
    list[pos_[v]] = last;
    pos_[last] = pos_[v];
    list.pop_back();
    set_bit(from, v, false);
    place(v, to);
  }

 private:
  void place(std::uint32_t v, Label l) {
    label_[v] = l;
    pos_[v] = static_cast<std::uint32_t>(members_[l].size());
    members_[l].push_back(v);
    set_bit(l, v, true);
  }

  void set_bit(Label l, std::uint32_t v, bool on) {
    std::vector<word_t>* target = l == kA ? &a_ : (l == kB ? &b_ : nullptr);
    if (!target) return;
    const word_t bit = word_t{1} << (v & 63);
    if (on) (*target)[v >> 6] |= bit;
    else (*target)[v >> 6] &= ~bit;
  }

  int n_;
  std::uint32_t N_;
  std::vector<std::uint8_t> label_;
  std::vector<std::uint32_t> pos_;
  std::array<std::vector<std::uint32_t>, 3> members_;
  std::vector<word_t> a_, b_;
};

struct Change {
  std::uint32_t v;
  Label from;
  Label to;
};

inline ChainResult run_chain(const Objective& obj, const SearchConfig& cfg, int restart) {
  const int n = cfg.n;
  Evaluator eval(n, obj);
  ChainResult res;
  res.restart = restart;
  res.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(restart));
  Rng rng(res.seed);

  const auto pinned = obj.required_size(n);
  const bool interior = obj.kind == ObjectiveKind::kConjMaximal;
  ChainState st(n, rng, pinned, interior);

  double cur = eval(st.a(), st.b());
  res.start_value = cur;
  res.best_value = cur;
  res.best_a.assign(st.a().begin(), st.a().end());
  res.best_b.assign(st.b().begin(), st.b().end());
  res.trace.push_back({restart, 0, cur});

  const double wsum = cfg.weights.relabel + cfg.weights.swap_ab + cfg.weights.pair;
  const std::uint32_t N = st.vertex_count();
  std::array<Change, 2> changes{};
  double temperature = cfg.t0;

  auto swap_labels = [&](std::uint32_t x, std::uint32_t y, int& count) {
    const Label lx = st.label(x), ly = st.label(y);
    if (lx == ly) return;
    changes[static_cast<std::size_t>(count++)] = {x, lx, ly};
    changes[static_cast<std::size_t>(count++)] = {y, ly, lx};
  };

  for (std::uint64_t it = 1; it <= cfg.iterations; ++it) {
    int count = 0;
    const double pick = rng.uniform() * wsum;
    if (pick < cfg.weights.relabel) {
      // v moves between W and A or B; when |A| is pinned a move touching A
      // becomes an exchange with a vertex of the other label.
      const std::uint32_t v = static_cast<std::uint32_t>(rng.below(N));
      const Label from = st.label(v);
      Label to;
      if (from == kW) to = rng.below(2) ? kA : kB;
      else to = kW;
      const bool touches_a = from == kA || to == kA;
      if (pinned && touches_a) {
        const auto& pool = st.members(from == kA ? to : kA);
        if (!pool.empty()) swap_labels(v, pool[rng.below(pool.size())], count);
      } else {
        changes[static_cast<std::size_t>(count++)] = {v, from, to};
      }
    } else if (pick < cfg.weights.relabel + cfg.weights.swap_ab) {
      const auto& as = st.members(kA);
      const auto& bs = st.members(kB);
      if (!as.empty() && !bs.empty()) {
        const std::uint32_t x = as[rng.below(as.size())];
        const std::uint32_t y = bs[rng.below(bs.size())];
        swap_labels(x, y, count);
      }
    } else {
      const std::uint32_t v = static_cast<std::uint32_t>(rng.below(N));
      const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      swap_labels(v, v ^ (1u << c), count);
    }

    if (count > 0) {
      for (int i = 0; i < count; ++i) st.relabel(changes[static_cast<std::size_t>(i)].v, changes[static_cast<std::size_t>(i)].to);
      bool undo = !eval.admissible(st.members(kA).size());
      if (!undo) {
        const double next = eval(st.a(), st.b());
        const double delta = next - cur;
        if (delta <= 0.0 || (temperature > 0.0 && rng.uniform() < std::exp(-delta / temperature))) {
          cur = next;
          ++res.accepted;
          if (cur < res.best_value) {
            res.best_value = cur;
            res.best_iteration = it;
            res.best_a.assign(st.a().begin(), st.a().end());
            res.best_b.assign(st.b().begin(), st.b().end());
            res.trace.push_back({restart, it, cur});
          }
        } else {
          undo = true;
        }
      }
      if (undo)
        for (int i = count; i-- > 0;) st.relabel(changes[static_cast<std::size_t>(i)].v, changes[static_cast<std::size_t>(i)].from);
    }
    temperature *= cfg.decay;
  }
  return res;
}

}  // namespace detail

inline AnnealResult anneal(const Objective& obj, const SearchConfig& cfg) {
  cfg.validate();
  obj.validate(cfg.n);
  CubeDim dim(cfg.n);

  AnnealResult out;
  out.chains = parallel_chunks<ChainResult>(static_cast<std::uint64_t>(cfg.restarts), 1, cfg.threads,
                                            [&](std::uint64_t begin, std::uint64_t) {
                                              return detail::run_chain(obj, cfg, static_cast<int>(begin));
                                            });

  // best by value, ties by canonical witness (n <= 4) or raw masks, then restart
  using Key = std::pair<std::vector<word_t>, std::vector<word_t>>;
  std::optional<Key> best_key;
  for (const auto& ch : out.chains) {
    Key key{ch.best_a, ch.best_b};
    if (cfg.n <= detail::kCanonicalMaxDim) {
      auto [a, b] = canonical_pair(ch.best_a[0], ch.best_b[0], cfg.n);
      key = {{a}, {b}};
    }
    const bool better = ch.best_value < out.best_value ||
                        (ch.best_value == out.best_value && best_key && key < *best_key);
    if (!best_key || better) {
      out.best_value = ch.best_value;
      out.best_restart = ch.restart;
      out.best_iteration = ch.best_iteration;
      out.best = Partition(VertexSet(dim, key.first), VertexSet(dim, key.second));
      best_key = std::move(key);
    }
    out.trace.insert(out.trace.end(), ch.trace.begin(), ch.trace.end());
  }
  out.best_value_ld = evaluate_ld(obj, *out.best);
  out.negative_verified = out.best_value < -kTolerance && out.best_value_ld < -static_cast<long double>(kTolerance);
  return out;
}

}  // namespace cubeiso
