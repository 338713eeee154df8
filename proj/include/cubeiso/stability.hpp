#pragma once

// Stability for partitions (A, B, W) whose cross boundary is close to the
// minimum: find the k coordinates carrying the boundary of A and the
// codimension-k subcube that A approximates.
//
// Hypotheses for (P, k, eps), with f_n = n^beta (or f(n) for a generic
// spec):
//   mu(A) = (1 +- eps) 2^{-k},   mu(W) <= eps / f_n,
//   |nabla(A,B)| <= (1 + eps) k 2^{n-k}.
// The library reports exact exception measures and margins; it never
// decides what "almost everywhere" means. Callers set eps_max.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubeiso/cube.hpp"
#include "cubeiso/functionals.hpp"
#include "cubeiso/shifting.hpp"

namespace cubeiso {

struct HypothesisMargins {
  double eps = 0.0;
  double measure = 0.0;  // eps 2^{-k} - |mu(A) - 2^{-k}|
  double w = 0.0;        // eps / f_n - mu(W)
  double nabla = 0.0;    // (1 + eps) k 2^{n-k} - |nabla(A,B)|
  // Reporting only: eps partial(|A|) / 2^n - mu(W), the W-bound of the
  // conjectured extension to all k.
  double w_conjectural = 0.0;

  bool holds() const noexcept { return measure >= 0.0 && w >= 0.0 && nabla >= 0.0; }
};

class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HypothesisFailure : public StabilityError {
 public:
  HypothesisFailure(const std::string& what, double min_eps)
      : StabilityError(what), min_epsilon(min_eps) {}
  double min_epsilon;
};

class AmbiguousSubcube : public StabilityError {
 public:
  AmbiguousSubcube(const std::string& what, std::vector<double> d)
      : StabilityError(what), deltas(std::move(d)) {}
  std::vector<double> deltas;
};

namespace detail {

inline void require_k(int k, int n) {
  if (k < 1 || k > n) throw std::invalid_argument("k must lie in [1, n]");
}

inline double w_scale_main(int n) { return std::pow(n, kBeta); }

}  // namespace detail

inline HypothesisMargins check_hypotheses(const Partition& P, int k, double eps, double f_n) {
  detail::require_k(k, P.n());
  const int n = P.n();
  const double target = std::ldexp(1.0, -k);
  const double muA = measure(P.A()).value();
  const double muW = measure(P.W()).value();
  const double cross = static_cast<double>(cross_boundary_size(P.A(), P.B()));
  HypothesisMargins m;
  m.eps = eps;
  m.measure = eps * target - std::abs(muA - target);
  m.w = eps / f_n - muW;
  m.nabla = (1.0 + eps) * k * std::ldexp(1.0, n - k) - cross;
  const double pmin = static_cast<double>(partial_min(P.A().size(), P.dim()));
  m.w_conjectural = eps * std::ldexp(pmin, -n) - muW;
  return m;
}

inline HypothesisMargins check_hypotheses(const Partition& P, int k, double eps) {
  return check_hypotheses(P, k, eps, detail::w_scale_main(P.n()));
}

// Smallest eps for which all three hypotheses hold.
inline double min_epsilon(const Partition& P, int k, double f_n) {
  detail::require_k(k, P.n());
  const int n = P.n();
  const double muA = measure(P.A()).value();
  const double muW = measure(P.W()).value();
  const double cross = static_cast<double>(cross_boundary_size(P.A(), P.B()));
  const double e_measure = std::abs(muA - std::ldexp(1.0, -k)) * std::ldexp(1.0, k);
  const double e_w = muW * f_n;
  const double e_nabla = std::max(0.0, cross / (k * std::ldexp(1.0, n - k)) - 1.0);
  return std::max({e_measure, e_w, e_nabla});
}

inline double min_epsilon(const Partition& P, int k) {
  return min_epsilon(P, k, detail::w_scale_main(P.n()));
}

// ---------------------------------------------------------------------------

struct DirectionStat {
  int coord;
  std::uint64_t boundary;          // |nabla_c A| of the input
  double defect;                   // 1 - |nabla_c A| / 2^{n-k}
  std::uint64_t cross_input;       // |nabla_c(A,B)| of the input
  std::uint64_t cross_compressed;  // |nabla_c(A,B)| after compression
};

struct StabilityResult {
  int k = 0;
  std::vector<int> I;  // 0-based coordinates, ascending
  std::vector<DirectionStat> per_i;
  double selected_measure = 0.0;  // mu(A_I) in the compressed partition
  std::optional<Subcube> cube;
  std::vector<double> deltas;  // |A n D_z| / 2^{n-k} for z in {0,1}^I
  double symdiff = 0.0;        // mu(C xor A)
  double min_epsilon = 0.0;
  HypothesisMargins margins;
  std::map<int, double> hab_histogram;  // h_AB value -> measure
  double exception_mass = 0.0;          // mu{x in A : h_AB(x) != k}
  double cross_ratio = 0.0;             // |nabla(A,B)| / (k 2^{n-k})
  std::uint64_t compress_steps = 0;
};

struct StabilityOptions {
  // Largest eps at which the hypotheses are accepted; infinity disables the check.
  double eps_max = 0.01;
};

// mu{x in A : h_AB(x) = d} for every d that occurs.
inline std::map<int, double> h_ab_histogram(const Partition& P) {
  const auto hist = degree_histogram(P.A(), P.B());
  std::map<int, double> out;
  for (std::size_t d = 0; d < hist.size(); ++d)
    if (hist[d]) out[static_cast<int>(d)] = std::ldexp(static_cast<double>(hist[d]), -P.n());
  return out;
}

inline double h_ab_exception_mass(const Partition& P, int k) {
  double mass = 0.0;
  for (const auto& [d, mu] : h_ab_histogram(P))
    if (d != k) mass += mu;
  return mass;
}

namespace detail {

// Lexicographic k-subsets of [0, n) as bitmasks.
inline std::vector<std::uint32_t> k_subsets(int n, int k) {
  std::vector<std::uint32_t> out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    std::uint32_t m = 0;
    for (int i : idx) m |= 1u << i;
    out.push_back(m);
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

inline void accept_or_throw(const Partition& P, int k, double f_n, const StabilityOptions& opt,
                            StabilityResult& r) {
  r.k = k;
  r.min_epsilon = min_epsilon(P, k, f_n);
  r.margins = check_hypotheses(P, k, r.min_epsilon, f_n);
  if (r.min_epsilon > opt.eps_max)
    throw HypothesisFailure("stability hypotheses need eps = " + std::to_string(r.min_epsilon) +
                                " > eps_max = " + std::to_string(opt.eps_max),
                            r.min_epsilon);
}

inline StabilityResult direction_pipeline(const Partition& P, int k, double f_n, const StabilityOptions& opt) {
  require_k(k, P.n());
  StabilityResult r;
  accept_or_throw(P, k, f_n, opt, r);
  const int n = P.n();

  const ShiftTrace trace = compress(P);
  const Partition& Q = trace.final;
  r.compress_steps = trace.nontrivial_steps();

  std::vector<VertexSet> b_flipped;
  b_flipped.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) b_flipped.push_back(Q.B().flipped(c));

  // A_I = {x in A : x^c in B for all c in I}, maximised over k-subsets I
  std::uint32_t best_set = 0;
  std::uint64_t best_size = 0;
  bool first = true;
  for (std::uint32_t I : k_subsets(n, k)) {
    VertexSet AI = Q.A();
    for (std::uint32_t m = I; m; m &= m - 1) AI &= b_flipped[static_cast<std::size_t>(std::countr_zero(m))];
    const std::uint64_t size = AI.size();
    if (first || size > best_size) {
      best_set = I;
      best_size = size;
      first = false;
    }
  }
  r.selected_measure = std::ldexp(static_cast<double>(best_size), -n);

  const double scale = std::ldexp(1.0, n - k);
  for (std::uint32_t m = best_set; m; m &= m - 1) {
    const int c = std::countr_zero(m);
    r.I.push_back(c);
    const std::uint64_t b = directional_boundary_size(P.A(), c);
    r.per_i.push_back({c, b, 1.0 - static_cast<double>(b) / scale,
                       directional_cross_size(P.A(), P.B(), c), directional_cross_size(Q.A(), Q.B(), c)});
  }
  r.hab_histogram = h_ab_histogram(P);
  r.exception_mass = h_ab_exception_mass(P, k);
  r.cross_ratio = static_cast<double>(cross_boundary_size(P.A(), P.B())) / (k * scale);
  return r;
}

inline StabilityResult subcube_pipeline(const Partition& P, int k, double f_n, const StabilityOptions& opt) {
  StabilityResult r = direction_pipeline(P, k, f_n, opt);
  const int n = P.n();
  std::uint32_t fixed = 0;
  for (int c : r.I) fixed |= 1u << c;
  const double scale = std::ldexp(1.0, n - k);
  std::optional<Subcube> winner;
  int dominant = 0;
  for (const Subcube& D : subcubes_on(fixed)) {
    const VertexSet cube = subcube_set(D, P.dim());
    const double delta = static_cast<double>((P.A() & cube).size()) / scale;
    r.deltas.push_back(delta);
    if (delta > 0.5) {
      ++dominant;
      winner = D;
    }
  }
  if (dominant != 1)
    throw AmbiguousSubcube(std::to_string(dominant) + " subcubes on the chosen coordinates hold more than half their volume in A",
                           r.deltas);
  r.cube = winner;
  r.symdiff = measure(subcube_set(*winner, P.dim()) ^ P.A()).value();
  return r;
}

}  // namespace detail

inline StabilityResult find_direction_set(const Partition& P, int k, const StabilityOptions& opt = {}) {
  return detail::direction_pipeline(P, k, detail::w_scale_main(P.n()), opt);
}

inline StabilityResult recover_subcube(const Partition& P, int k, const StabilityOptions& opt = {}) {
  return detail::subcube_pipeline(P, k, detail::w_scale_main(P.n()), opt);
}

// Same pipeline with the W-bound eps / f(n) taken from the spec.
inline StabilityResult stability_generic(const Partition& P, const FunctionalSpec& spec, int k,
                                         const StabilityOptions& opt = {}) {
  if (spec.k() != k) throw std::invalid_argument("functional spec was built for a different k");
  if (spec.max_arg() < P.n()) throw std::invalid_argument("functional spec table shorter than n + 1");
  return detail::subcube_pipeline(P, k, spec.f(P.n()), opt);
}

// ---------------------------------------------------------------------------

struct ConcentrationResult {
  Subcube cube;
  double symdiff;           // mu(C xor A)
  double symdiff_relative;  // |C xor A| / |A|
  double entropy;           // H(alpha_z), alpha_z = |A n V_z| / |A|
  std::uint64_t residual;   // |nabla A \ nabla_I A|
  std::vector<std::uint64_t> counts;  // |A n V_z| in z order
};

// Subcube from a boundary concentrated on the coordinates in `fixed`:
// requires |A| = (1 +- eps) 2^{n-k} and |nabla A \ nabla_I A| <= eps |A|.
inline ConcentrationResult cube_from_boundary_concentration(const VertexSet& A, std::uint32_t fixed, double eps) {
  const int n = A.n();
  if (fixed == 0 || (fixed >> n)) throw std::invalid_argument("coordinate set must be a non-empty subset of [0, n)");
  const int k = std::popcount(fixed);
  const double a = static_cast<double>(A.size());
  const double scale = std::ldexp(1.0, n - k);
  std::uint64_t along = 0;
  for (std::uint32_t m = fixed; m; m &= m - 1) along += directional_boundary_size(A, std::countr_zero(m));
  const std::uint64_t residual = edge_boundary_size(A) - along;
  if (A.empty() || std::abs(a - scale) > eps * scale || static_cast<double>(residual) > eps * a)
    throw HypothesisFailure("boundary concentration hypotheses fail at eps = " + std::to_string(eps),
                            std::max(std::abs(a - scale) / scale, a > 0 ? residual / a : std::numeric_limits<double>::infinity()));

  ConcentrationResult r{};
  std::uint64_t best = 0;
  bool first = true;
  std::vector<double> alpha;
  for (const Subcube& D : subcubes_on(fixed)) {
    const std::uint64_t cnt = (A & subcube_set(D, A.dim())).size();
    r.counts.push_back(cnt);
    alpha.push_back(static_cast<double>(cnt) / a);
    if (first || cnt > best) {
      best = cnt;
      r.cube = D;
      first = false;
    }
  }
  const VertexSet diff = subcube_set(r.cube, A.dim()) ^ A;
  r.symdiff = measure(diff).value();
  r.symdiff_relative = static_cast<double>(diff.size()) / a;
  r.entropy = binary_entropy(alpha);
  r.residual = residual;
  return r;
}

}  // namespace cubeiso
