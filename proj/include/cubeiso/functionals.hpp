#pragma once

// Boundary functionals of Q_n and the isoperimetric profiles.
//
// All integrals are taken against the uniform measure, so
//   int f(h_A) dmu = 2^{-n} * sum_{x in A} f(h_A(x)).
// They are evaluated through the histogram of h_A over A, summed in
// ascending h order, which keeps every value a deterministic function of A.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubeiso/cube.hpp"

namespace cubeiso {

inline const double kBeta = std::log2(1.5);
inline const long double kBetaLd = std::log2(1.5L);

inline constexpr double kTolerance = 1e-9;

// table[h] = h^exponent for h = 0..n, with 0^p = 0.
inline std::vector<double> power_table(int n, double exponent, double coef = 1.0) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (int h = 0; h <= n; ++h) t[static_cast<std::size_t>(h)] = h == 0 ? 0.0 : coef * std::pow(h, exponent);
  return t;
}

// 2^{-n} sum_h hist[h] * table[h]
template <class Count>
double integrate_histogram(std::span<const Count> hist, std::span<const double> table, int n) {
  double s = 0.0;
  for (std::size_t h = 0; h < hist.size(); ++h) s += static_cast<double>(hist[h]) * table[h];
  return std::ldexp(s, -n);
}

inline double beta_functional(const VertexSet& A) {
  const auto hist = h_histogram(A);
  const auto table = power_table(A.n(), kBeta);
  return integrate_histogram<std::uint64_t>(hist, table, A.n());
}

inline double sqrt_functional(const VertexSet& A) {
  const auto hist = h_histogram(A);
  const auto table = power_table(A.n(), 0.5);
  return integrate_histogram<std::uint64_t>(hist, table, A.n());
}

// 2 t (1 - t)
inline double main_bound(double t) { return 2.0 * t * (1.0 - t); }
inline double talagrand_bound(double t) { return std::sqrt(2.0) * t * (1.0 - t); }

// ---------------------------------------------------------------------------
// Generic (f, g) functionals

// An increasing strictly concave f on {0..n} with f(0) = 0 and f(k) = k,
// paired with a lower-bound profile g with g(2^{-k}) = k 2^{-k}.
class FunctionalSpec {
 public:
  FunctionalSpec(std::vector<double> f_table, std::function<double(double)> g, int k)
      : f_(std::move(f_table)), g_(std::move(g)), k_(k) {
    validate();
  }

  // f(x) = c x^beta with c = 1 (k = 1) or 4/3 (k = 2), and g(t) = c 2t(1-t):
  // the pairs that the main inequality supplies directly.
  static FunctionalSpec beta_power(int n, int k) {
    if (k != 1 && k != 2) throw std::invalid_argument("beta_power spec exists for k in {1, 2}");
    const double c = k == 1 ? 1.0 : 4.0 / 3.0;
    return FunctionalSpec(power_table(n, kBeta, c), [c](double t) { return c * main_bound(t); }, k);
  }

  // f(x) = x^beta scaled by `coef`, g(t) = coef * 2t(1-t), for an arbitrary table length.
  static FunctionalSpec scaled_main(std::vector<double> f_table, double g_scale, int k) {
    return FunctionalSpec(std::move(f_table), [g_scale](double t) { return g_scale * main_bound(t); }, k);
  }

  std::span<const double> f_table() const noexcept { return f_; }
  double f(int h) const { return f_.at(static_cast<std::size_t>(h)); }
  double g(double t) const { return g_(t); }
  int k() const noexcept { return k_; }
  int max_arg() const noexcept { return static_cast<int>(f_.size()) - 1; }

 private:
  void validate() const {
    if (k_ < 1) throw std::invalid_argument("functional spec: k must be positive");
    if (f_.empty()) throw std::invalid_argument("functional spec: empty f table");
    if (std::abs(f_[0]) > kTolerance) throw std::invalid_argument("functional spec: f(0) != 0");
    for (std::size_t h = 1; h < f_.size(); ++h)
      if (!(f_[h] > f_[h - 1])) throw std::invalid_argument("functional spec: f is not increasing");
    for (std::size_t h = 2; h < f_.size(); ++h)
      if (!(f_[h] - 2 * f_[h - 1] + f_[h - 2] < 0.0))
        throw std::invalid_argument("functional spec: f is not strictly concave");
    if (static_cast<std::size_t>(k_) < f_.size() && std::abs(f_[static_cast<std::size_t>(k_)] - k_) > kTolerance)
      throw std::invalid_argument("functional spec: f(k) != k");
    if (!g_) throw std::invalid_argument("functional spec: missing g");
    const double t = std::ldexp(1.0, -k_);
    if (std::abs(g_(t) - k_ * t) > kTolerance)
      throw std::invalid_argument("functional spec: g(2^-k) != k 2^-k");
  }

  std::vector<double> f_;
  std::function<double(double)> g_;
  int k_;
};

inline double generic_functional(const VertexSet& A, const FunctionalSpec& spec) {
  if (spec.max_arg() < A.n())
    throw std::invalid_argument("functional spec table shorter than n + 1");
  const auto hist = h_histogram(A);
  return integrate_histogram<std::uint64_t>(hist, spec.f_table().first(hist.size()), A.n());
}

// ---------------------------------------------------------------------------
// Deficits

struct Deficit {
  double value;
  VertexSet witness;
};

inline Deficit main_deficit(const VertexSet& A) {
  return {beta_functional(A) - main_bound(measure(A).value()), A};
}

inline Deficit talagrand_deficit(const VertexSet& A) {
  return {sqrt_functional(A) - talagrand_bound(measure(A).value()), A};
}

inline Deficit generic_deficit(const VertexSet& A, const FunctionalSpec& spec) {
  return {generic_functional(A, spec) - spec.g(measure(A).value()), A};
}

// Long-double re-evaluation of the main deficit, used to confirm equality
// and near-violation classifications.
inline long double main_deficit_ld(const VertexSet& A) {
  const auto hist = h_histogram(A);
  long double s = 0.0L;
  for (std::size_t h = 1; h < hist.size(); ++h)
    s += static_cast<long double>(hist[h]) * std::pow(static_cast<long double>(h), kBetaLd);
  const long double t = measure(A).value_ld();
  return std::ldexp(s, -A.n()) - 2.0L * t * (1.0L - t);
}

// ---------------------------------------------------------------------------
// Edge isoperimetry and the exact profiles

// a log2(2^n / a)
inline double edge_iso_lower(std::uint64_t a, CubeDim dim) {
  if (a < 1 || a > dim.vertex_count()) throw std::invalid_argument("edge_iso_lower needs 1 <= a <= 2^n");
  const double ad = static_cast<double>(a);
  return ad * (dim.n() - std::log2(ad));
}

// Vertices 0..2^n-1 in simplicial order: by weight, then x before y when the
// lowest coordinate where they differ is set in x.
inline std::vector<Vertex> simplicial_order(CubeDim dim) {
  std::vector<Vertex> order;
  order.reserve(dim.vertex_count());
  for (std::uint32_t v = 0; v < dim.vertex_count(); ++v) order.push_back(Vertex{v});
  std::stable_sort(order.begin(), order.end(), [](Vertex x, Vertex y) {
    if (x.weight() != y.weight()) return x.weight() < y.weight();
    const std::uint32_t d = x.index ^ y.index;
    if (!d) return false;
    return ((x.index >> std::countr_zero(d)) & 1u) != 0;
  });
  return order;
}

// {0, 1, ..., a-1}
inline VertexSet binary_prefix(std::uint64_t a, CubeDim dim) {
  if (a > dim.vertex_count()) throw std::invalid_argument("prefix longer than 2^n");
  VertexSet s(dim);
  auto w = s.words_mut();
  for (std::size_t i = 0; i < w.size() && a > 0; ++i) {
    const std::uint64_t take = std::min<std::uint64_t>(a, 64);
    w[i] = take == 64 ? ~word_t{0} : ((word_t{1} << take) - 1);
    a -= take;
  }
  return s;
}

inline VertexSet simplicial_prefix(std::uint64_t a, CubeDim dim) {
  if (a > dim.vertex_count()) throw std::invalid_argument("prefix longer than 2^n");
  const auto order = simplicial_order(dim);
  VertexSet s(dim);
  for (std::uint64_t i = 0; i < a; ++i) s.insert(order[i]);
  return s;
}

// min |nabla A| over |A| = a, attained by the binary-order prefix.
inline std::uint64_t nabla_min(std::uint64_t a, CubeDim dim) {
  return edge_boundary_size(binary_prefix(a, dim));
}

// min |partial A| over |A| = a, attained by the simplicial-order prefix.
inline std::uint64_t partial_min(std::uint64_t a, CubeDim dim) {
  return vertex_boundary(simplicial_prefix(a, dim)).size();
}

// Both profiles for every a in [0, 2^n], built incrementally along the
// extremal orders in O(n 2^n).
struct IsoProfiles {
  std::vector<std::uint64_t> nabla;
  std::vector<std::uint64_t> partial;

  explicit IsoProfiles(CubeDim dim) {
    const std::uint64_t N = dim.vertex_count();
    const int n = dim.n();
    nabla.assign(N + 1, 0);
    partial.assign(N + 1, 0);

    std::vector<bool> in(N, false);
    std::int64_t edges = 0;
    for (std::uint32_t v = 0; v < N; ++v) {
      int inside = 0;
      for (int c = 0; c < n; ++c) inside += in[v ^ (1u << c)];
      edges += n - 2 * inside;
      in[v] = true;
      nabla[v + 1] = static_cast<std::uint64_t>(edges);
    }

    std::fill(in.begin(), in.end(), false);
    std::vector<int> touching(N, 0);
    std::int64_t boundary = 0;
    const auto order = simplicial_order(dim);
    for (std::uint64_t i = 0; i < N; ++i) {
      const std::uint32_t v = order[i].index;
      if (touching[v] > 0) --boundary;
      in[v] = true;
      for (int c = 0; c < n; ++c) {
        const std::uint32_t u = v ^ (1u << c);
        if (!in[u] && touching[u]++ == 0) ++boundary;
      }
      partial[i + 1] = static_cast<std::uint64_t>(boundary);
    }
  }
};

// ---------------------------------------------------------------------------
// Mixed-partition bound and entropy

struct CorKPiBound {
  double lhs;
  double rhs;
  double margin() const noexcept { return lhs - rhs; }
};

// lhs = int_R h_{R u U}^beta dmu, rhs = 2 alpha (1 - alpha) - n^beta mu(U),
// alpha = mu(R u U).
inline CorKPiBound corkpi_bound(const VertexSet& R, const VertexSet& S, const VertexSet& U) {
  R.same_dim(S);
  R.same_dim(U);
  if (R.intersects(S) || R.intersects(U) || S.intersects(U) ||
      (R | S | U) != VertexSet::full(R.dim()))
    throw std::invalid_argument("corkpi_bound requires a partition (R, S, U) of V");
  const int n = R.n();
  // for x in R, h_{R u U}(x) = d_S(x)
  const auto hist = degree_histogram(R, S);
  const auto table = power_table(n, kBeta);
  const double lhs = integrate_histogram<std::uint64_t>(hist, table, n);
  const double alpha = measure(R | U).value();
  const double rhs = main_bound(alpha) - std::pow(n, kBeta) * measure(U).value();
  return {lhs, rhs};
}

// -sum p_i log2 p_i with 0 log 0 = 0.
inline double binary_entropy(std::span<const double> p) {
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw std::invalid_argument("entropy: negative or NaN probability");
    total += x;
  }
  if (std::abs(total - 1.0) > kTolerance) throw std::invalid_argument("entropy: probabilities do not sum to 1");
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

}  // namespace cubeiso
