#pragma once

// Naive reference implementations. Everything here works vertex by vertex
// on plain vectors so that it shares no code path with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "cubeiso/cube.hpp"

namespace oracle {

using Bits = std::vector<char>;

inline std::uint32_t N(int n) { return 1u << n; }

inline Bits from_mask(std::uint64_t m, int n) {
  Bits b(N(n));
  for (std::uint32_t x = 0; x < N(n); ++x) b[x] = (m >> x) & 1u;
  return b;
}

inline Bits bits_of(const cubeiso::VertexSet& A) {
  Bits b(N(A.n()));
  for (std::uint32_t x = 0; x < N(A.n()); ++x) b[x] = A.contains(cubeiso::Vertex{x});
  return b;
}

inline cubeiso::VertexSet to_set(const Bits& b, int n) {
  cubeiso::VertexSet s{cubeiso::CubeDim(n)};
  for (std::uint32_t x = 0; x < b.size(); ++x)
    if (b[x]) s.insert(cubeiso::Vertex{x});
  return s;
}

inline std::uint64_t count(const Bits& b) { return static_cast<std::uint64_t>(std::count(b.begin(), b.end(), 1)); }

// neighbours of x in T
inline int deg(const Bits& T, int n, std::uint32_t x) {
  int d = 0;
  for (int i = 0; i < n; ++i) d += T[x ^ (1u << i)];
  return d;
}

inline int h(const Bits& A, int n, std::uint32_t x) {
  if (!A[x]) return 0;
  int d = 0;
  for (int i = 0; i < n; ++i) d += !A[x ^ (1u << i)];
  return d;
}

inline double integral(const Bits& A, int n, const std::function<double(int)>& f) {
  double s = 0.0;
  for (std::uint32_t x = 0; x < N(n); ++x)
    if (A[x]) s += f(h(A, n, x));
  return s / N(n);
}

inline double beta_integral(const Bits& A, int n) {
  const double beta = std::log(1.5) / std::log(2.0);
  return integral(A, n, [&](int k) { return std::pow(static_cast<double>(k), beta); });
}

inline double sqrt_integral(const Bits& A, int n) {
  return integral(A, n, [](int k) { return std::sqrt(static_cast<double>(k)); });
}

inline std::uint64_t edge_boundary(const Bits& A, int n) {
  std::uint64_t e = 0;
  for (std::uint32_t x = 0; x < N(n); ++x)
    for (int i = 0; i < n; ++i) e += A[x] && !A[x ^ (1u << i)];
  return e;
}

inline std::uint64_t directional(const Bits& A, int n, int i) {
  std::uint64_t e = 0;
  for (std::uint32_t x = 0; x < N(n); ++x) e += A[x] && !A[x ^ (1u << i)];
  return e;
}

inline std::uint64_t cross(const Bits& A, const Bits& B, int n) {
  std::uint64_t e = 0;
  for (std::uint32_t x = 0; x < N(n); ++x)
    for (int i = 0; i < n; ++i) e += A[x] && B[x ^ (1u << i)];
  return e;
}

inline std::uint64_t cross_dir(const Bits& A, const Bits& B, int n, int i) {
  std::uint64_t e = 0;
  for (std::uint32_t x = 0; x < N(n); ++x) e += A[x] && B[x ^ (1u << i)];
  return e;
}

inline std::uint64_t vertex_boundary(const Bits& A, int n) {
  std::uint64_t v = 0;
  for (std::uint32_t x = 0; x < N(n); ++x)
    if (!A[x] && deg(A, n, x) > 0) ++v;
  return v;
}

// y >= x coordinatewise
inline bool above(std::uint32_t y, std::uint32_t x) { return (x & ~y) == 0; }

inline bool increasing(const Bits& A, int n) {
  for (std::uint32_t x = 0; x < N(n); ++x)
    for (std::uint32_t y = 0; y < N(n); ++y)
      if (A[x] && above(y, x) && !A[y]) return false;
  return true;
}

inline bool decreasing(const Bits& A, int n) {
  for (std::uint32_t x = 0; x < N(n); ++x)
    for (std::uint32_t y = 0; y < N(n); ++y)
      if (A[x] && above(x, y) && !A[y]) return false;
  return true;
}

// Minimum edge / vertex boundary over all a-subsets, n <= 4.
inline std::uint64_t min_edge_boundary(std::uint64_t a, int n) {
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << N(n)); ++m)
    if (static_cast<std::uint64_t>(std::popcount(m)) == a) best = std::min(best, edge_boundary(from_mask(m, n), n));
  return best;
}

inline std::uint64_t min_vertex_boundary(std::uint64_t a, int n) {
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << N(n)); ++m)
    if (static_cast<std::uint64_t>(std::popcount(m)) == a) best = std::min(best, vertex_boundary(from_mask(m, n), n));
  return best;
}

// Vertex labels for partitions, ordered so that an i-shift sorts each
// pair (x, x^i), x_i = 0, into non-decreasing label order.
enum Label : char { kB = 0, kW = 1, kA = 2 };
using Labels = std::vector<char>;

inline Labels labels_of(const Bits& A, const Bits& B) {
  Labels l(A.size(), kW);
  for (std::size_t x = 0; x < A.size(); ++x) l[x] = A[x] ? kA : B[x] ? kB : kW;
  return l;
}

inline Bits part(const Labels& l, char which) {
  Bits b(l.size());
  for (std::size_t x = 0; x < l.size(); ++x) b[x] = l[x] == which;
  return b;
}

inline Labels shift(Labels l, int n, int i) {
  for (std::uint32_t x = 0; x < N(n); ++x) {
    if (x & (1u << i)) continue;
    const std::uint32_t y = x | (1u << i);
    if (l[x] > l[y]) std::swap(l[x], l[y]);
  }
  return l;
}

// Labels of Q_n from a base-3 code: digit x is the label of vertex x.
inline Labels labels_from_code(std::uint64_t code, int n) {
  Labels l(N(n));
  for (std::uint32_t x = 0; x < N(n); ++x) {
    l[x] = static_cast<char>(code % 3);
    code /= 3;
  }
  return l;
}

inline Labels random_labels(int n, std::mt19937_64& gen) {
  Labels l(N(n));
  for (auto& c : l) c = static_cast<char>(gen() % 3);
  return l;
}

inline cubeiso::Partition to_partition(const Labels& l, int n) {
  return cubeiso::Partition(to_set(part(l, kA), n), to_set(part(l, kB), n));
}

// Image of x under coordinate permutation perm followed by xor with flips.
inline std::uint32_t act(std::uint32_t x, const std::vector<int>& perm, std::uint32_t flips) {
  std::uint32_t y = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (x & (1u << i)) y |= 1u << perm[i];
  return y ^ flips;
}

// Numerically least image of mask under all n! 2^n automorphisms.
inline std::uint64_t canonical(std::uint64_t mask, int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  do {
    for (std::uint32_t f = 0; f < N(n); ++f) {
      std::uint64_t img = 0;
      for (std::uint32_t x = 0; x < N(n); ++x)
        if ((mask >> x) & 1u) img |= std::uint64_t{1} << act(x, perm, f);
      best = std::min(best, img);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Subcube test by definition: A is the set of x agreeing with some z on some I.
inline bool is_subcube(const Bits& A, int n) {
  for (std::uint32_t I = 0; I < N(n); ++I)
    for (std::uint32_t z = I;; z = (z - 1) & I) {
      bool same = true;
      for (std::uint32_t x = 0; x < N(n) && same; ++x) same = (A[x] != 0) == ((x & I) == z);
      if (same) return true;
      if (z == 0) break;
    }
  return false;
}

inline double product_measure(const Bits& A, const std::vector<double>& p) {
  double s = 0.0;
  for (std::uint32_t x = 0; x < A.size(); ++x) {
    if (!A[x]) continue;
    double w = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) w *= (x >> i) & 1u ? p[i] : 1.0 - p[i];
    s += w;
  }
  return s;
}

}  // namespace oracle
