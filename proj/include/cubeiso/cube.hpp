#pragma once

// Exact combinatorial primitives on the Hamming cube Q_n.
//
// Conventions used throughout the library:
//  * a vertex is an integer in [0, 2^n); bit c of the index is coordinate
//    x_{c+1}. Library APIs take 0-based coordinate indices c in [0, n);
//    JSON reports print 1-based coordinate numbers.
//  * a VertexSet is a 2^n-bit mask (vertex v present iff bit v is set).
//  * counts are exact integers and measures are exact dyadic rationals.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cubeiso/bits.hpp"

namespace cubeiso {

using bits::word_t;

inline constexpr int kMaxDim = 20;

class CubeDim {
 public:
  explicit CubeDim(int n) : n_(n) {
    if (n < 1 || n > kMaxDim)
      throw std::invalid_argument("cube dimension must be in [1, 20], got " +
                                  std::to_string(n));
  }

  int n() const noexcept { return n_; }
  std::uint64_t vertex_count() const noexcept { return std::uint64_t{1} << n_; }
  std::size_t word_count() const noexcept { return bits::word_count(n_); }

  friend bool operator==(CubeDim, CubeDim) = default;

 private:
  int n_;
};

struct Vertex {
  std::uint32_t index = 0;

  bool coord(int c) const noexcept { return (index >> c) & 1u; }
  Vertex flipped(int c) const noexcept { return Vertex{index ^ (1u << c)}; }
  int weight() const noexcept { return std::popcount(index); }

  friend auto operator<=>(Vertex, Vertex) = default;
};

// |A| / 2^n, kept as an exact numerator.
struct Measure {
  std::uint64_t count = 0;
  int n = 1;

  double value() const noexcept {
    return static_cast<double>(count) / static_cast<double>(std::uint64_t{1} << n);
  }
  long double value_ld() const noexcept {
    return static_cast<long double>(count) /
           static_cast<long double>(std::uint64_t{1} << n);
  }

  friend bool operator==(const Measure& a, const Measure& b) noexcept {
    // cross-multiply so different n compare by value
    return (a.count << b.n) == (b.count << a.n);
  }
};

class VertexSet {
 public:
  explicit VertexSet(CubeDim dim) : dim_(dim), words_(dim.word_count(), 0) {}

  VertexSet(CubeDim dim, std::vector<word_t> words)
      : dim_(dim), words_(std::move(words)) {
    if (words_.size() != dim.word_count())
      throw std::invalid_argument("vertex mask has wrong word count");
    if (words_.back() & ~bits::tail_mask(dim.n()))
      throw std::invalid_argument("vertex mask has bits beyond 2^n");
  }

  // Single-word constructor for n <= 6.
  static VertexSet from_mask(CubeDim dim, word_t mask) {
    if (dim.n() > bits::kWordLog)
      throw std::invalid_argument("from_mask requires n <= 6");
    return VertexSet(dim, std::vector<word_t>{mask});
  }

  static VertexSet full(CubeDim dim) {
    VertexSet s(dim);
    std::fill(s.words_.begin(), s.words_.end(), ~word_t{0});
    s.words_.back() &= bits::tail_mask(dim.n());
    return s;
  }

  static VertexSet of(CubeDim dim, std::initializer_list<std::uint32_t> vs) {
    VertexSet s(dim);
    for (auto v : vs) s.insert(Vertex{v});
    return s;
  }

  CubeDim dim() const noexcept { return dim_; }
  int n() const noexcept { return dim_.n(); }
  std::span<const word_t> words() const noexcept { return words_; }
  std::span<word_t> words_mut() noexcept { return words_; }
  word_t mask() const noexcept { return words_[0]; }

  bool contains(Vertex v) const noexcept {
    return (words_[v.index >> 6] >> (v.index & 63)) & 1u;
  }
  void insert(Vertex v) { check(v); words_[v.index >> 6] |= word_t{1} << (v.index & 63); }
  void erase(Vertex v) { check(v); words_[v.index >> 6] &= ~(word_t{1} << (v.index & 63)); }

  std::uint64_t size() const noexcept {
    std::uint64_t s = 0;
    for (auto w : words_) s += static_cast<std::uint64_t>(bits::popcount(w));
    return s;
  }
  bool empty() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](word_t w) { return w == 0; });
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      word_t m = words_[w];
      while (m) {
        const int b = std::countr_zero(m);
        f(Vertex{static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(b))});
        m &= m - 1;
      }
    }
  }

  std::vector<Vertex> vertices() const {
    std::vector<Vertex> out;
    out.reserve(size());
    for_each([&](Vertex v) { out.push_back(v); });
    return out;
  }

  // {x : x ^ e_c in this}
  VertexSet flipped(int c) const {
    VertexSet out(dim_);
    bits::flip_into(words_, out.words_, c);
    return out;
  }

  VertexSet complement() const {
    VertexSet out(dim_);
    for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] = ~words_[w];
    out.words_.back() &= bits::tail_mask(n());
    return out;
  }

  VertexSet& operator|=(const VertexSet& o) { return zip(o, [](word_t a, word_t b) { return a | b; }); }
  VertexSet& operator&=(const VertexSet& o) { return zip(o, [](word_t a, word_t b) { return a & b; }); }
  VertexSet& operator-=(const VertexSet& o) { return zip(o, [](word_t a, word_t b) { return a & ~b; }); }
  VertexSet& operator^=(const VertexSet& o) { return zip(o, [](word_t a, word_t b) { return a ^ b; }); }

  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
  friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }
  friend VertexSet operator^(VertexSet a, const VertexSet& b) { return a ^= b; }

  bool intersects(const VertexSet& o) const {
    same_dim(o);
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & o.words_[w]) return true;
    return false;
  }
  bool subset_of(const VertexSet& o) const {
    same_dim(o);
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & ~o.words_[w]) return false;
    return true;
  }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

  // Numeric order of the masks (most significant word first).
  friend std::strong_ordering operator<=>(const VertexSet& a, const VertexSet& b) {
    if (auto c = a.n() <=> b.n(); c != 0) return c;
    for (std::size_t w = a.words_.size(); w-- > 0;)
      if (auto c = a.words_[w] <=> b.words_[w]; c != 0) return c;
    return std::strong_ordering::equal;
  }

  void same_dim(const VertexSet& o) const {
    if (!(dim_ == o.dim_)) throw std::invalid_argument("vertex sets of different dimension");
  }

 private:
  void check(Vertex v) const {
    if (v.index >= dim_.vertex_count()) throw std::out_of_range("vertex outside Q_n");
  }

  template <class Op>
  VertexSet& zip(const VertexSet& o, Op op) {
    same_dim(o);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] = op(words_[w], o.words_[w]);
    return *this;
  }

  CubeDim dim_;
  std::vector<word_t> words_;
};

// ---------------------------------------------------------------------------
// Vertex-level operations

inline std::vector<Vertex> neighbors(Vertex x, CubeDim dim) {
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(dim.n()));
  for (int c = 0; c < dim.n(); ++c) out.push_back(x.flipped(c));
  return out;
}

inline int deg_in(Vertex x, const VertexSet& T) {
  int d = 0;
  for (int c = 0; c < T.n(); ++c) d += T.contains(x.flipped(c));
  return d;
}

// h_A(x): neighbours outside A if x is in A, else 0.
inline int h_value(Vertex x, const VertexSet& A) {
  return A.contains(x) ? A.n() - deg_in(x, A) : 0;
}

inline int h_ab_value(Vertex x, const VertexSet& A, const VertexSet& B) {
  if (A.intersects(B)) throw std::invalid_argument("h_AB requires disjoint A and B");
  return A.contains(x) ? deg_in(x, B) : 0;
}

// ---------------------------------------------------------------------------
// Set-level boundaries

// hist[d] = #{x in inside : x has exactly d neighbours in target}.
inline std::vector<std::uint64_t> degree_histogram(const VertexSet& inside,
                                                   const VertexSet& target) {
  inside.same_dim(target);
  const int n = inside.n();
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(n) + 1, 0);
  const auto tw = target.words();
  const auto iw = inside.words();
  std::vector<word_t> flipped(tw.size());
  std::vector<bits::SlicedCounter> counters(tw.size());
  for (int c = 0; c < n; ++c) {
    bits::flip_into(tw, flipped, c);
    for (std::size_t w = 0; w < tw.size(); ++w) counters[w].add(flipped[w]);
  }
  for (std::size_t w = 0; w < tw.size(); ++w) {
    if (!iw[w]) continue;
    for (int d = 0; d <= n; ++d)
      hist[static_cast<std::size_t>(d)] +=
          static_cast<std::uint64_t>(bits::popcount(iw[w] & counters[w].equals(d)));
  }
  return hist;
}

// Distribution of h_A over A.
inline std::vector<std::uint64_t> h_histogram(const VertexSet& A) {
  return degree_histogram(A, A.complement());
}

inline VertexSet vertex_boundary(const VertexSet& A) {
  VertexSet reach(A.dim());
  for (int c = 0; c < A.n(); ++c) reach |= A.flipped(c);
  return reach - A;
}

// |nabla_c(A, B)| = #{x in A : x^c in B}
inline std::uint64_t directional_cross_size(const VertexSet& A, const VertexSet& B, int c) {
  A.same_dim(B);
  if (c < 0 || c >= A.n()) throw std::out_of_range("coordinate outside [0, n)");
  const auto aw = A.words();
  const auto bw = B.words();
  std::uint64_t total = 0;
  if (c < bits::kWordLog) {
    for (std::size_t w = 0; w < aw.size(); ++w)
      total += static_cast<std::uint64_t>(bits::popcount(aw[w] & bits::flip_word(bw[w], c)));
  } else {
    const std::size_t stride = std::size_t{1} << (c - bits::kWordLog);
    for (std::size_t w = 0; w < aw.size(); ++w)
      total += static_cast<std::uint64_t>(bits::popcount(aw[w] & bw[w ^ stride]));
  }
  return total;
}

inline std::uint64_t cross_boundary_size(const VertexSet& A, const VertexSet& B) {
  if (A.intersects(B)) throw std::invalid_argument("nabla(A,B) requires disjoint A and B");
  std::uint64_t total = 0;
  for (int c = 0; c < A.n(); ++c) total += directional_cross_size(A, B, c);
  return total;
}

inline std::uint64_t directional_boundary_size(const VertexSet& A, int c) {
  return directional_cross_size(A, A.complement(), c);
}

inline std::uint64_t edge_boundary_size(const VertexSet& A) {
  return cross_boundary_size(A, A.complement());
}

inline Measure measure(const VertexSet& A) { return Measure{A.size(), A.n()}; }

// Up-closed: x in A, x_c = 0 implies x^c in A.
inline bool is_increasing(const VertexSet& A) {
  const auto aw = A.words();
  for (int c = 0; c < A.n(); ++c) {
    const VertexSet up = A.flipped(c);
    const auto uw = up.words();
    for (std::size_t w = 0; w < aw.size(); ++w)
      if (aw[w] & bits::low_half_word(w, c) & ~uw[w]) return false;
  }
  return true;
}

inline bool is_decreasing(const VertexSet& A) {
  const auto aw = A.words();
  for (int c = 0; c < A.n(); ++c) {
    const VertexSet down = A.flipped(c);
    const auto dw = down.words();
    for (std::size_t w = 0; w < aw.size(); ++w)
      if (aw[w] & ~bits::low_half_word(w, c) & ~dw[w]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Partitions and subcubes

// (A, B, W) with W = V \ (A u B) implicit.
class Partition {
 public:
  Partition(VertexSet a, VertexSet b) : a_(std::move(a)), b_(std::move(b)) {
    a_.same_dim(b_);
    if (a_.intersects(b_)) throw std::invalid_argument("partition parts A and B overlap");
  }

  CubeDim dim() const noexcept { return a_.dim(); }
  int n() const noexcept { return a_.n(); }
  const VertexSet& A() const noexcept { return a_; }
  const VertexSet& B() const noexcept { return b_; }
  VertexSet W() const { return (a_ | b_).complement(); }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend std::strong_ordering operator<=>(const Partition& x, const Partition& y) {
    if (auto c = x.a_ <=> y.a_; c != 0) return c;
    return x.b_ <=> y.b_;
  }

 private:
  VertexSet a_;
  VertexSet b_;
};

// {x : x_c = z_c for every c in fixed}, with fixed and z as coordinate bitmasks.
struct Subcube {
  std::uint32_t fixed = 0;
  std::uint32_t z = 0;

  Subcube() = default;
  Subcube(std::uint32_t fixed_coords, std::uint32_t values) : fixed(fixed_coords), z(values) {
    if (z & ~fixed) throw std::invalid_argument("subcube assignment outside its coordinate set");
  }

  int codimension() const noexcept { return std::popcount(fixed); }
  bool contains(Vertex x) const noexcept { return (x.index & fixed) == z; }

  std::vector<int> coords() const {
    std::vector<int> out;
    for (std::uint32_t m = fixed; m; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
  }

  friend bool operator==(const Subcube&, const Subcube&) = default;
};

inline VertexSet subcube_set(const Subcube& C, CubeDim dim) {
  if (C.fixed >> dim.n()) throw std::invalid_argument("subcube coordinates outside [0, n)");
  VertexSet out(dim);
  auto ow = out.words_mut();
  // within-word pattern from the low coordinates, word selection from the rest
  const std::uint32_t lo_fixed = C.fixed & 63u;
  const std::uint32_t lo_z = C.z & 63u;
  word_t pattern = 0;
  const int lanes = std::min<int>(64, static_cast<int>(dim.vertex_count()));
  for (int b = 0; b < lanes; ++b)
    if ((static_cast<std::uint32_t>(b) & lo_fixed) == lo_z) pattern |= word_t{1} << b;
  const std::uint32_t hi_fixed = C.fixed >> 6;
  const std::uint32_t hi_z = C.z >> 6;
  for (std::size_t w = 0; w < ow.size(); ++w)
    if ((static_cast<std::uint32_t>(w) & hi_fixed) == hi_z) ow[w] = pattern;
  return out;
}

// All 2^k subcubes on the coordinate set `fixed`, ordered by z.
inline std::vector<Subcube> subcubes_on(std::uint32_t fixed) {
  std::vector<Subcube> out;
  std::uint32_t z = 0;
  do {
    out.emplace_back(fixed, z);
    z = (z - fixed) & fixed;  // next submask in increasing order
  } while (z != 0);
  return out;
}

// ---------------------------------------------------------------------------
// Hyperoctahedral automorphisms

// x -> y with y_{perm[c]} = x_c xor flip_c.
struct Automorphism {
  std::vector<int> perm;
  std::uint32_t flips = 0;

  static Automorphism identity(CubeDim dim) {
    Automorphism g;
    g.perm.resize(static_cast<std::size_t>(dim.n()));
    std::iota(g.perm.begin(), g.perm.end(), 0);
    return g;
  }

  void validate(CubeDim dim) const {
    if (perm.size() != static_cast<std::size_t>(dim.n()))
      throw std::invalid_argument("automorphism permutation has wrong length");
    std::vector<bool> seen(perm.size(), false);
    for (int p : perm) {
      if (p < 0 || p >= dim.n() || seen[static_cast<std::size_t>(p)])
        throw std::invalid_argument("automorphism permutation is not a bijection");
      seen[static_cast<std::size_t>(p)] = true;
    }
    if (flips >> dim.n()) throw std::invalid_argument("automorphism flips outside [0, n)");
  }

  Vertex apply(Vertex x) const noexcept {
    const std::uint32_t y = x.index ^ flips;
    std::uint32_t out = 0;
    for (std::size_t c = 0; c < perm.size(); ++c)
      out |= ((y >> c) & 1u) << perm[c];
    return Vertex{out};
  }
};

inline VertexSet apply_automorphism(const VertexSet& A, const Automorphism& g) {
  g.validate(A.dim());
  VertexSet out(A.dim());
  A.for_each([&](Vertex v) { out.insert(g.apply(v)); });
  return out;
}

namespace detail {

inline constexpr int kCanonicalMaxDim = 4;

// Vertex maps of every group element, for single-word dimensions.
struct GroupTable {
  int n = 0;
  std::vector<std::vector<std::uint8_t>> maps;

  explicit GroupTable(int dim) : n(dim) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      for (std::uint32_t flips = 0; flips < (1u << n); ++flips) {
        Automorphism g{perm, flips};
        std::vector<std::uint8_t> m(std::size_t{1} << n);
        for (std::uint32_t v = 0; v < m.size(); ++v)
          m[v] = static_cast<std::uint8_t>(g.apply(Vertex{v}).index);
        maps.push_back(std::move(m));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  static const GroupTable& get(int dim) {
    static const std::vector<GroupTable> tables = [] {
      std::vector<GroupTable> t;
      for (int d = 1; d <= kCanonicalMaxDim; ++d) t.emplace_back(d);
      return t;
    }();
    return tables.at(static_cast<std::size_t>(dim - 1));
  }

  static word_t image(word_t mask, const std::vector<std::uint8_t>& m) noexcept {
    word_t out = 0;
    while (mask) {
      out |= word_t{1} << m[static_cast<std::size_t>(std::countr_zero(mask))];
      mask &= mask - 1;
    }
    return out;
  }
};

inline void require_canonical_dim(int n) {
  if (n > kCanonicalMaxDim)
    throw std::invalid_argument("canonical forms are only computed for n <= 4");
}

}  // namespace detail

// Least mask in the orbit of A under the full automorphism group (n <= 4).
inline word_t canonical_mask(word_t mask, int n) {
  detail::require_canonical_dim(n);
  const auto& table = detail::GroupTable::get(n);
  word_t best = mask;
  for (const auto& m : table.maps) best = std::min(best, detail::GroupTable::image(mask, m));
  return best;
}

inline VertexSet canonical_form(const VertexSet& A) {
  return VertexSet::from_mask(A.dim(), canonical_mask(A.mask(), A.n()));
}

// Lexicographically least (A, B) over the simultaneous orbit (n <= 4).
inline std::pair<word_t, word_t> canonical_pair(word_t a, word_t b, int n) {
  detail::require_canonical_dim(n);
  const auto& table = detail::GroupTable::get(n);
  std::pair<word_t, word_t> best{a, b};
  for (const auto& m : table.maps)
    best = std::min(best, {detail::GroupTable::image(a, m), detail::GroupTable::image(b, m)});
  return best;
}

inline Partition canonical_form(const Partition& P) {
  auto [a, b] = canonical_pair(P.A().mask(), P.B().mask(), P.n());
  return Partition(VertexSet::from_mask(P.dim(), a), VertexSet::from_mask(P.dim(), b));
}

// ---------------------------------------------------------------------------
// Hex serialization: "n=<dim>:<hex>", most significant digit first; the last
// digit holds vertices 0-3.

inline std::string to_hex(const VertexSet& A) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::uint64_t nbits = A.dim().vertex_count();
  const std::uint64_t ndigits = std::max<std::uint64_t>(1, nbits / 4);
  std::string out = "n=" + std::to_string(A.n()) + ":";
  const auto w = A.words();
  for (std::uint64_t d = ndigits; d-- > 0;) {
    const std::uint64_t bit = d * 4;
    out.push_back(kDigits[(w[bit >> 6] >> (bit & 63)) & 0xF]);
  }
  return out;
}

// Accepts "n=<dim>:<hex>" or bare hex when `dim` is supplied.
inline VertexSet parse_hex(std::string_view text, std::optional<CubeDim> dim = std::nullopt) {
  std::string_view digits = text;
  if (text.starts_with("n=")) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("malformed vertex mask: missing ':'");
    int parsed = 0;
    for (char ch : text.substr(2, colon - 2)) {
      if (ch < '0' || ch > '9') throw std::invalid_argument("malformed vertex mask dimension");
      parsed = parsed * 10 + (ch - '0');
      if (parsed > 1000) throw std::invalid_argument("malformed vertex mask dimension");
    }
    if (colon == 2) throw std::invalid_argument("malformed vertex mask dimension");
    CubeDim d(parsed);
    if (dim && !(*dim == d)) throw std::invalid_argument("vertex mask dimension does not match --n");
    dim = d;
    digits = text.substr(colon + 1);
  }
  if (!dim) throw std::invalid_argument("bare hex mask needs an explicit dimension");
  if (digits.starts_with("0x")) digits.remove_prefix(2);
  if (digits.empty()) throw std::invalid_argument("empty vertex mask");
  VertexSet out(*dim);
  auto w = out.words_mut();
  const std::uint64_t nbits = dim->vertex_count();
  std::uint64_t bit = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it, bit += 4) {
    const char ch = *it;
    word_t v;
    if (ch >= '0' && ch <= '9') v = static_cast<word_t>(ch - '0');
    else if (ch >= 'a' && ch <= 'f') v = static_cast<word_t>(ch - 'a' + 10);
    else if (ch >= 'A' && ch <= 'F') v = static_cast<word_t>(ch - 'A' + 10);
    else throw std::invalid_argument(std::string("malformed vertex mask digit '") + ch + "'");
    if (!v) continue;
    if (bit >= nbits || (bit + 4 > nbits && (v >> (nbits - bit))))
      throw std::invalid_argument("vertex mask has bits beyond 2^n");
    w[bit >> 6] |= v << (bit & 63);
  }
  return out;
}

}  // namespace cubeiso
