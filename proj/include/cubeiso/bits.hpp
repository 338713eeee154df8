#pragma once

// Word-level kernels over vertex masks of Q_n.
//
// A vertex mask stores vertex v at bit (v % 64) of word (v / 64). Flipping
// coordinate i maps vertex x to x ^ (1 << i); on masks this is either an
// intra-word butterfly (i < 6) or a permutation of whole words (i >= 6).

#include <array>
#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>

namespace cubeiso::bits {

using word_t = std::uint64_t;

inline constexpr int kWordBits = 64;
inline constexpr int kWordLog = 6;

// Vertices whose coordinate i (i < 6) is zero, within one word.
inline constexpr std::array<word_t, kWordLog> kLowHalf = {
    0x5555555555555555ULL, 0x3333333333333333ULL, 0x0F0F0F0F0F0F0F0FULL,
    0x00FF00FF00FF00FFULL, 0x0000FFFF0000FFFFULL, 0x00000000FFFFFFFFULL,
};

constexpr std::size_t word_count(int n) noexcept {
  return n <= kWordLog ? 1 : (std::size_t{1} << (n - kWordLog));
}

// Valid-bit mask of the last (and for n <= 6, only) word.
constexpr word_t tail_mask(int n) noexcept {
  return n >= kWordLog ? ~word_t{0} : ((word_t{1} << (1u << n)) - 1);
}

constexpr word_t flip_word(word_t w, int i) noexcept {
  const int s = 1 << i;
  const word_t lo = kLowHalf[static_cast<std::size_t>(i)];
  return ((w & lo) << s) | ((w >> s) & lo);
}

// dst[v] = src[v ^ (1 << i)]. dst and src must not alias.
inline void flip_into(std::span<const word_t> src, std::span<word_t> dst,
                      int i) noexcept {
  assert(src.size() == dst.size());
  if (i < kWordLog) {
    for (std::size_t w = 0; w < src.size(); ++w) dst[w] = flip_word(src[w], i);
  } else {
    const std::size_t stride = std::size_t{1} << (i - kWordLog);
    for (std::size_t w = 0; w < src.size(); ++w) dst[w] = src[w ^ stride];
  }
}

// Word w of the mask of vertices whose coordinate i is zero.
constexpr word_t low_half_word(std::size_t w, int i) noexcept {
  if (i < kWordLog) return kLowHalf[static_cast<std::size_t>(i)];
  const std::size_t stride = std::size_t{1} << (i - kWordLog);
  return (w & stride) ? word_t{0} : ~word_t{0};
}

inline int popcount(word_t w) noexcept { return std::popcount(w); }

// Bit-sliced counter: adds 0/1 indicator masks lane-wise, up to 31 per lane.
struct SlicedCounter {
  static constexpr int kSlices = 5;
  std::array<word_t, kSlices> slice{};

  constexpr void add(word_t m) noexcept {
    word_t carry = m;
    for (auto& s : slice) {
      const word_t next = s & carry;
      s ^= carry;
      carry = next;
      if (!carry) break;
    }
  }

  // Lanes whose counter equals v.
  constexpr word_t equals(int v) const noexcept {
    word_t r = ~word_t{0};
    for (int b = 0; b < kSlices; ++b)
      r &= ((v >> b) & 1) ? slice[static_cast<std::size_t>(b)]
                          : ~slice[static_cast<std::size_t>(b)];
    return r;
  }
};

// Histogram over x in `inside` (single word, n <= 6) of the number of
// neighbors of x in `target`. hist must have at least n + 1 entries.
inline void degree_histogram_word(word_t inside, word_t target, int n,
                                  std::span<std::uint32_t> hist) noexcept {
  SlicedCounter c;
  for (int i = 0; i < n; ++i) c.add(flip_word(target, i));
  for (int v = 0; v <= n; ++v)
    hist[static_cast<std::size_t>(v)] =
        static_cast<std::uint32_t>(popcount(inside & c.equals(v)));
}

}  // namespace cubeiso::bits
