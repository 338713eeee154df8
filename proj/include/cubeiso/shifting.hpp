#pragma once

// Monotone compression of partitions (A, B, W).
//
// The c-shift looks at every pair {x, x^c} with x_c = 0 and exchanges the
// labels of x and x^c whenever (x, x^c) is labelled (A,B), (A,W) or (W,B).
// A moves up, B moves down; every pair is handled at once since the pairs
// are disjoint.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cubeiso/cube.hpp"

namespace cubeiso {

struct ShiftStep {
  int coord;
  std::uint64_t swaps;

  friend bool operator==(const ShiftStep&, const ShiftStep&) = default;
};

struct ShiftTrace {
  std::vector<ShiftStep> steps;
  Partition initial;
  Partition final;

  std::uint64_t nontrivial_steps() const {
    std::uint64_t k = 0;
    for (const auto& s : steps) k += s.swaps != 0;
    return k;
  }
};

struct ShiftResult {
  Partition partition;
  std::uint64_t swaps;
};

inline ShiftResult i_shift_counted(const Partition& P, int c) {
  if (c < 0 || c >= P.n()) throw std::out_of_range("shift coordinate outside [0, n)");
  const auto& A = P.A();
  const auto& B = P.B();
  const VertexSet fa = A.flipped(c);
  const VertexSet fb = B.flipped(c);
  const auto aw = A.words();
  const auto bw = B.words();
  const auto faw = fa.words();
  const auto fbw = fb.words();
  const word_t tail = bits::tail_mask(P.n());

  VertexSet S(P.dim());
  auto sw = S.words_mut();
  std::uint64_t swaps = 0;
  for (std::size_t w = 0; w < aw.size(); ++w) {
    const word_t valid = w + 1 == aw.size() ? tail : ~word_t{0};
    const word_t ww = ~(aw[w] | bw[w]) & valid;
    sw[w] = bits::low_half_word(w, c) & ((aw[w] & ~faw[w]) | (ww & fbw[w]));
    swaps += static_cast<std::uint64_t>(bits::popcount(sw[w]));
  }
  if (swaps == 0) return {P, 0};

  const VertexSet moved = S | S.flipped(c);
  VertexSet na = (A - moved) | (fa & moved);
  VertexSet nb = (B - moved) | (fb & moved);
  return {Partition(std::move(na), std::move(nb)), swaps};
}

inline Partition i_shift(const Partition& P, int c) { return i_shift_counted(P, c).partition; }

// sum_{x in A} |x| - sum_{x in B} |x|
inline std::int64_t shift_potential(const Partition& P) {
  std::int64_t total = 0;
  const auto aw = P.A().words();
  const auto bw = P.B().words();
  for (int c = 0; c < P.n(); ++c) {
    for (std::size_t w = 0; w < aw.size(); ++w) {
      const word_t up = ~bits::low_half_word(w, c);
      total += bits::popcount(aw[w] & up);
      total -= bits::popcount(bw[w] & up);
    }
  }
  return total;
}

// Round-robin c = 0..n-1 until a full pass swaps nothing.
inline ShiftTrace compress(const Partition& P) {
  ShiftTrace trace{{}, P, P};
  const std::uint64_t bound = static_cast<std::uint64_t>(P.n()) * P.dim().vertex_count();
  std::uint64_t nontrivial = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int c = 0; c < P.n(); ++c) {
      auto [next, swaps] = i_shift_counted(trace.final, c);
      trace.steps.push_back({c, swaps});
      if (swaps) {
        trace.final = std::move(next);
        changed = true;
        if (++nontrivial > bound) throw std::logic_error("compress exceeded the potential bound");
      }
    }
  }
  return trace;
}

}  // namespace cubeiso
