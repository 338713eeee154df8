// Swaps m boundary pairs of the half-cube {x_1 = 1} in Q_10 and shows how far
// the recovered subcube drifts as the cross boundary grows.

#include <cstdio>
#include <limits>

#include "cubeiso/cubeiso.hpp"

int main() {
  using namespace cubeiso;
  const CubeDim dim(10);
  const VertexSet half = subcube_set(Subcube(1u, 1u), dim);
  StabilityOptions opt;
  opt.eps_max = std::numeric_limits<double>::infinity();

  std::printf("%3s %10s %10s %10s %s\n", "m", "eps", "symdiff", "exception", "cube");
  for (std::uint32_t m = 0; m <= 8; ++m) {
    VertexSet A = half;
    // vertex 1 + 2j (x_1 = 1) trades places with 2j; picks spread out by 64
    for (std::uint32_t j = 0; j < m; ++j) {
      const std::uint32_t up = 1 + 64 * j + 2 * j;
      A.erase(Vertex{up});
      A.insert(Vertex{up ^ 1u});
    }
    const Partition P(A, A.complement());
    const auto r = recover_subcube(P, 1, opt);
    std::printf("%3u %10.5f %10.5f %10.5f x_%d=%u\n", m, r.min_epsilon, r.symdiff, r.exception_mass,
                r.I.at(0) + 1, r.cube->z ? 1u : 0u);
  }
}
