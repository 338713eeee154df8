// Prints the equality classes of the beta-power inequality for n = 1..4.

#include <cstdio>

#include "cubeiso/cubeiso.hpp"

int main() {
  using namespace cubeiso;
  for (int n = 1; n <= 4; ++n) {
    const auto census = equality_census(n);
    std::printf("n=%d: %zu equality classes\n", n, census.size());
    for (const auto& e : census)
      std::printf("  %-14s |A|=%-3llu %s\n", e.label().c_str(),
                  static_cast<unsigned long long>(e.set.size()), to_hex(e.set).c_str());
  }
}
