// Chain geometry and magnon-sector basis bookkeeping shared across the library.
//
// Sites are numbered 1..N on a periodic ring. The l-magnon sector basis is the
// set of strictly increasing l-tuples of site indices, ordered lexicographically,
// so vectors are comparable across modules.
#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace xxzbath {

// Sentinel accepted by size-parametrised closed forms: evaluate the
// thermodynamic-limit value instead of a finite ring.
inline constexpr int kInfiniteChain = std::numeric_limits<int>::max();

struct ChainSpec {
  int n_sites = 0;     // N >= 2
  double delta = 0.0;  // anisotropy, dimensionless, any finite sign

  void validate() const {
    if (n_sites < 2) throw std::domain_error("ChainSpec: need at least 2 sites");
    if (!(delta == delta) || delta > 1e300 || delta < -1e300)
      throw std::domain_error("ChainSpec: anisotropy must be finite");
  }
};

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// All strictly increasing l-tuples over 1..N in lexicographic order.
inline std::vector<std::vector<int>> sector_basis(int n_sites, int l) {
  if (l < 0 || l > n_sites) throw std::domain_error("sector_basis: magnon number out of range");
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<std::size_t>(binomial(n_sites, l)));
  std::vector<int> cfg(l);
  for (int i = 0; i < l; ++i) cfg[i] = i + 1;
  if (l == 0) {
    out.push_back({});
    return out;
  }
  while (true) {
    out.push_back(cfg);
    int i = l - 1;
    while (i >= 0 && cfg[i] == n_sites - (l - 1 - i)) --i;
    if (i < 0) break;
    ++cfg[i];
    for (int j = i + 1; j < l; ++j) cfg[j] = cfg[j - 1] + 1;
  }
  return out;
}

// Index of the pair (x1 < x2), both 1-based, in the lexicographic 2-magnon basis.
inline int pair_index(int n_sites, int x1, int x2) {
  // pairs starting at 1..x1-1 come first: sum_{a<x1} (N-a)
  const std::int64_t before = static_cast<std::int64_t>(x1 - 1) * n_sites -
                              static_cast<std::int64_t>(x1 - 1) * x1 / 2;
  return static_cast<int>(before + (x2 - x1 - 1));
}

}  // namespace xxzbath
