#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "cskit/random.hpp"

namespace cskit {

// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step; divide by the gcd first
    // so the overflow check is tight.
    std::uint64_t num = n - k + i;
    std::uint64_t den = i;
    const std::uint64_t g1 = std::gcd(result, den);
    result /= g1;
    den /= g1;
    const std::uint64_t g2 = std::gcd(num, den);
    num /= g2;
    den /= g2;
    if (result > kMax / num) return kMax;
    result = result * num / den;
  }
  return result;
}

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t s = a + b;
  return s < a ? std::numeric_limits<std::uint64_t>::max() : s;
}

// Lexicographic k-subsets of {0..n-1}. Usage:
//   Combinations c(n, k);
//   do { use(c.current()); } while (c.next());
class Combinations {
 public:
  Combinations(int n, int k) : n_(n), idx_(static_cast<std::size_t>(k)) {
    std::iota(idx_.begin(), idx_.end(), 0);
  }

  const std::vector<int>& current() const noexcept { return idx_; }

  bool next() {
    const int k = static_cast<int>(idx_.size());
    int i = k - 1;
    while (i >= 0 && idx_[static_cast<std::size_t>(i)] == n_ - k + i) --i;
    if (i < 0) return false;
    ++idx_[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      idx_[static_cast<std::size_t>(j)] = idx_[static_cast<std::size_t>(j - 1)] + 1;
    return true;
  }

 private:
  int n_;
  std::vector<int> idx_;
};

// Uniform k-subset of {0..n-1} without replacement (partial Fisher-Yates),
// returned sorted.
inline std::vector<int> random_subset(int n, int k, Rng& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace cskit
