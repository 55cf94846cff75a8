#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace mdsr {

// Saturates at UINT64_MAX instead of overflowing.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  __extension__ using Wide = unsigned __int128;
  Wide r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

// Advances a sorted k-combination of {0..n-1} in lexicographic order.
// Returns false after the last combination.
template <class Vec>
bool next_combination(Vec& comb, std::size_t n) {
  const std::size_t k = comb.size();
  if (k == 0) return false;
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Calls fn(const std::vector<T>&) for each k-subset of items, lexicographic by position.
template <class T, class Fn>
void for_each_subset(const std::vector<T>& items, std::size_t k, Fn&& fn) {
  if (k > items.size()) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<T> cur(k);
  do {
    for (std::size_t i = 0; i < k; ++i) cur[i] = items[idx[i]];
    fn(static_cast<const std::vector<T>&>(cur));
  } while (next_combination(idx, items.size()));
}

}  // namespace mdsr
