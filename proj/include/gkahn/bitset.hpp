#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace gkahn {

using Bitset = boost::dynamic_bitset<std::uint64_t>;

/// Indices of the set bits, ascending.
inline std::vector<std::size_t> members(const Bitset& b) {
  std::vector<std::size_t> out;
  out.reserve(b.count());
  for (auto i = b.find_first(); i != Bitset::npos; i = b.find_next(i)) out.push_back(i);
  return out;
}

inline Bitset make_bitset(std::size_t size, const std::vector<std::size_t>& bits) {
  Bitset b(size);
  for (auto i : bits) b.set(i);
  return b;
}

/// Canonical order on event sets: by cardinality, then lexicographically on
/// the ascending member lists.
inline bool canonical_less(const Bitset& a, const Bitset& b) {
  const auto ca = a.count();
  const auto cb = b.count();
  if (ca != cb) return ca < cb;
  auto i = a.find_first();
  auto j = b.find_first();
  while (i != Bitset::npos && j != Bitset::npos) {
    if (i != j) return i < j;
    i = a.find_next(i);
    j = b.find_next(j);
  }
  return false;
}

struct CanonicalLess {
  bool operator()(const Bitset& a, const Bitset& b) const { return canonical_less(a, b); }
};

struct BitsetHash {
  std::size_t operator()(const Bitset& b) const { return boost::hash_value(b); }
};

}  // namespace gkahn
