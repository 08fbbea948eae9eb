#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <utility>

namespace saasim {

/// Identity of a mobile user or an access point, stable over the whole trace.
using node_id = std::uint32_t;

/// Trace time in seconds since trace start.
using seconds = std::int64_t;

/// Index of an aggregation interval [i*len, (i+1)*len).
using interval_index = std::int64_t;

/// Unordered node pair stored with first < second.
struct node_pair {
  node_id first = 0;
  node_id second = 0;

  node_pair() = default;
  node_pair(node_id a, node_id b) : first(a < b ? a : b), second(a < b ? b : a) {}

  bool contains(node_id n) const noexcept { return first == n || second == n; }
  node_id other(node_id n) const noexcept { return n == first ? second : first; }

  friend auto operator<=>(const node_pair&, const node_pair&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const node_pair& p) {
  return os << '{' << p.first << ',' << p.second << '}';
}

} // namespace saasim

template <>
struct std::hash<saasim::node_pair> {
  std::size_t operator()(const saasim::node_pair& p) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{p.first} << 32) | p.second);
  }
};
