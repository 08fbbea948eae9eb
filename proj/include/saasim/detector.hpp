#pragma once

// Overlapping physical-proximity (PP) community detection.

#include <algorithm>
#include <iterator>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "saasim/types.hpp"

namespace saasim {

/// Undirected simple graph; every node is a key, isolated nodes map to {}.
using adjacency = std::map<node_id, std::set<node_id>>;

using member_set = std::vector<node_id>; ///< sorted, unique

inline std::size_t intersection_size(const member_set& a, const member_set& b) {
  std::size_t n = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

inline member_set set_union(const member_set& a, const member_set& b) {
  member_set out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool contains(const member_set& s, node_id n) { return std::binary_search(s.begin(), s.end(), n); }

/// Pluggable PP detector. Implementations must be deterministic and treat
/// connected components independently: the result on a graph must equal the
/// union of the results on its components. Incremental tracking relies on this
/// to re-detect only the components an event touches.
class community_detector {
public:
  virtual ~community_detector() = default;

  /// Overlapping communities, each sorted, the list in ascending lexicographic order.
  virtual std::vector<member_set> detect(const adjacency& g) const = 0;

  /// Whether `candidate` would be admitted into `community`.
  virtual bool admits(const adjacency& g, const member_set& community, node_id candidate) const = 0;
};

/// Seed-triangle growth detector. A candidate joins when its links into the
/// community cover at least tau * (internal density) of the members, with at
/// least two links. Communities overlapping by >= beta of the smaller one are
/// then combined.
class density_detector final : public community_detector {
public:
  struct params {
    double tau = 0.5;
    double beta = 0.6;
    std::size_t min_links = 2;
  };

  density_detector() = default;
  explicit density_detector(params p) : p_(p) {}

  const params& parameters() const noexcept { return p_; }

  static std::size_t links_into(const adjacency& g, const member_set& c, node_id x) {
    auto it = g.find(x);
    if (it == g.end()) return 0;
    std::size_t k = 0;
    for (node_id y : it->second)
      if (contains(c, y)) ++k;
    return k;
  }

  static std::size_t internal_edges(const adjacency& g, const member_set& c) {
    std::size_t twice = 0;
    for (node_id x : c) twice += links_into(g, c, x);
    return twice / 2;
  }

  static double density(std::size_t members, std::size_t edges) {
    if (members < 2) return 0.0;
    return 2.0 * static_cast<double>(edges) / (static_cast<double>(members) * (members - 1));
  }

  bool admits(const adjacency& g, const member_set& c, node_id x) const override {
    if (c.empty() || contains(c, x)) return false;
    return admits_with(links_into(g, c, x), c.size(), internal_edges(g, c));
  }

  std::vector<member_set> detect(const adjacency& g) const override {
    std::vector<member_set> found;
    for (const auto& [a, na] : g) {
      for (auto ib = na.upper_bound(a); ib != na.end(); ++ib) {
        const node_id b = *ib;
        const auto& nb = g.at(b);
        for (auto ic = std::next(ib); ic != na.end(); ++ic) {
          const node_id c = *ic;
          if (!nb.contains(c)) continue;
          bool covered = std::any_of(found.begin(), found.end(), [&](const member_set& s) {
            return contains(s, a) && contains(s, b) && contains(s, c);
          });
          if (!covered) found.push_back(grow(g, {a, b, c}));
        }
      }
    }
    combine_overlapping(found);
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
  }

private:
  bool admits_with(std::size_t links, std::size_t members, std::size_t edges) const {
    if (links < p_.min_links) return false;
    const double conn = static_cast<double>(links) / static_cast<double>(members);
    return conn >= p_.tau * density(members, edges);
  }

  member_set grow(const adjacency& g, member_set c) const {
    std::size_t edges = internal_edges(g, c);
    for (;;) {
      std::set<node_id> frontier;
      for (node_id x : c)
        for (node_id y : g.at(x))
          if (!contains(c, y)) frontier.insert(y);
      node_id best = 0;
      std::size_t best_links = 0;
      for (node_id y : frontier) {
        std::size_t k = links_into(g, c, y);
        if (k > best_links && admits_with(k, c.size(), edges)) {
          best = y;
          best_links = k;
        }
      }
      if (best_links == 0) return c;
      c.insert(std::upper_bound(c.begin(), c.end(), best), best);
      edges += best_links;
    }
  }

  void combine_overlapping(std::vector<member_set>& cs) const {
    bool merged = true;
    while (merged) {
      merged = false;
      for (std::size_t i = 0; i < cs.size() && !merged; ++i) {
        for (std::size_t j = i + 1; j < cs.size(); ++j) {
          const double shared = static_cast<double>(intersection_size(cs[i], cs[j]));
          const double smaller = static_cast<double>(std::min(cs[i].size(), cs[j].size()));
          if (shared / smaller >= p_.beta) {
            cs[i] = set_union(cs[i], cs[j]);
            cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(j));
            merged = true;
            break;
          }
        }
      }
    }
  }

  params p_;
};

} // namespace saasim
