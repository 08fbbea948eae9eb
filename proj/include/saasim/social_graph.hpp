#pragma once

// Time-dependent snapshot graph: encounter-ratio social edges plus the
// structural AP edges (user-AP links, per-AP cliques, AP ring).

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "saasim/error.hpp"
#include "saasim/trace.hpp"
#include "saasim/types.hpp"

namespace saasim {

enum class window_mode { growing, sliding };

inline std::string to_string(window_mode m) { return m == window_mode::growing ? "growing" : "sliding"; }

inline double encounter_ratio_growing(const interval_counts& counts, node_id u, node_id v,
                                      interval_index p) {
  node_pair key{u, v};
  std::uint64_t num = 0, den = 0;
  for (interval_index i = 0; i <= p; ++i) {
    const auto& tab = counts.at(i);
    num += tab.count(key);
    den += tab.total;
  }
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

/// Ratio over intervals [p - window, p]; requires p >= window >= 1.
inline double encounter_ratio_sliding(const interval_counts& counts, node_id u, node_id v,
                                      interval_index p, interval_index window) {
  if (window < 1) throw config_error("sliding window must span at least one interval");
  if (p < window)
    throw window_not_ready("sliding window of " + std::to_string(window) +
                           " intervals not ready at interval " + std::to_string(p));
  node_pair key{u, v};
  std::uint64_t num = 0, den = 0;
  for (interval_index i = p - window; i <= p; ++i) {
    const auto& tab = counts.at(i);
    num += tab.count(key);
    den += tab.total;
  }
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

/// Symmetric encounter ratios w_uv at interval t_p; only pairs with contacts are stored.
struct encounter_ratio_table {
  interval_index t_p = 0;
  window_mode mode = window_mode::growing;
  interval_index window = 0; ///< sliding only
  std::map<node_pair, double> w;

  double weight(node_id u, node_id v) const {
    if (u == v) return 0.0;
    auto it = w.find(node_pair{u, v});
    return it == w.end() ? 0.0 : it->second;
  }

  friend bool operator==(const encounter_ratio_table&, const encounter_ratio_table&) = default;
};

namespace detail {

inline encounter_ratio_table ratio_table_over(const interval_counts& counts, interval_index from,
                                              interval_index to) {
  encounter_ratio_table out;
  std::map<node_pair, std::uint64_t> sums;
  std::uint64_t total = 0;
  for (interval_index i = std::max<interval_index>(from, 0); i <= to; ++i) {
    const auto& tab = counts.at(i);
    for (const auto& [p, c] : tab.pairs) sums[p] += c;
    total += tab.total;
  }
  if (total == 0) return out;
  for (const auto& [p, c] : sums)
    out.w.emplace(p, static_cast<double>(c) / static_cast<double>(total));
  return out;
}

} // namespace detail

inline encounter_ratio_table ratio_table_growing(const interval_counts& counts, interval_index p) {
  auto out = detail::ratio_table_over(counts, 0, p);
  out.t_p = p;
  out.mode = window_mode::growing;
  return out;
}

inline encounter_ratio_table ratio_table_sliding(const interval_counts& counts, interval_index p,
                                                 interval_index window) {
  if (window < 1) throw config_error("sliding window must span at least one interval");
  if (p < window)
    throw window_not_ready("sliding window of " + std::to_string(window) +
                           " intervals not ready at interval " + std::to_string(p));
  auto out = detail::ratio_table_over(counts, p - window, p);
  out.t_p = p;
  out.mode = window_mode::sliding;
  out.window = window;
  return out;
}

/// Pairs whose ratio strictly exceeds the median of the positive ratios.
/// The median is the upper middle element for an even population, so at most
/// ceil(n/2) - 1 of n distinct values pass.
inline std::set<node_pair> median_social_edges(const encounter_ratio_table& table) {
  std::vector<double> values;
  values.reserve(table.w.size());
  for (const auto& [p, w] : table.w)
    if (w > 0.0) values.push_back(w);
  std::set<node_pair> edges;
  if (values.empty()) return edges;
  std::sort(values.begin(), values.end());
  const double median = values[values.size() / 2];
  for (const auto& [p, w] : table.w)
    if (w > median) edges.insert(p);
  return edges;
}

struct snapshot_config {
  seconds interval_length = 86400;
  window_mode mode = window_mode::growing;
  interval_index window = 1; ///< intervals, sliding mode only
};

/// G_t. Immutable once built.
struct snapshot_graph {
  seconds time = 0;
  interval_index t = 0;
  ap_designation aps;
  std::set<node_id> nodes;
  std::set<node_pair> social_edges;       ///< user-user, median filtered
  std::map<node_id, node_id> ap_membership; ///< user -> AP whose area contains it
  std::set<node_pair> ap_link_edges;      ///< user-AP
  std::set<node_pair> ap_clique_edges;    ///< user-user within one AP area
  std::set<node_pair> ap_ring_edges;      ///< AP-AP circle
  encounter_ratio_table weights;

  bool is_ap(node_id n) const { return aps.is_ap(n); }

  std::optional<node_id> ap_of(node_id u) const {
    auto it = ap_membership.find(u);
    if (it == ap_membership.end()) return std::nullopt;
    return it->second;
  }

  /// Users currently inside `ap`'s area, ascending.
  std::vector<node_id> ap_members(node_id ap) const {
    std::vector<node_id> out;
    for (const auto& [u, a] : ap_membership)
      if (a == ap) out.push_back(u);
    return out;
  }

  bool has_edge(node_pair p) const {
    return social_edges.contains(p) || ap_link_edges.contains(p) ||
           ap_clique_edges.contains(p) || ap_ring_edges.contains(p);
  }

  /// Union of all edge kinds; repeated edges collapse.
  std::set<node_pair> all_edges() const {
    std::set<node_pair> out = social_edges;
    out.insert(ap_link_edges.begin(), ap_link_edges.end());
    out.insert(ap_clique_edges.begin(), ap_clique_edges.end());
    out.insert(ap_ring_edges.begin(), ap_ring_edges.end());
    return out;
  }

  /// Recomputes the structural AP edges from ap_membership and the ring.
  void rebuild_structural_edges() {
    ap_link_edges.clear();
    ap_clique_edges.clear();
    ap_ring_edges.clear();
    std::map<node_id, std::vector<node_id>> areas;
    for (const auto& [u, a] : ap_membership) {
      ap_link_edges.insert({u, a});
      areas[a].push_back(u);
    }
    for (const auto& [a, users] : areas)
      for (std::size_t i = 0; i < users.size(); ++i)
        for (std::size_t j = i + 1; j < users.size(); ++j) ap_clique_edges.insert({users[i], users[j]});
    const auto& ring = aps.ring;
    if (ring.size() == 2) {
      ap_ring_edges.insert({ring[0], ring[1]});
    } else if (ring.size() >= 3) {
      for (std::size_t i = 0; i < ring.size(); ++i)
        ap_ring_edges.insert({ring[i], ring[(i + 1) % ring.size()]});
    }
  }

  friend bool operator==(const snapshot_graph& x, const snapshot_graph& y) {
    return x.time == y.time && x.t == y.t && x.aps.ring == y.aps.ring && x.nodes == y.nodes &&
           x.social_edges == y.social_edges && x.ap_membership == y.ap_membership &&
           x.ap_link_edges == y.ap_link_edges && x.ap_clique_edges == y.ap_clique_edges &&
           x.ap_ring_edges == y.ap_ring_edges && x.weights == y.weights;
  }
};

/// Consumes a time-ordered trace and produces snapshots at the current time.
/// Contacts touching an AP define area membership and are not counted as
/// social encounters.
class snapshot_builder {
public:
  snapshot_builder(ap_designation aps, snapshot_config cfg) : aps_(std::move(aps)), cfg_(cfg) {
    if (cfg_.interval_length <= 0) throw config_error("interval length must be positive");
    if (cfg_.mode == window_mode::sliding && cfg_.window < 1)
      throw config_error("sliding window must span at least one interval");
    counts_.length = cfg_.interval_length;
    nodes_.insert(aps_.aps.begin(), aps_.aps.end());
  }

  void apply(const contact_event& e) {
    now_ = std::max(now_, e.time);
    nodes_.insert(e.a);
    nodes_.insert(e.b);
    const bool a_ap = aps_.is_ap(e.a), b_ap = aps_.is_ap(e.b);
    if (a_ap && b_ap) return;
    if (a_ap || b_ap) {
      const node_id ap = a_ap ? e.a : e.b;
      const node_id user = a_ap ? e.b : e.a;
      if (e.kind == link_state::up)
        ap_links_[user][ap] = e.time;
      else if (auto it = ap_links_.find(user); it != ap_links_.end()) {
        it->second.erase(ap);
        if (it->second.empty()) ap_links_.erase(it);
      }
      return;
    }
    if (e.kind == link_state::up) counts_.add(e.time, e.pair());
  }

  /// Applies every event with time <= t, starting from `cursor`; returns the new cursor.
  std::size_t advance_to(std::span<const contact_event> events, std::size_t cursor, seconds t) {
    while (cursor < events.size() && events[cursor].time <= t) apply(events[cursor++]);
    now_ = std::max(now_, t);
    return cursor;
  }

  const interval_counts& counts() const noexcept { return counts_; }
  seconds now() const noexcept { return now_; }

  snapshot_graph snapshot() const {
    snapshot_graph g;
    g.time = now_;
    g.t = interval_of(now_, cfg_.interval_length);
    g.aps = aps_;
    g.nodes = nodes_;
    if (cfg_.mode == window_mode::growing || g.t < cfg_.window)
      g.weights = ratio_table_growing(counts_, g.t);
    else
      g.weights = ratio_table_sliding(counts_, g.t, cfg_.window);
    g.weights.mode = cfg_.mode;
    g.weights.window = cfg_.mode == window_mode::sliding ? cfg_.window : 0;
    g.social_edges = median_social_edges(g.weights);
    for (const auto& [user, links] : ap_links_) {
      // The most recently entered area wins; ties go to the lower AP id.
      auto best = links.begin();
      for (auto it = links.begin(); it != links.end(); ++it)
        if (it->second > best->second) best = it;
      g.ap_membership.emplace(user, best->first);
    }
    g.rebuild_structural_edges();
    return g;
  }

private:
  ap_designation aps_;
  snapshot_config cfg_;
  interval_counts counts_;
  std::set<node_id> nodes_;
  std::map<node_id, std::map<node_id, seconds>> ap_links_;
  seconds now_ = 0;
};

/// G_t from the events with time <= t.
inline snapshot_graph build_snapshot(std::span<const contact_event> events, const ap_designation& aps,
                                     const snapshot_config& cfg, seconds t) {
  snapshot_builder b(aps, cfg);
  b.advance_to(events, 0, t);
  return b.snapshot();
}

/// Debug edge list: "u v weight kind", kinds social, ap_link, ap_clique, ap_ring.
inline void write_snapshot_edges(std::ostream& os, const snapshot_graph& g) {
  auto emit = [&](const std::set<node_pair>& edges, const char* kind) {
    for (const auto& p : edges)
      os << p.first << ' ' << p.second << ' ' << g.weights.weight(p.first, p.second) << ' ' << kind
         << '\n';
  };
  emit(g.social_edges, "social");
  emit(g.ap_link_edges, "ap_link");
  emit(g.ap_clique_edges, "ap_clique");
  emit(g.ap_ring_edges, "ap_ring");
}

} // namespace saasim
