#pragma once

// Space-crossing community detection: PP and AP communities combined by the
// overlap criterion (S^a) and the AP ring criterion (S^b), with incremental
// tracking of node/edge changes.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "saasim/detector.hpp"
#include "saasim/error.hpp"
#include "saasim/social_graph.hpp"
#include "saasim/types.hpp"

namespace saasim {

enum class community_kind { pp, ap, sc };

inline const char* to_string(community_kind k) {
  switch (k) {
  case community_kind::pp: return "PP";
  case community_kind::ap: return "AP";
  default: return "SC";
  }
}

using edge_list = std::vector<node_pair>; ///< sorted, unique

struct community {
  std::uint64_t id = 0;
  community_kind kind = community_kind::pp;
  member_set members;
  edge_list intra_edges;
  std::vector<node_id> anchor_aps; ///< sorted; empty unless derived from an AP community
  std::vector<member_set> pp_sources; ///< member sets of the PP communities combined into this one

  bool has_pp() const noexcept { return !pp_sources.empty(); }
  bool has_ap() const noexcept { return !anchor_aps.empty(); }
  bool contains(node_id n) const { return saasim::contains(members, n); }
};

/// Which communities the forwarding layer sees.
enum class sc_pipeline {
  space_crossing, ///< PP + AP communities combined by S^a and S^b
  pp_only,        ///< detector output alone; no AP communities
};

inline std::string to_string(sc_pipeline p) {
  return p == sc_pipeline::space_crossing ? "space_crossing" : "pp_only";
}

// ---------------------------------------------------------------------------
// Building blocks

/// Social edges among users (AP nodes excluded). Every user is a key.
inline adjacency social_adjacency(const snapshot_graph& g) {
  adjacency adj;
  for (node_id n : g.nodes)
    if (!g.is_ap(n)) adj[n];
  for (const auto& e : g.social_edges) {
    if (g.is_ap(e.first) || g.is_ap(e.second)) continue;
    adj[e.first].insert(e.second);
    adj[e.second].insert(e.first);
  }
  return adj;
}

/// Edges of the snapshot (all kinds) with both endpoints in `members`.
inline edge_list induced_edges(const member_set& members, const snapshot_graph& g) {
  edge_list out;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      node_pair p{members[i], members[j]};
      if (g.has_edge(p)) out.push_back(p);
    }
  return out;
}

inline std::size_t intersection_size(const edge_list& a, const edge_list& b) {
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

inline community make_pp(member_set members, const snapshot_graph& g) {
  community c;
  c.kind = community_kind::pp;
  c.intra_edges = induced_edges(members, g);
  c.pp_sources = {members};
  c.members = std::move(members);
  return c;
}

inline community make_ap(node_id ap, const snapshot_graph& g) {
  community c;
  c.id = ap;
  c.kind = community_kind::ap;
  c.members = g.ap_members(ap);
  c.members.insert(std::upper_bound(c.members.begin(), c.members.end(), ap), ap);
  c.intra_edges = induced_edges(c.members, g);
  c.anchor_aps = {ap};
  return c;
}

/// Detector output restricted to `users`, as PP communities.
inline std::vector<community> detect_pp_in(const snapshot_graph& g, const adjacency& adj,
                                           const community_detector& det) {
  std::vector<community> out;
  for (auto& m : det.detect(adj)) out.push_back(make_pp(std::move(m), g));
  return out;
}

inline void number_pp(std::vector<community>& pp) {
  std::sort(pp.begin(), pp.end(),
            [](const community& a, const community& b) { return a.members < b.members; });
  std::uint64_t id = 1;
  for (auto& c : pp) c.id = id++;
}

/// PP communities over the social edges among non-AP nodes.
inline std::vector<community> detect_pp(const snapshot_graph& g, const community_detector& det) {
  auto pp = detect_pp_in(g, social_adjacency(g), det);
  number_pp(pp);
  return pp;
}

/// One community per AP: the AP plus the users inside its area.
inline std::vector<community> build_ap_communities(const snapshot_graph& g) {
  std::vector<community> out;
  for (node_id ap : g.aps.aps) out.push_back(make_ap(ap, g));
  return out;
}

/// Drops PP communities whose members all carry an AP mark.
inline std::vector<community> absorb_marked_pp(std::vector<community> pp,
                                               const std::vector<community>& ap_list) {
  std::set<node_id> marked;
  for (const auto& a : ap_list)
    for (node_id n : a.members)
      if (!std::binary_search(a.anchor_aps.begin(), a.anchor_aps.end(), n)) marked.insert(n);
  std::erase_if(pp, [&](const community& c) {
    return std::all_of(c.members.begin(), c.members.end(),
                       [&](node_id n) { return marked.contains(n); });
  });
  return pp;
}

/// Shared intra edges over the smaller edge count plus shared members over the
/// smaller member count; a term with a zero denominator is 0. Range [0, 2].
inline double shared_substructure(const community& a, const community& b) {
  double score = 0.0;
  const auto min_edges = std::min(a.intra_edges.size(), b.intra_edges.size());
  if (min_edges > 0)
    score += static_cast<double>(intersection_size(a.intra_edges, b.intra_edges)) /
             static_cast<double>(min_edges);
  const auto min_members = std::min(a.members.size(), b.members.size());
  if (min_members > 0)
    score += static_cast<double>(intersection_size(a.members, b.members)) /
             static_cast<double>(min_members);
  return score;
}

inline void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 2.0))
    throw config_error("alpha must lie in [0, 2], got " + std::to_string(alpha));
}

inline community merge_communities(const community& a, const community& b) {
  community m;
  m.id = a.id;
  m.kind = community_kind::sc;
  m.members = set_union(a.members, b.members);
  std::set_union(a.intra_edges.begin(), a.intra_edges.end(), b.intra_edges.begin(),
                 b.intra_edges.end(), std::back_inserter(m.intra_edges));
  std::set_union(a.anchor_aps.begin(), a.anchor_aps.end(), b.anchor_aps.begin(),
                 b.anchor_aps.end(), std::back_inserter(m.anchor_aps));
  m.pp_sources = a.pp_sources;
  m.pp_sources.insert(m.pp_sources.end(), b.pp_sources.begin(), b.pp_sources.end());
  std::sort(m.pp_sources.begin(), m.pp_sources.end());
  return m;
}

/// A PP-derived and an AP-derived community that share at least one member.
inline bool s_a_candidates(const community& x, const community& y) {
  const bool cross = (x.has_pp() && y.has_ap()) || (x.has_ap() && y.has_pp());
  return cross && intersection_size(x.members, y.members) > 0;
}

/// Criterion S^a: merges PP/AP pairs whose shared substructure exceeds alpha,
/// to a fixpoint. The first qualifying pair in list order (PP list, then AP
/// list) merges first; merged communities become SC.
inline std::vector<community> combine_s_a(std::vector<community> pp, std::vector<community> ap,
                                          double alpha) {
  check_alpha(alpha);
  std::vector<community> list = std::move(pp);
  list.insert(list.end(), std::make_move_iterator(ap.begin()), std::make_move_iterator(ap.end()));
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < list.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j)
        if (s_a_candidates(list[i], list[j]) && shared_substructure(list[i], list[j]) > alpha) {
          list[i] = merge_communities(list[i], list[j]);
          list.erase(list.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
          break;
        }
  }
  return list;
}

/// Orders by member set and folds duplicate member sets together.
inline std::vector<community> canonicalize(std::vector<community> list) {
  std::sort(list.begin(), list.end(),
            [](const community& a, const community& b) { return a.members < b.members; });
  std::vector<community> out;
  for (auto& c : list) {
    if (!out.empty() && out.back().members == c.members)
      out.back() = merge_communities(out.back(), c);
    else
      out.push_back(std::move(c));
  }
  return out;
}

/// Criterion S^b: one community per ring adjacency, the union of the
/// communities anchored at the two APs. Runs once; communities without an
/// anchor pass through. With a single AP the list is unchanged.
inline std::vector<community> combine_s_b(const std::vector<community>& list,
                                          const std::vector<node_id>& ring) {
  if (ring.size() <= 1) return canonicalize(list);
  auto anchored = [&](node_id ap) -> const community* {
    for (const auto& c : list)
      if (std::binary_search(c.anchor_aps.begin(), c.anchor_aps.end(), ap)) return &c;
    return nullptr;
  };
  std::vector<std::pair<node_id, node_id>> adjacent;
  if (ring.size() == 2)
    adjacent.emplace_back(ring[0], ring[1]);
  else
    for (std::size_t i = 0; i < ring.size(); ++i) adjacent.emplace_back(ring[i], ring[(i + 1) % ring.size()]);

  std::vector<community> out;
  for (const auto& c : list)
    if (!c.has_ap()) out.push_back(c);
  for (const auto& [x, y] : adjacent) {
    const community* cx = anchored(x);
    const community* cy = anchored(y);
    if (!cx || !cy) continue;
    community u = cx == cy ? *cx : merge_communities(*cx, *cy);
    u.kind = community_kind::sc;
    out.push_back(std::move(u));
  }
  return canonicalize(std::move(out));
}

// ---------------------------------------------------------------------------
// Registry

struct community_registry {
  interval_index t = 0;
  seconds time = 0;
  sc_pipeline pipeline = sc_pipeline::space_crossing;
  std::vector<community> pp;     ///< detector output
  std::vector<community> ap;     ///< one per AP (space_crossing only)
  std::vector<community> merged; ///< after S^a
  std::vector<community> sc;     ///< final, ordered by member set
  std::map<node_id, std::vector<std::uint64_t>> membership_index;
  std::uint64_t next_id = 1;

  std::vector<std::uint64_t> sc_of(node_id n) const {
    auto it = membership_index.find(n);
    return it == membership_index.end() ? std::vector<std::uint64_t>{} : it->second;
  }

  const community* ap_community(node_id ap) const {
    for (const auto& c : this->ap)
      if (c.anchor_aps.size() == 1 && c.anchor_aps.front() == ap) return &c;
    return nullptr;
  }

  /// SC member sets, for comparisons that ignore ids.
  std::vector<member_set> sc_member_sets() const {
    std::vector<member_set> out;
    for (const auto& c : sc) out.push_back(c.members);
    return out;
  }
};

/// Issues SC ids: a community keeps a predecessor's id when they share more
/// than half of the larger member set; otherwise it gets a fresh id.
inline void assign_sc_ids(const std::vector<community>& previous, std::vector<community>& next,
                          std::uint64_t& next_id) {
  std::set<std::uint64_t> claimed;
  for (auto& c : next) {
    const community* best = nullptr;
    std::size_t best_shared = 0;
    for (const auto& p : previous) {
      if (claimed.contains(p.id)) continue;
      const auto shared = intersection_size(c.members, p.members);
      if (2 * shared > std::max(c.members.size(), p.members.size()) && shared > best_shared) {
        best = &p;
        best_shared = shared;
      }
    }
    if (best) {
      c.id = best->id;
      claimed.insert(best->id);
    } else {
      c.id = next_id++;
    }
  }
}

namespace detail {

inline void finish_registry(community_registry& reg, const std::vector<node_id>& ring,
                            const std::vector<community>* previous_sc) {
  std::vector<community> sc;
  if (reg.pipeline == sc_pipeline::space_crossing)
    sc = combine_s_b(reg.merged, ring);
  else
    sc = canonicalize(reg.merged);
  for (auto& c : sc) c.kind = community_kind::sc;
  static const std::vector<community> none;
  assign_sc_ids(previous_sc ? *previous_sc : none, sc, reg.next_id);
  reg.sc = std::move(sc);
  reg.membership_index.clear();
  for (const auto& c : reg.sc)
    for (node_id n : c.members) reg.membership_index[n].push_back(c.id);
}

inline std::vector<community> pp_for_combination(const community_registry& reg) {
  return absorb_marked_pp(reg.pp, reg.ap);
}

} // namespace detail

/// Full pipeline on one snapshot: detect PP, build AP communities, absorb
/// fully marked PP communities, S^a, S^b. Unmerged communities pass through as SC.
inline community_registry initialize_sc(const snapshot_graph& g, double alpha,
                                        const community_detector& det,
                                        sc_pipeline pipeline = sc_pipeline::space_crossing) {
  check_alpha(alpha);
  community_registry reg;
  reg.t = g.t;
  reg.time = g.time;
  reg.pipeline = pipeline;
  reg.pp = detect_pp(g, det);
  if (pipeline == sc_pipeline::space_crossing) {
    reg.ap = build_ap_communities(g);
    reg.merged = combine_s_a(detail::pp_for_combination(reg), reg.ap, alpha);
  } else {
    reg.merged = reg.pp;
  }
  detail::finish_registry(reg, g.aps.ring, nullptr);
  return reg;
}

/// Rebuilds from scratch and carries SC ids over from `previous`.
inline community_registry refresh_sc(const community_registry& previous, const snapshot_graph& g,
                                     double alpha, const community_detector& det) {
  community_registry reg = initialize_sc(g, alpha, det, previous.pipeline);
  reg.next_id = previous.next_id;
  detail::finish_registry(reg, g.aps.ring, &previous.sc);
  return reg;
}

/// "# t=<interval>" followed by "SC <id> : <members>" per community.
inline void write_registry(std::ostream& os, const community_registry& reg) {
  os << "# t=" << reg.t << '\n';
  for (const auto& c : reg.sc) {
    os << "SC " << c.id << " :";
    for (node_id n : c.members) os << ' ' << n;
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Dynamic tracking

enum class change_kind { add_node, remove_node, add_edge, remove_edge };

struct change_event {
  change_kind kind = change_kind::add_node;
  node_id node = 0;                ///< add_node / remove_node
  node_pair edge;                  ///< add_edge / remove_edge; a user-AP edge is area entry/exit
  std::vector<node_id> neighbors;  ///< add_node: social links arriving with the node
  std::optional<node_id> ap;       ///< add_node: AP area the node appears in
  interval_index t = 0;

  static change_event add_node(node_id n, std::vector<node_id> neighbors = {},
                               std::optional<node_id> ap = std::nullopt) {
    change_event e;
    e.kind = change_kind::add_node;
    e.node = n;
    e.neighbors = std::move(neighbors);
    e.ap = ap;
    return e;
  }
  static change_event remove_node(node_id n) {
    change_event e;
    e.kind = change_kind::remove_node;
    e.node = n;
    return e;
  }
  static change_event add_edge(node_id u, node_id v) {
    change_event e;
    e.kind = change_kind::add_edge;
    e.edge = {u, v};
    return e;
  }
  static change_event remove_edge(node_id u, node_id v) {
    change_event e;
    e.kind = change_kind::remove_edge;
    e.edge = {u, v};
    return e;
  }
};

/// Applies `ev` to the graph. Throws state_error when the event does not fit
/// (removing something absent, adding something present, touching AP nodes
/// or the AP ring).
inline snapshot_graph apply_change(snapshot_graph g, const change_event& ev) {
  auto require_user = [&](node_id n) {
    if (!g.nodes.contains(n)) throw state_error("node " + std::to_string(n) + " does not exist");
    if (g.is_ap(n)) throw state_error("node " + std::to_string(n) + " is an access point");
  };
  switch (ev.kind) {
  case change_kind::add_node: {
    if (g.nodes.contains(ev.node)) throw state_error("node " + std::to_string(ev.node) + " already exists");
    if (g.is_ap(ev.node)) throw state_error("access points cannot be added");
    for (node_id n : ev.neighbors) require_user(n);
    if (ev.ap && !g.is_ap(*ev.ap)) throw state_error(std::to_string(*ev.ap) + " is not an access point");
    g.nodes.insert(ev.node);
    for (node_id n : ev.neighbors) g.social_edges.insert({ev.node, n});
    if (ev.ap) g.ap_membership[ev.node] = *ev.ap;
    break;
  }
  case change_kind::remove_node: {
    require_user(ev.node);
    g.nodes.erase(ev.node);
    std::erase_if(g.social_edges, [&](const node_pair& p) { return p.contains(ev.node); });
    g.ap_membership.erase(ev.node);
    break;
  }
  case change_kind::add_edge:
  case change_kind::remove_edge: {
    const auto [u, v] = ev.edge;
    if (u == v) throw state_error("self loop");
    for (node_id n : {u, v})
      if (!g.nodes.contains(n)) throw state_error("node " + std::to_string(n) + " does not exist");
    const bool u_ap = g.is_ap(u), v_ap = g.is_ap(v);
    if (u_ap && v_ap) throw state_error("the AP ring is fixed");
    const bool adding = ev.kind == change_kind::add_edge;
    if (u_ap || v_ap) {
      const node_id ap = u_ap ? u : v, user = u_ap ? v : u;
      auto it = g.ap_membership.find(user);
      if (adding) {
        if (it != g.ap_membership.end())
          throw state_error("user " + std::to_string(user) + " is already inside an AP area");
        g.ap_membership[user] = ap;
      } else {
        if (it == g.ap_membership.end() || it->second != ap)
          throw state_error("user " + std::to_string(user) + " is not inside AP " + std::to_string(ap));
        g.ap_membership.erase(it);
      }
    } else if (adding) {
      if (!g.social_edges.insert(ev.edge).second)
        throw state_error("edge already exists");
    } else if (g.social_edges.erase(ev.edge) == 0) {
      throw state_error("edge does not exist");
    }
    break;
  }
  }
  g.t = ev.t;
  g.rebuild_structural_edges();
  return g;
}

namespace detail {

inline void component_of(const adjacency& adj, node_id start, std::set<node_id>& out) {
  if (!adj.contains(start) || out.contains(start)) return;
  std::vector<node_id> stack{start};
  out.insert(start);
  while (!stack.empty()) {
    node_id x = stack.back();
    stack.pop_back();
    for (node_id y : adj.at(x))
      if (out.insert(y).second) stack.push_back(y);
  }
}

inline bool overlaps(const member_set& m, const std::set<node_id>& s) {
  return std::any_of(m.begin(), m.end(), [&](node_id n) { return s.contains(n); });
}

} // namespace detail

/// Updates `reg` (current for `before`) for one change event. Only the social
/// components the event touches are re-detected, and only the overlap
/// clusters of changed PP/AP communities are recombined by S^a (criterion S^c);
/// S^b is then re-run over the ring. SC ids carry over by member overlap.
inline community_registry handle_change(const community_registry& reg, const snapshot_graph& before,
                                        const change_event& ev, double alpha,
                                        const community_detector& det) {
  check_alpha(alpha);
  const snapshot_graph after = apply_change(before, ev);

  // Nodes whose neighbourhood, intra edges or AP mark changed.
  std::set<node_id> touched;
  switch (ev.kind) {
  case change_kind::add_node:
    touched.insert(ev.node);
    touched.insert(ev.neighbors.begin(), ev.neighbors.end());
    break;
  case change_kind::remove_node:
    touched.insert(ev.node);
    for (const auto& p : before.social_edges)
      if (p.contains(ev.node)) touched.insert(p.other(ev.node));
    break;
  default:
    touched.insert(ev.edge.first);
    touched.insert(ev.edge.second);
  }
  std::set<node_id> affected_aps;
  for (const snapshot_graph* g : {&before, &after})
    for (node_id n : std::set<node_id>(touched)) {
      if (g->is_ap(n)) affected_aps.insert(n);
      if (auto a = g->ap_of(n)) affected_aps.insert(*a);
    }
  for (node_id a : affected_aps) {
    for (node_id n : before.ap_members(a)) touched.insert(n);
    for (node_id n : after.ap_members(a)) touched.insert(n);
  }

  // Region to re-detect: whole social components holding touched users, old and new.
  const adjacency adj_before = social_adjacency(before);
  const adjacency adj_after = social_adjacency(after);
  std::set<node_id> region;
  for (node_id n : touched) {
    detail::component_of(adj_before, n, region);
    detail::component_of(adj_after, n, region);
  }

  community_registry out;
  out.t = after.t;
  out.time = after.time;
  out.pipeline = reg.pipeline;
  out.next_id = reg.next_id;

  std::vector<community> removed_pp, added_pp;
  for (const auto& c : reg.pp) {
    if (detail::overlaps(c.members, region))
      removed_pp.push_back(c);
    else
      out.pp.push_back(c);
  }
  adjacency local;
  for (node_id n : region)
    if (auto it = adj_after.find(n); it != adj_after.end()) local.insert(*it);
  added_pp = detect_pp_in(after, local, det);
  out.pp.insert(out.pp.end(), added_pp.begin(), added_pp.end());
  number_pp(out.pp);

  if (reg.pipeline == sc_pipeline::pp_only) {
    out.merged = out.pp;
    detail::finish_registry(out, after.aps.ring, &reg.sc);
    return out;
  }

  for (const auto& c : reg.ap) {
    if (affected_aps.contains(c.anchor_aps.front()))
      out.ap.push_back(make_ap(c.anchor_aps.front(), after));
    else
      out.ap.push_back(c);
  }

  // Origins to recombine: new PP communities and rebuilt AP communities, plus
  // every origin of an S^a group that lost one of its origins.
  std::set<member_set> removed_keys;
  for (const auto& c : removed_pp) removed_keys.insert(c.members);
  std::set<member_set> pp_keys;
  std::set<node_id> ap_keys(affected_aps.begin(), affected_aps.end());
  const auto absorbed_pp = detail::pp_for_combination(out);
  std::set<member_set> live_pp;
  for (const auto& c : absorbed_pp) live_pp.insert(c.members);
  for (const auto& c : added_pp)
    if (live_pp.contains(c.members)) pp_keys.insert(c.members);

  std::vector<bool> collected(reg.merged.size(), false);
  auto collect = [&](std::size_t i) {
    collected[i] = true;
    for (const auto& src : reg.merged[i].pp_sources)
      if (!removed_keys.contains(src) && live_pp.contains(src)) pp_keys.insert(src);
    for (node_id a : reg.merged[i].anchor_aps) ap_keys.insert(a);
  };
  for (std::size_t i = 0; i < reg.merged.size(); ++i) {
    const auto& m = reg.merged[i];
    bool broken = std::any_of(m.pp_sources.begin(), m.pp_sources.end(),
                              [&](const member_set& s) { return removed_keys.contains(s) || !live_pp.contains(s); }) ||
                  std::any_of(m.anchor_aps.begin(), m.anchor_aps.end(),
                              [&](node_id a) { return affected_aps.contains(a); });
    if (broken) collect(i);
  }
  // Close over S^a groups that overlap anything being recombined.
  for (bool grew = true; grew;) {
    grew = false;
    std::set<node_id> cluster;
    for (const auto& c : absorbed_pp)
      if (pp_keys.contains(c.members)) cluster.insert(c.members.begin(), c.members.end());
    for (const auto& c : out.ap)
      if (ap_keys.contains(c.anchor_aps.front())) cluster.insert(c.members.begin(), c.members.end());
    for (std::size_t i = 0; i < reg.merged.size(); ++i)
      if (!collected[i] && detail::overlaps(reg.merged[i].members, cluster)) {
        collect(i);
        grew = true;
      }
  }

  std::vector<community> pp_in, ap_in;
  for (const auto& c : absorbed_pp)
    if (pp_keys.contains(c.members)) pp_in.push_back(c);
  for (const auto& c : out.ap)
    if (ap_keys.contains(c.anchor_aps.front())) ap_in.push_back(c);
  for (std::size_t i = 0; i < reg.merged.size(); ++i)
    if (!collected[i]) out.merged.push_back(reg.merged[i]);
  auto recombined = combine_s_a(std::move(pp_in), std::move(ap_in), alpha);
  out.merged.insert(out.merged.end(), recombined.begin(), recombined.end());

  detail::finish_registry(out, after.aps.ring, &reg.sc);
  return out;
}

/// Owns a graph and its registry and keeps them in step under change events.
class community_tracker {
public:
  community_tracker(snapshot_graph g, double alpha, const community_detector& det,
                    sc_pipeline pipeline = sc_pipeline::space_crossing)
      : graph_(std::move(g)), alpha_(alpha), det_(&det),
        reg_(initialize_sc(graph_, alpha, det, pipeline)) {}

  void apply(const change_event& ev) {
    auto next = handle_change(reg_, graph_, ev, alpha_, *det_);
    graph_ = apply_change(std::move(graph_), ev);
    reg_ = std::move(next);
  }

  const snapshot_graph& graph() const noexcept { return graph_; }
  const community_registry& registry() const noexcept { return reg_; }

private:
  snapshot_graph graph_;
  double alpha_;
  const community_detector* det_;
  community_registry reg_;
};

/// Change events turning `from` into `to` (same AP designation): node
/// additions, then edge and area removals, then additions, then node removals.
inline std::vector<change_event> diff_snapshots(const snapshot_graph& from, const snapshot_graph& to) {
  std::vector<change_event> out;
  for (node_id n : to.nodes)
    if (!from.nodes.contains(n) && !to.is_ap(n)) out.push_back(change_event::add_node(n));
  for (const auto& [u, a] : from.ap_membership) {
    auto it = to.ap_membership.find(u);
    if ((it == to.ap_membership.end() || it->second != a) && to.nodes.contains(u))
      out.push_back(change_event::remove_edge(u, a));
  }
  for (const auto& e : from.social_edges)
    if (!to.social_edges.contains(e) && to.nodes.contains(e.first) && to.nodes.contains(e.second))
      out.push_back(change_event::remove_edge(e.first, e.second));
  for (const auto& e : to.social_edges)
    if (!from.social_edges.contains(e)) out.push_back(change_event::add_edge(e.first, e.second));
  for (const auto& [u, a] : to.ap_membership) {
    auto it = from.ap_membership.find(u);
    if (it == from.ap_membership.end() || it->second != a) out.push_back(change_event::add_edge(u, a));
  }
  for (node_id n : from.nodes)
    if (!to.nodes.contains(n) && !from.is_ap(n)) out.push_back(change_event::remove_node(n));
  for (auto& e : out) e.t = to.t;
  return out;
}

} // namespace saasim
