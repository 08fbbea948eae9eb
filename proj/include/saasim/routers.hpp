#pragma once

// Forwarding decisions: SAAS, Bubble Rap, Nguyen's routing, epidemic and
// direct delivery.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "saasim/centrality.hpp"
#include "saasim/community.hpp"
#include "saasim/error.hpp"
#include "saasim/social_metrics.hpp"

namespace saasim {

struct message {
  std::uint64_t id = 0;
  node_id src = 0;
  node_id dst = 0;
  std::uint32_t size = 0; ///< bytes
  seconds created = 0;
  seconds ttl = 0;

  /// Alive while younger than its TTL; a zero TTL never delivers.
  bool alive_at(seconds now) const noexcept { return now - created < ttl; }
};

enum class router_action { hold, forward_and_drop, replicate };

struct router_decision {
  router_action action = router_action::hold;
  std::vector<node_id> targets;

  static router_decision hold() { return {}; }
  static router_decision forward(node_id to) { return {router_action::forward_and_drop, {to}}; }
  static router_decision replicate(std::vector<node_id> to) {
    if (to.empty()) return {};
    return {router_action::replicate, std::move(to)};
  }
};

/// Community knowledge published at one registry refresh. Immutable.
struct routing_context {
  interval_index t = 0;
  std::vector<member_set> sc;                      ///< registry order
  std::map<node_id, std::vector<double>> activity; ///< dense activity vectors
  std::set<node_id> ap_communities;                ///< APs with an AP community in the registry
  std::vector<member_set> pp;                      ///< PP communities (Bubble Rap, Nguyen)
  std::map<node_id, double> global_centrality;
  std::vector<std::map<node_id, double>> local_centrality; ///< per pp entry

  const std::vector<double>* activity_of(node_id n) const {
    auto it = activity.find(n);
    return it == activity.end() ? nullptr : &it->second;
  }

  /// Pearson social similarity; a node outside every SC has a constant zero vector.
  double similarity(node_id a, node_id b) const {
    const auto* va = activity_of(a);
    const auto* vb = activity_of(b);
    if (!va || !vb) return 0.0;
    return pearson(*va, *vb);
  }

  std::size_t common_pp(node_id a, node_id b) const {
    std::size_t n = 0;
    for (const auto& c : pp)
      if (contains(c, a) && contains(c, b)) ++n;
    return n;
  }

  double global_rank(node_id n) const {
    auto it = global_centrality.find(n);
    return it == global_centrality.end() ? 0.0 : it->second;
  }

  /// Local centrality of `n` in the destination's community; -1 outside it.
  double local_rank(node_id n, node_id dst) const {
    double best = -1.0;
    for (std::size_t i = 0; i < pp.size(); ++i)
      if (contains(pp[i], n) && contains(pp[i], dst)) {
        auto it = local_centrality[i].find(n);
        best = std::max(best, it == local_centrality[i].end() ? 0.0 : it->second);
      }
    return best;
  }
};

inline routing_context make_routing_context(const community_registry& reg, const snapshot_graph& g,
                                            bool with_centrality = true) {
  routing_context ctx;
  ctx.t = reg.t;
  const std::size_t k = reg.sc.size();
  for (std::size_t i = 0; i < k; ++i) {
    ctx.sc.push_back(reg.sc[i].members);
    for (const auto& [n, a] : community_activities(reg.sc[i], g.weights)) {
      auto& v = ctx.activity[n];
      if (v.empty()) v.assign(k, 0.0);
      v[i] = a;
    }
  }
  for (const auto& c : reg.ap) ctx.ap_communities.insert(c.anchor_aps.front());
  for (const auto& c : reg.pp) ctx.pp.push_back(c.members);
  if (with_centrality) {
    const adjacency adj = social_adjacency(g);
    ctx.global_centrality = betweenness_centrality(adj);
    for (const auto& c : ctx.pp) ctx.local_centrality.push_back(betweenness_centrality(induced_subgraph(adj, c)));
  } else {
    ctx.local_centrality.resize(ctx.pp.size());
  }
  return ctx;
}

/// Live connectivity as seen by a router.
class contact_state {
public:
  virtual ~contact_state() = default;
  virtual bool is_ap(node_id n) const = 0;
  virtual bool has_copy(node_id n, std::uint64_t msg) const = 0;
  /// AP whose area currently contains `user`.
  virtual std::optional<node_id> area_of(node_id user) const = 0;
  /// Users currently inside `ap`'s area, ascending.
  virtual std::vector<node_id> area_members(node_id ap) const = 0;
};

class router {
public:
  virtual ~router() = default;
  virtual std::string name() const = 0;
  /// Decision for `holder`'s copy of `m` on meeting `encountered` (a user, or
  /// an AP when the holder reaches the rest of an area through it).
  virtual router_decision decide(node_id holder, node_id encountered, const message& m,
                                 const routing_context& ctx, const contact_state& live) const = 0;
};

namespace detail {

inline std::vector<node_id> area_targets(node_id ap, node_id holder, const message& m,
                                         const contact_state& live) {
  std::vector<node_id> out;
  for (node_id n : live.area_members(ap))
    if (n != holder && !live.has_copy(n, m.id)) out.push_back(n);
  return out;
}

} // namespace detail

/// Similarity attraction outside AP communities, copy spreading inside them.
class saas_router final : public router {
public:
  std::string name() const override { return "saas"; }

  router_decision decide(node_id holder, node_id encountered, const message& m,
                         const routing_context& ctx, const contact_state& live) const override {
    if (encountered == m.dst) return router_decision::forward(encountered);
    if (auto ap = live.area_of(holder); ap && ctx.ap_communities.contains(*ap))
      return router_decision::replicate(detail::area_targets(*ap, holder, m, live));
    if (live.is_ap(encountered) || live.has_copy(encountered, m.id)) return router_decision::hold();
    if (ctx.similarity(encountered, m.dst) > ctx.similarity(holder, m.dst))
      return router_decision::forward(encountered);
    return router_decision::hold();
  }
};

/// Global-centrality bubbling until the destination's community, then local centrality.
class bubble_rap_router final : public router {
public:
  std::string name() const override { return "bubble_rap"; }

  router_decision decide(node_id holder, node_id encountered, const message& m,
                         const routing_context& ctx, const contact_state& live) const override {
    if (encountered == m.dst) return router_decision::forward(encountered);
    if (live.is_ap(encountered) || live.has_copy(encountered, m.id)) return router_decision::hold();
    const bool enc_inside = ctx.common_pp(encountered, m.dst) > 0;
    if (ctx.common_pp(holder, m.dst) == 0) {
      if (enc_inside || ctx.global_rank(encountered) > ctx.global_rank(holder))
        return router_decision::forward(encountered);
      return router_decision::hold();
    }
    if (enc_inside && ctx.local_rank(encountered, m.dst) > ctx.local_rank(holder, m.dst))
      return router_decision::forward(encountered);
    return router_decision::hold();
  }
};

/// Forward to nodes sharing more communities with the destination.
class nguyen_router final : public router {
public:
  std::string name() const override { return "nguyen"; }

  router_decision decide(node_id holder, node_id encountered, const message& m,
                         const routing_context& ctx, const contact_state& live) const override {
    if (encountered == m.dst) return router_decision::forward(encountered);
    if (live.is_ap(encountered) || live.has_copy(encountered, m.id)) return router_decision::hold();
    if (ctx.common_pp(encountered, m.dst) > ctx.common_pp(holder, m.dst))
      return router_decision::forward(encountered);
    return router_decision::hold();
  }
};

/// Copies to everyone reachable; an AP relays to its whole area.
class epidemic_router final : public router {
public:
  std::string name() const override { return "epidemic"; }

  router_decision decide(node_id holder, node_id encountered, const message& m,
                         const routing_context&, const contact_state& live) const override {
    if (encountered == m.dst) return router_decision::forward(encountered);
    if (live.is_ap(encountered))
      return router_decision::replicate(detail::area_targets(encountered, holder, m, live));
    if (live.has_copy(encountered, m.id)) return router_decision::hold();
    return router_decision::replicate({encountered});
  }
};

class direct_router final : public router {
public:
  std::string name() const override { return "direct"; }

  router_decision decide(node_id, node_id encountered, const message& m, const routing_context&,
                         const contact_state&) const override {
    if (encountered == m.dst) return router_decision::forward(encountered);
    return router_decision::hold();
  }
};

inline const std::vector<std::string>& router_names() {
  static const std::vector<std::string> names{"saas", "bubble_rap", "nguyen", "epidemic", "direct"};
  return names;
}

inline std::unique_ptr<router> make_router(const std::string& name) {
  if (name == "saas") return std::make_unique<saas_router>();
  if (name == "bubble_rap") return std::make_unique<bubble_rap_router>();
  if (name == "nguyen") return std::make_unique<nguyen_router>();
  if (name == "epidemic") return std::make_unique<epidemic_router>();
  if (name == "direct") return std::make_unique<direct_router>();
  throw config_error("unknown router '" + name + "'");
}

} // namespace saasim
