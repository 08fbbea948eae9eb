#pragma once

// Deterministic contact-trace replay under a pluggable router.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "saasim/community.hpp"
#include "saasim/error.hpp"
#include "saasim/routers.hpp"
#include "saasim/social_graph.hpp"
#include "saasim/trace.hpp"

namespace saasim {

// ---------------------------------------------------------------------------
// Traffic

struct traffic_config {
  std::uint32_t packets_per_node = 50;
  std::uint32_t min_size = 50'000;
  std::uint32_t max_size = 100'000;
  double creation_span = 0.5; ///< fraction of the trace span over which packets are created
};

struct message_spec {
  std::uint64_t id = 0;
  node_id src = 0;
  node_id dst = 0;
  std::uint32_t size = 0;
  seconds created = 0;
};

/// Seeded traffic: every user emits `packets_per_node` packets to random other
/// users, created uniformly over the first `creation_span` of [start, end].
/// Sorted by (created, id); ids are dense from 0 in generation order.
inline std::vector<message_spec> generate_traffic(std::span<const node_id> users, seconds start,
                                                  seconds end, const traffic_config& cfg,
                                                  std::uint64_t seed) {
  if (cfg.min_size == 0 || cfg.min_size > cfg.max_size) throw config_error("invalid packet size range");
  if (cfg.creation_span < 0.0 || cfg.creation_span > 1.0)
    throw config_error("creation span must lie in [0,1]");
  std::vector<node_id> pool(users.begin(), users.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  std::vector<message_spec> out;
  if (pool.size() < 2 || end < start) return out;
  std::mt19937_64 rng(seed);
  const seconds last = start + static_cast<seconds>(static_cast<double>(end - start) * cfg.creation_span);
  std::uniform_int_distribution<seconds> when(start, last);
  std::uniform_int_distribution<std::size_t> other(0, pool.size() - 2);
  std::uniform_int_distribution<std::uint32_t> size(cfg.min_size, cfg.max_size);
  std::uint64_t id = 0;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::uint32_t k = 0; k < cfg.packets_per_node; ++k) {
      message_spec m;
      m.id = id++;
      m.src = pool[i];
      std::size_t j = other(rng);
      m.dst = pool[j >= i ? j + 1 : j];
      m.size = size(rng);
      m.created = when(rng);
      out.push_back(m);
    }
  std::stable_sort(out.begin(), out.end(),
                   [](const message_spec& a, const message_spec& b) { return a.created < b.created; });
  return out;
}

// ---------------------------------------------------------------------------
// Community timeline

struct timeline_config {
  snapshot_config graph;
  seconds refresh = 1800;
  double alpha = 0.6;
  sc_pipeline pipeline = sc_pipeline::space_crossing;
  density_detector::params detector;
  bool incremental = false; ///< maintain the registry by change events instead of rebuilding
  bool centrality = true;   ///< needed by Bubble Rap only
};

struct timeline_entry {
  seconds time = 0;
  std::shared_ptr<const community_registry> registry;
  std::shared_ptr<const routing_context> context;
};

/// Registries published every `refresh` seconds from the trace start; entry k
/// sees the events with time <= start + k * refresh.
struct community_timeline {
  std::vector<timeline_entry> entries;

  /// Latest entry published at or before `t`.
  const timeline_entry& at(seconds t) const {
    if (entries.empty()) throw state_error("empty community timeline");
    auto it = std::upper_bound(entries.begin(), entries.end(), t,
                               [](seconds x, const timeline_entry& e) { return x < e.time; });
    if (it == entries.begin()) return entries.front();
    return *std::prev(it);
  }
};

inline seconds trace_start(std::span<const contact_event> events) {
  return events.empty() ? 0 : events.front().time;
}

inline seconds trace_end(std::span<const contact_event> events) {
  return events.empty() ? 0 : events.back().time;
}

inline community_timeline build_timeline(std::span<const contact_event> events, const ap_designation& aps,
                                         const timeline_config& cfg) {
  if (cfg.refresh <= 0) throw config_error("refresh interval must be positive");
  check_alpha(cfg.alpha);
  const density_detector det(cfg.detector);
  snapshot_builder builder(aps, cfg.graph);
  community_timeline tl;
  const seconds start = trace_start(events), end = trace_end(events);
  std::size_t cursor = 0;
  std::optional<community_tracker> tracker;
  std::shared_ptr<const community_registry> prev;
  for (seconds t = start;; t += cfg.refresh) {
    cursor = builder.advance_to(events, cursor, t);
    snapshot_graph g = builder.snapshot();
    std::shared_ptr<const community_registry> reg;
    if (cfg.incremental) {
      if (!tracker) {
        tracker.emplace(g, cfg.alpha, det, cfg.pipeline);
      } else {
        for (const auto& ev : diff_snapshots(tracker->graph(), g)) tracker->apply(ev);
      }
      reg = std::make_shared<community_registry>(tracker->registry());
    } else if (!prev) {
      reg = std::make_shared<community_registry>(initialize_sc(g, cfg.alpha, det, cfg.pipeline));
    } else {
      reg = std::make_shared<community_registry>(refresh_sc(*prev, g, cfg.alpha, det));
    }
    // Weights are not tracked by change events; activities use the fresh snapshot.
    auto ctx = std::make_shared<routing_context>(make_routing_context(*reg, g, cfg.centrality));
    tl.entries.push_back({t, reg, ctx});
    prev = reg;
    if (t >= end) break;
  }
  return tl;
}

// ---------------------------------------------------------------------------
// Simulation

struct sim_config {
  std::string router = "saas";
  seconds ttl = 86400;
  std::uint64_t buffer_bytes = 5'000'000; ///< 0 = unlimited
  bool audit = false;
};

struct metrics {
  std::uint64_t created = 0;
  std::uint64_t delivered = 0;
  std::uint64_t expired = 0;
  std::uint64_t in_flight = 0;
  double delivery_ratio = 0.0;
  std::optional<double> average_latency; ///< seconds; absent without deliveries
  std::uint64_t evictions = 0;
  std::uint64_t peak_copies = 0; ///< most simultaneous copies of any one message
  std::uint64_t peak_buffer_bytes = 0; ///< fullest any node's buffer has been
};

enum class message_outcome { delivered, expired, in_flight };

inline const char* to_string(message_outcome o) {
  switch (o) {
  case message_outcome::delivered: return "delivered";
  case message_outcome::expired: return "expired";
  case message_outcome::in_flight: return "in_flight";
  }
  return "?";
}

struct message_audit {
  std::uint64_t id = 0;
  node_id src = 0;
  node_id dst = 0;
  seconds created = 0;
  message_outcome outcome = message_outcome::in_flight;
  std::optional<seconds> delivered_at;
  std::vector<node_id> hops; ///< src .. dst along the first arriving copy
};

struct sim_result {
  metrics stats;
  std::vector<message_audit> audit;
};

namespace detail {

class simulator final : public contact_state {
public:
  simulator(const ap_designation& aps, const community_timeline& tl, const std::vector<message_spec>& traffic,
            const sim_config& cfg, const router& r)
      : aps_(aps), tl_(tl), cfg_(cfg), router_(r) {
    msgs_.reserve(traffic.size());
    for (const auto& s : traffic) {
      if (s.src == s.dst) throw validation_error("message " + std::to_string(s.id) + " addressed to its source");
      if (aps_.is_ap(s.dst) || aps_.is_ap(s.src))
        throw validation_error("message " + std::to_string(s.id) + " has an access point endpoint");
      state st;
      st.m = {s.id, s.src, s.dst, s.size, s.created, cfg.ttl};
      index_.emplace(s.id, msgs_.size());
      msgs_.push_back(std::move(st));
    }
  }

  sim_result run(std::span<const contact_event> events) {
    std::vector<std::size_t> order(msgs_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return msgs_[a].m.created < msgs_[b].m.created; });
    std::size_t next_refresh = 0, next_msg = 0, next_ev = 0;
    const auto& entries = tl_.entries;
    seconds end = trace_end(events);
    if (!order.empty()) end = std::max(end, msgs_[order.back()].m.created);
    ctx_ = entries.empty() ? &empty_ctx_ : entries.front().context.get();

    for (;;) {
      seconds t = std::numeric_limits<seconds>::max();
      if (next_refresh < entries.size()) t = std::min(t, entries[next_refresh].time);
      if (next_msg < order.size()) t = std::min(t, msgs_[order[next_msg]].m.created);
      if (next_ev < events.size()) t = std::min(t, events[next_ev].time);
      if (t == std::numeric_limits<seconds>::max()) break;
      now_ = t;
      while (next_refresh < entries.size() && entries[next_refresh].time == t)
        ctx_ = entries[next_refresh++].context.get();
      while (next_msg < order.size() && msgs_[order[next_msg]].m.created == t) create(order[next_msg++]);
      while (next_ev < events.size() && events[next_ev].time == t) contact(events[next_ev++]);
    }
    return finish(end);
  }

  // contact_state
  bool is_ap(node_id n) const override { return aps_.is_ap(n); }

  bool has_copy(node_id n, std::uint64_t id) const override {
    auto it = buffers_.find(n);
    return it != buffers_.end() && it->second.held.contains(id);
  }

  std::optional<node_id> area_of(node_id user) const override {
    auto it = ap_links_.find(user);
    if (it == ap_links_.end() || it->second.empty()) return std::nullopt;
    auto best = it->second.begin();
    for (auto j = it->second.begin(); j != it->second.end(); ++j)
      if (j->second > best->second) best = j;
    return best->first;
  }

  std::vector<node_id> area_members(node_id ap) const override {
    std::vector<node_id> out;
    auto it = links_.find(ap);
    if (it == links_.end()) return out;
    for (node_id u : it->second)
      if (!aps_.is_ap(u) && area_of(u) == ap) out.push_back(u);
    return out;
  }

private:
  struct state {
    message m;
    std::optional<seconds> delivered_at;
    std::vector<node_id> delivery_path;
    std::uint64_t copies = 0;
    std::uint64_t peak = 0;
  };

  struct buffer {
    std::map<std::uint64_t, std::vector<node_id>> held; ///< id -> path (only with audit)
    std::uint64_t used = 0;
  };

  state& st(std::uint64_t id) { return msgs_[index_.at(id)]; }

  bool live(const state& s) const { return !s.delivered_at && s.m.alive_at(now_); }

  void drop(node_id n, std::uint64_t id) {
    auto& b = buffers_[n];
    auto it = b.held.find(id);
    if (it == b.held.end()) return;
    auto& s = st(id);
    b.used -= s.m.size;
    b.held.erase(it);
    --s.copies;
  }

  /// Removes copies of delivered or expired messages from `n`.
  void purge(node_id n) {
    auto& b = buffers_[n];
    std::vector<std::uint64_t> dead;
    for (const auto& [id, _] : b.held)
      if (!live(st(id))) dead.push_back(id);
    for (auto id : dead) drop(n, id);
  }

  /// `x` receives a copy travelling along `path`. Returns whether the hand-off
  /// succeeded (delivery counts as success).
  bool acquire(node_id x, std::uint64_t id, std::vector<node_id> path) {
    auto& s = st(id);
    if (!live(s)) return false;
    if (cfg_.audit) path.push_back(x);
    if (x == s.m.dst) {
      s.delivered_at = now_;
      s.delivery_path = std::move(path);
      return true;
    }
    if (aps_.is_ap(x) || has_copy(x, id)) return false;
    auto& b = buffers_[x];
    if (cfg_.buffer_bytes > 0) {
      if (s.m.size > cfg_.buffer_bytes) return false;
      if (b.used + s.m.size > cfg_.buffer_bytes) purge(x);
      while (b.used + s.m.size > cfg_.buffer_bytes) {
        auto victim = b.held.begin();
        for (auto it = b.held.begin(); it != b.held.end(); ++it) {
          const auto& a = st(it->first).m;
          const auto& v = st(victim->first).m;
          if (a.created < v.created || (a.created == v.created && a.id < v.id)) victim = it;
        }
        drop(x, victim->first);
        ++evictions_;
      }
    }
    b.held.emplace(id, std::move(path));
    b.used += s.m.size;
    peak_buffer_ = std::max(peak_buffer_, b.used);
    ++s.copies;
    pending_.emplace_back(x, id);
    return true;
  }

  /// Copies are counted once a hand-off has settled, so a forward is one copy.
  void note_peak(state& s) { s.peak = std::max(s.peak, s.copies); }

  void evaluate(node_id holder, node_id encountered, std::uint64_t id) {
    if (!has_copy(holder, id)) return;
    auto& s = st(id);
    if (!live(s)) {
      drop(holder, id);
      return;
    }
    const router_decision d = router_.decide(holder, encountered, s.m, *ctx_, *this);
    if (d.action == router_action::hold) return;
    const std::vector<node_id> path = buffers_[holder].held.at(id);
    if (d.action == router_action::replicate) {
      for (node_id to : d.targets) acquire(to, id, path);
    } else if (acquire(d.targets.front(), id, path)) {
      drop(holder, id);
    }
    note_peak(s);
  }

  void evaluate_all(node_id holder, node_id encountered) {
    auto it = buffers_.find(holder);
    if (it == buffers_.end()) return;
    std::vector<std::uint64_t> ids;
    for (const auto& [id, _] : it->second.held) ids.push_back(id);
    for (auto id : ids) evaluate(holder, encountered, id);
  }

  /// Fresh holders re-examine every link they currently have.
  void cascade() {
    while (!pending_.empty()) {
      auto [x, id] = pending_.front();
      pending_.pop_front();
      auto it = links_.find(x);
      if (it == links_.end()) continue;
      const std::vector<node_id> nbrs(it->second.begin(), it->second.end());
      for (node_id y : nbrs) evaluate(x, y, id);
    }
  }

  void create(std::size_t i) {
    auto& s = msgs_[i];
    std::vector<node_id> path;
    acquire(s.m.src, s.m.id, path);
    note_peak(s);
    cascade();
  }

  void contact(const contact_event& e) {
    const bool a_ap = aps_.is_ap(e.a), b_ap = aps_.is_ap(e.b);
    if (a_ap && b_ap) return; // access points do not talk to each other
    if (e.kind == link_state::down) {
      links_[e.a].erase(e.b);
      links_[e.b].erase(e.a);
      if (a_ap || b_ap) {
        const node_id ap = a_ap ? e.a : e.b, user = a_ap ? e.b : e.a;
        if (auto it = ap_links_.find(user); it != ap_links_.end()) {
          it->second.erase(ap);
          if (it->second.empty()) ap_links_.erase(it);
        }
      }
      return;
    }
    links_[e.a].insert(e.b);
    links_[e.b].insert(e.a);
    if (a_ap || b_ap) {
      const node_id ap = a_ap ? e.a : e.b, user = a_ap ? e.b : e.a;
      ap_links_[user][ap] = now_;
      evaluate_all(user, ap);
      for (node_id z : area_members(ap))
        if (z != user) evaluate_all(z, ap);
    } else {
      evaluate_all(e.a, e.b);
      evaluate_all(e.b, e.a);
    }
    cascade();
  }

  sim_result finish(seconds end) {
    sim_result r;
    auto& m = r.stats;
    double latency = 0.0;
    for (const auto& s : msgs_) {
      ++m.created;
      m.peak_copies = std::max(m.peak_copies, s.peak);
      message_outcome o;
      if (s.delivered_at) {
        ++m.delivered;
        latency += static_cast<double>(*s.delivered_at - s.m.created);
        o = message_outcome::delivered;
      } else if (end - s.m.created >= s.m.ttl) {
        ++m.expired;
        o = message_outcome::expired;
      } else {
        ++m.in_flight;
        o = message_outcome::in_flight;
      }
      if (cfg_.audit)
        r.audit.push_back({s.m.id, s.m.src, s.m.dst, s.m.created, o, s.delivered_at,
                           s.delivered_at ? s.delivery_path : std::vector<node_id>{}});
    }
    if (m.created > 0) m.delivery_ratio = static_cast<double>(m.delivered) / static_cast<double>(m.created);
    if (m.delivered > 0) m.average_latency = latency / static_cast<double>(m.delivered);
    m.evictions = evictions_;
    m.peak_buffer_bytes = peak_buffer_;
    std::sort(r.audit.begin(), r.audit.end(),
              [](const message_audit& a, const message_audit& b) { return a.id < b.id; });
    return r;
  }

  const ap_designation& aps_;
  const community_timeline& tl_;
  sim_config cfg_;
  const router& router_;
  const routing_context* ctx_ = nullptr;
  routing_context empty_ctx_;
  std::vector<state> msgs_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::unordered_map<node_id, buffer> buffers_;
  std::unordered_map<node_id, std::set<node_id>> links_;
  std::unordered_map<node_id, std::map<node_id, seconds>> ap_links_;
  std::deque<std::pair<node_id, std::uint64_t>> pending_;
  std::uint64_t evictions_ = 0;
  std::uint64_t peak_buffer_ = 0;
  seconds now_ = 0;
};

} // namespace detail

/// Replays `events` with the given traffic. Event order at equal timestamps:
/// registry refresh, message creation, contact events in trace order.
inline sim_result run_simulation(std::span<const contact_event> events, const ap_designation& aps,
                                 const community_timeline& timeline,
                                 const std::vector<message_spec>& traffic, const sim_config& cfg) {
  if (cfg.ttl < 0) throw config_error("ttl must be non-negative");
  const auto r = make_router(cfg.router);
  detail::simulator sim(aps, timeline, traffic, cfg, *r);
  return sim.run(events);
}

/// Users of a trace: every node that is not an access point.
inline std::vector<node_id> trace_users(std::span<const contact_event> events, const ap_designation& aps) {
  std::vector<node_id> out;
  for (node_id n : trace_nodes(events))
    if (!aps.is_ap(n)) out.push_back(n);
  return out;
}

/// Per-message audit as CSV "id,src,dst,created,outcome,delivered_at,hops".
inline void write_audit_csv(std::ostream& os, const std::vector<message_audit>& audit) {
  os << "id,src,dst,created,outcome,delivered_at,hops\n";
  for (const auto& a : audit) {
    os << a.id << ',' << a.src << ',' << a.dst << ',' << a.created << ',' << to_string(a.outcome) << ',';
    if (a.delivered_at) os << *a.delivered_at;
    os << ',';
    for (std::size_t i = 0; i < a.hops.size(); ++i) os << (i ? " " : "") << a.hops[i];
    os << '\n';
  }
}

} // namespace saasim
