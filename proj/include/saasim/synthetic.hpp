#pragma once

// Seeded synthetic contact traces with planted group structure.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "saasim/error.hpp"
#include "saasim/trace.hpp"

namespace saasim {

namespace detail {

/// Collects contact sessions and emits a valid trace; overlapping or touching
/// sessions of one pair are merged.
class session_sink {
public:
  void add(node_id a, node_id b, seconds from, seconds to) {
    if (a == b || to <= from) return;
    sessions_[node_pair(a, b)].emplace_back(from, to);
  }

  std::vector<contact_event> events() const {
    std::vector<contact_event> out;
    for (auto [pair, list] : sessions_) {
      std::sort(list.begin(), list.end());
      seconds s = list.front().first, e = list.front().second;
      auto flush = [&] {
        out.push_back({s, link_state::up, pair.first, pair.second});
        out.push_back({e, link_state::down, pair.first, pair.second});
      };
      for (std::size_t i = 1; i < list.size(); ++i) {
        if (list[i].first <= e) {
          e = std::max(e, list[i].second);
        } else {
          flush();
          s = list[i].first;
          e = list[i].second;
        }
      }
      flush();
    }
    // Downs before ups at equal times keep back-to-back sessions well formed.
    std::stable_sort(out.begin(), out.end(), [](const contact_event& x, const contact_event& y) {
      if (x.time != y.time) return x.time < y.time;
      return x.kind == link_state::down && y.kind == link_state::up;
    });
    return out;
  }

private:
  std::map<node_pair, std::vector<std::pair<seconds, seconds>>> sessions_;
};

} // namespace detail

struct synthetic_trace {
  std::vector<contact_event> events;
  ap_designation aps;
  std::vector<std::vector<node_id>> groups; ///< users per planted group
};

/// Users 0..users-1 split round-robin into groups; APs take the ids after the
/// users. Group g favours AP g mod aps.
struct community_trace_config {
  std::size_t users = 27;
  std::size_t groups = 3;
  std::size_t aps = 3;
  seconds span = 3 * 86400;
  std::size_t contacts = 1200;
  double intra_bias = 0.8;
  std::size_t ap_visits = 300;
  double home_ap_bias = 0.7;
  seconds min_duration = 300;
  seconds max_duration = 3600;
};

inline synthetic_trace community_trace(const community_trace_config& cfg, std::uint64_t seed) {
  if (cfg.users < 2 || cfg.groups == 0 || cfg.groups > cfg.users)
    throw config_error("synthetic trace needs at least two users and one user per group");
  if (cfg.aps == 0) throw config_error("synthetic trace needs at least one access point");
  if (cfg.span <= cfg.max_duration || cfg.min_duration <= 0 || cfg.min_duration > cfg.max_duration)
    throw config_error("invalid synthetic durations");
  std::mt19937_64 rng(seed);
  synthetic_trace out;
  out.groups.resize(cfg.groups);
  for (node_id u = 0; u < cfg.users; ++u) out.groups[u % cfg.groups].push_back(u);
  std::vector<node_id> ring;
  for (std::size_t i = 0; i < cfg.aps; ++i) ring.push_back(static_cast<node_id>(cfg.users + i));
  out.aps = ap_designation::from_ring(ring);

  std::uniform_int_distribution<seconds> start(0, cfg.span - cfg.max_duration);
  std::uniform_int_distribution<seconds> length(cfg.min_duration, cfg.max_duration);
  std::uniform_int_distribution<node_id> any_user(0, static_cast<node_id>(cfg.users - 1));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  detail::session_sink sink;
  for (std::size_t k = 0; k < cfg.contacts; ++k) {
    const node_id a = any_user(rng);
    node_id b;
    const auto& g = out.groups[a % cfg.groups];
    if (coin(rng) < cfg.intra_bias && g.size() > 1) {
      std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
      do b = g[pick(rng)];
      while (b == a);
    } else {
      do b = any_user(rng);
      while (b == a);
    }
    const seconds s = start(rng);
    sink.add(a, b, s, s + length(rng));
  }
  std::uniform_int_distribution<std::size_t> any_ap(0, cfg.aps - 1);
  for (std::size_t k = 0; k < cfg.ap_visits; ++k) {
    const node_id u = any_user(rng);
    const std::size_t home = (u % cfg.groups) % cfg.aps;
    const std::size_t ap = coin(rng) < cfg.home_ap_bias ? home : any_ap(rng);
    const seconds s = start(rng);
    sink.add(u, ring[ap], s, s + length(rng));
  }
  out.events = sink.events();
  return out;
}

/// Two clusters that never meet directly; members of both gather at a single
/// AP during recurring meetings. Users 0..2n-1 (left then right), AP 2n.
struct planted_trace_config {
  std::size_t cluster_size = 10;
  seconds span = 3 * 86400;
  seconds contact_period = 1800; ///< one intra-cluster contact round per period
  std::size_t contacts_per_round = 3;
  seconds meeting_period = 7200;
  std::size_t attendees_per_side = 3;
  seconds meeting_length = 1200;
  seconds contact_length = 600;
};

inline synthetic_trace planted_two_cluster_trace(const planted_trace_config& cfg, std::uint64_t seed) {
  const std::size_t n = cfg.cluster_size;
  if (n < 3) throw config_error("clusters need at least three members");
  if (cfg.attendees_per_side == 0 || cfg.attendees_per_side > n)
    throw config_error("meeting attendance must lie in [1, cluster size]");
  if (cfg.contact_period <= 0 || cfg.meeting_period <= 0 || cfg.span <= 0)
    throw config_error("periods must be positive");
  std::mt19937_64 rng(seed);
  synthetic_trace out;
  out.groups.resize(2);
  for (node_id u = 0; u < 2 * n; ++u) out.groups[u / n].push_back(u);
  const node_id ap = static_cast<node_id>(2 * n);
  out.aps = ap_designation::from_ring({ap});

  detail::session_sink sink;
  std::uniform_int_distribution<std::size_t> member(0, n - 1);
  std::uniform_int_distribution<seconds> jitter(0, cfg.contact_period / 2);
  for (seconds t = 0; t + cfg.contact_period <= cfg.span; t += cfg.contact_period)
    for (const auto& g : out.groups)
      for (std::size_t k = 0; k < cfg.contacts_per_round; ++k) {
        const node_id a = g[member(rng)];
        node_id b;
        do b = g[member(rng)];
        while (b == a);
        const seconds s = t + jitter(rng);
        sink.add(a, b, s, s + cfg.contact_length);
      }
  for (seconds t = cfg.meeting_period / 2; t + cfg.meeting_length <= cfg.span; t += cfg.meeting_period)
    for (const auto& g : out.groups) {
      std::vector<node_id> pool = g;
      std::shuffle(pool.begin(), pool.end(), rng);
      for (std::size_t k = 0; k < cfg.attendees_per_side; ++k) sink.add(pool[k], ap, t, t + cfg.meeting_length);
    }
  out.events = sink.events();
  return out;
}

} // namespace saasim
