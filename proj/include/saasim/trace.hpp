#pragma once

// ONE-style connectivity traces: "<time> CONN <a> <b> <up|down>".

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "saasim/error.hpp"
#include "saasim/types.hpp"

namespace saasim {

enum class link_state { up, down };

struct contact_event {
  seconds time = 0;
  link_state kind = link_state::up;
  node_id a = 0; ///< always the smaller id of the pair
  node_id b = 0;

  node_pair pair() const noexcept { return {a, b}; }
  bool involves(node_id n) const noexcept { return a == n || b == n; }

  friend bool operator==(const contact_event&, const contact_event&) = default;
};

namespace detail {

template <typename Int>
bool parse_int(std::string_view tok, Int& out) {
  if (tok.empty()) return false;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

} // namespace detail

/// Parses and validates a contact trace. Events come back sorted by time
/// (stable for ties) with each pair normalized so that a < b.
/// Lines starting with '#' are comments.
inline std::vector<contact_event> parse_contact_trace(std::istream& in) {
  std::vector<contact_event> events;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (toks.empty() || toks.front().starts_with('#')) continue;
    if (toks.size() != 5)
      throw parse_error(lineno, "expected 5 fields, got " + std::to_string(toks.size()));
    seconds t = 0;
    if (!detail::parse_int(toks[0], t) || t < 0)
      throw parse_error(lineno, "time is not a non-negative integer: '" + std::string(toks[0]) + "'");
    if (toks[1] != "CONN")
      throw parse_error(lineno, "expected 'CONN', got '" + std::string(toks[1]) + "'");
    node_id a = 0, b = 0;
    if (!detail::parse_int(toks[2], a))
      throw parse_error(lineno, "bad node id '" + std::string(toks[2]) + "'");
    if (!detail::parse_int(toks[3], b))
      throw parse_error(lineno, "bad node id '" + std::string(toks[3]) + "'");
    if (a == b) throw parse_error(lineno, "self contact for node " + std::to_string(a));
    link_state kind;
    if (toks[4] == "up")
      kind = link_state::up;
    else if (toks[4] == "down")
      kind = link_state::down;
    else
      throw parse_error(lineno, "unknown direction '" + std::string(toks[4]) + "'");
    node_pair p{a, b};
    events.push_back({t, kind, p.first, p.second});
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const contact_event& x, const contact_event& y) { return x.time < y.time; });

  // A repeated up on an already open pair is a fresh sighting; a down needs an open pair.
  std::set<node_pair> open;
  for (const auto& e : events) {
    if (e.kind == link_state::up) {
      open.insert(e.pair());
    } else if (open.erase(e.pair()) == 0) {
      std::ostringstream msg;
      msg << "connection-down without matching up for pair " << e.pair() << " at t=" << e.time;
      throw validation_error(msg.str());
    }
  }
  return events;
}

inline std::vector<contact_event> parse_contact_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_contact_trace(in);
}

inline std::string serialize_contact_trace(std::span<const contact_event> events) {
  std::ostringstream out;
  for (const auto& e : events)
    out << e.time << " CONN " << e.a << ' ' << e.b << ' '
        << (e.kind == link_state::up ? "up" : "down") << '\n';
  return out.str();
}

/// Every node id mentioned by the trace, ascending.
inline std::vector<node_id> trace_nodes(std::span<const contact_event> events) {
  std::set<node_id> ids;
  for (const auto& e : events) {
    ids.insert(e.a);
    ids.insert(e.b);
  }
  return {ids.begin(), ids.end()};
}

/// Access points and the circle that joins them.
struct ap_designation {
  std::vector<node_id> aps;  ///< ascending
  std::vector<node_id> ring; ///< circular order; ring.back() is adjacent to ring.front()

  bool is_ap(node_id n) const { return std::binary_search(aps.begin(), aps.end(), n); }
  std::size_t size() const noexcept { return aps.size(); }

  static ap_designation from_ring(std::vector<node_id> ring) {
    if (ring.empty()) throw config_error("at least one access point is required");
    ap_designation d;
    d.ring = std::move(ring);
    d.aps = d.ring;
    std::sort(d.aps.begin(), d.aps.end());
    if (std::adjacent_find(d.aps.begin(), d.aps.end()) != d.aps.end())
      throw validation_error("duplicate access point id in ring");
    return d;
  }
};

/// Draws `count` distinct APs from `universe`; the ring follows draw order.
inline ap_designation designate_aps(std::span<const node_id> universe, std::size_t count,
                                    std::uint64_t seed) {
  std::vector<node_id> pool(universe.begin(), universe.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (count == 0) throw config_error("ap count must be at least 1");
  if (count > pool.size())
    throw config_error("ap count " + std::to_string(count) + " exceeds node universe of " +
                       std::to_string(pool.size()));
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  return ap_designation::from_ring(std::move(pool));
}

/// One AP id per line, in ring order.
inline ap_designation parse_ap_list(std::istream& in) {
  std::vector<node_id> ring;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (toks.empty() || toks.front().starts_with('#')) continue;
    node_id id = 0;
    if (toks.size() != 1 || !detail::parse_int(toks[0], id))
      throw parse_error(lineno, "expected a single AP id");
    ring.push_back(id);
  }
  return ap_designation::from_ring(std::move(ring));
}

/// Contacts per aggregation interval: l_uv for each pair plus the total l_*.
struct interval_table {
  std::map<node_pair, std::uint32_t> pairs;
  std::uint64_t total = 0;

  std::uint32_t count(node_pair p) const {
    auto it = pairs.find(p);
    return it == pairs.end() ? 0 : it->second;
  }
};

struct interval_counts {
  seconds length = 1;
  std::vector<interval_table> intervals;

  /// Empty table for intervals past the last recorded contact.
  const interval_table& at(interval_index i) const {
    static const interval_table empty;
    if (i < 0 || static_cast<std::size_t>(i) >= intervals.size()) return empty;
    return intervals[static_cast<std::size_t>(i)];
  }

  void add(seconds t, node_pair p) {
    auto i = static_cast<std::size_t>(t / length);
    if (intervals.size() <= i) intervals.resize(i + 1);
    ++intervals[i].pairs[p];
    ++intervals[i].total;
  }
};

inline interval_index interval_of(seconds t, seconds length) { return t / length; }

/// One contact per up-event, binned into half-open intervals of `interval_length`.
inline interval_counts contacts_per_interval(std::span<const contact_event> events,
                                             seconds interval_length) {
  if (interval_length <= 0) throw config_error("interval length must be positive");
  interval_counts out;
  out.length = interval_length;
  for (const auto& e : events)
    if (e.kind == link_state::up) out.add(e.time, e.pair());
  return out;
}

} // namespace saasim
