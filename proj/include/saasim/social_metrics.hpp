#pragma once

// Local activity, activity vectors and Pearson social similarity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "saasim/community.hpp"
#include "saasim/error.hpp"
#include "saasim/social_graph.hpp"

namespace saasim {

/// Share of the community's pairwise encounter mass that involves `u`.
/// Each unordered pair counts once in the denominator, so the activities of
/// all members sum to 2 whenever any intra weight is positive.
inline double local_activity(node_id u, const community& sc, const encounter_ratio_table& weights) {
  if (!sc.contains(u))
    throw domain_error("node " + std::to_string(u) + " is not a member of community " +
                       std::to_string(sc.id));
  double num = 0.0, den = 0.0;
  const auto& m = sc.members;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const double w = weights.weight(m[i], m[j]);
      den += w;
      if (m[i] == u || m[j] == u) num += w;
    }
  return den > 0.0 ? num / den : 0.0;
}

/// Activities of every member at once, walking the sparse weight table.
inline std::map<node_id, double> community_activities(const community& sc,
                                                      const encounter_ratio_table& weights) {
  std::map<node_id, double> out;
  for (node_id n : sc.members) out[n] = 0.0;
  double den = 0.0;
  const bool sparse_walk = weights.w.size() < sc.members.size() * sc.members.size() / 2;
  auto visit = [&](node_id a, node_id b, double w) {
    den += w;
    out[a] += w;
    out[b] += w;
  };
  if (sparse_walk) {
    for (const auto& [p, w] : weights.w)
      if (sc.contains(p.first) && sc.contains(p.second)) visit(p.first, p.second, w);
  } else {
    const auto& m = sc.members;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = i + 1; j < m.size(); ++j)
        if (double w = weights.weight(m[i], m[j]); w > 0.0) visit(m[i], m[j], w);
  }
  for (auto& [n, a] : out) a = den > 0.0 ? a / den : 0.0;
  return out;
}

struct activity_vector {
  interval_index t = 0;
  node_id owner = 0;
  std::vector<std::uint64_t> sc_ids; ///< registry order
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

inline activity_vector activity_vector_of(node_id u, const community_registry& reg,
                                          const encounter_ratio_table& weights) {
  activity_vector v;
  v.t = reg.t;
  v.owner = u;
  for (const auto& c : reg.sc) {
    v.sc_ids.push_back(c.id);
    v.values.push_back(c.contains(u) ? local_activity(u, c, weights) : 0.0);
  }
  return v;
}

/// Pearson correlation of two equally long sequences using population moments.
/// Returns 0 when either sequence is constant.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = x.size();
  if (k != y.size()) throw domain_error("vectors differ in length");
  if (k == 0) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxy = 0.0, sxx = 0.0, syy = 0.0, qx = 0.0, qy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
    qx += x[i] * x[i];
    qy += y[i] * y[i];
  }
  // Constant up to rounding noise of the mean.
  constexpr double eps = 1e-24;
  if (sxx <= eps * qx || syy <= eps * qy) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double pearson_similarity(const activity_vector& a, const activity_vector& b) {
  if (a.t != b.t) throw domain_error("activity vectors from different intervals");
  if (a.sc_ids != b.sc_ids) throw domain_error("activity vectors over different community orderings");
  return pearson(a.values, b.values);
}

/// Debug CSV "t,node,sc_id,activity", one row per component.
inline void write_activity_csv(std::ostream& os, const std::vector<activity_vector>& vs,
                               bool header = true) {
  if (header) os << "t,node,sc_id,activity\n";
  for (const auto& v : vs)
    for (std::size_t i = 0; i < v.size(); ++i)
      os << v.t << ',' << v.owner << ',' << v.sc_ids[i] << ',' << v.values[i] << '\n';
}

} // namespace saasim
