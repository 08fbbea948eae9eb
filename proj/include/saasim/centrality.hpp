#pragma once

#include <map>
#include <queue>
#include <vector>

#include "saasim/detector.hpp"

namespace saasim {

/// Shortest-path betweenness of an unweighted undirected graph (Brandes).
/// Each unordered endpoint pair is counted once; endpoints get no credit.
inline std::map<node_id, double> betweenness_centrality(const adjacency& g) {
  std::map<node_id, std::size_t> index;
  std::vector<node_id> ids;
  for (const auto& [n, _] : g) {
    index.emplace(n, ids.size());
    ids.push_back(n);
  }
  const std::size_t n = ids.size();
  std::vector<std::vector<std::size_t>> nbr(n);
  for (const auto& [u, vs] : g)
    for (node_id v : vs)
      if (auto it = index.find(v); it != index.end()) nbr[index[u]].push_back(it->second);

  std::vector<double> bc(n, 0.0);
  std::vector<std::vector<std::size_t>> pred(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      pred[i].clear();
      sigma[i] = 0.0;
      delta[i] = 0.0;
      dist[i] = -1;
    }
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      order.push_back(v);
      for (std::size_t w : nbr[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          pred[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  std::map<node_id, double> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace(ids[i], bc[i] / 2.0);
  return out;
}

/// Subgraph of `g` induced by `members`.
inline adjacency induced_subgraph(const adjacency& g, const member_set& members) {
  adjacency out;
  for (node_id u : members) {
    auto& row = out[u];
    if (auto it = g.find(u); it != g.end())
      for (node_id v : it->second)
        if (contains(members, v)) row.insert(v);
  }
  return out;
}

} // namespace saasim
