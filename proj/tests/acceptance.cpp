// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "saasim/saasim.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace saasim;
namespace fs = std::filesystem;

namespace {

struct outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(int n, const std::string& name, double limit_s, const std::function<outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) o.require(false, "runtime over " + std::to_string(limit_s) + " s");
  if (!o.ok) ++failures;
  std::printf("%s  %d  %-44s %8.2f s  %s\n", o.ok ? "PASS" : "FAIL", n, name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

outcome activity_sum_rule() {
  outcome o;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> w(1e-3, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 13;
    community c;
    c.kind = community_kind::sc;
    for (std::size_t i = 0; i < n; ++i) c.members.push_back(static_cast<node_id>(3 * i + rng() % 3));
    encounter_ratio_table t;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) t.w[{c.members[i], c.members[j]}] = w(rng);
    double sum = 0.0;
    for (node_id u : c.members) sum += local_activity(u, c, t);
    worst = std::max(worst, std::abs(sum - 2.0));
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "max |sum - 2| = %.2e", worst);
  o.require(worst <= 1e-9, buf);
  if (o.ok) o.detail = buf;
  return o;
}

outcome pearson_contract() {
  outcome o;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> v(-5.0, 5.0), scale(0.01, 100.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + rng() % 20;
    std::vector<double> x(k), y(k);
    for (auto& e : x) e = v(rng);
    for (auto& e : y) e = v(rng);
    const double r = pearson(x, y);
    o.require(r >= -1.0 && r <= 1.0, "out of range");
    o.require(std::abs(pearson(x, x) - 1.0) <= 1e-9, "self-similarity not 1");
    const double a = scale(rng), b = v(rng), c = scale(rng), d = v(rng);
    std::vector<double> xa(k), yc(k);
    for (std::size_t i = 0; i < k; ++i) {
      xa[i] = a * x[i] + b;
      yc[i] = c * y[i] + d;
    }
    o.require(std::abs(pearson(xa, yc) - r) <= 1e-9, "affine invariance");
    const std::vector<double> flat(k, v(rng));
    o.require(pearson(flat, y) == 0.0 && pearson(x, flat) == 0.0, "zero variance not 0");
  }
  return o;
}

outcome combination_oracle() {
  outcome o;
  std::mt19937_64 rng(303);
  int flips = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto random_comm = [&](community_kind k) {
      member_set m;
      for (node_id v = 0; v < 12; ++v)
        if (rng() % 2) m.push_back(v);
      if (std::find(m.begin(), m.end(), 5u) == m.end()) m.push_back(5); // overlap guaranteed
      std::sort(m.begin(), m.end());
      edge_list e;
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
          if (rng() % 3 == 0) e.push_back({m[i], m[j]});
      return testkit::make(k, m, e, k == community_kind::ap ? std::vector<node_id>{m.back()} : std::vector<node_id>{});
    };
    const auto a = random_comm(community_kind::pp), b = random_comm(community_kind::ap);
    const double s = shared_substructure(a, b);
    o.require(s == testkit::brute_score(a, b), "score differs from brute force at trial " + std::to_string(trial));
    // Merge iff score > alpha: none at alpha = score, one just below it.
    o.require(combine_s_a({a}, {b}, s).size() == 2, "merged at alpha == score");
    const double below = std::nextafter(s, -1.0);
    if (below >= 0.0) {
      o.require(combine_s_a({a}, {b}, below).size() == 1, "no merge just below score");
      ++flips;
    }
  }
  if (o.ok) o.detail = std::to_string(flips) + " threshold flips checked";
  return o;
}

outcome incremental_equivalence() {
  outcome o;
  std::mt19937_64 rng(404);
  const density_detector det;
  std::set<change_kind> kinds;
  for (int seq = 0; seq < 50 && o.ok; ++seq) {
    const node_id users = static_cast<node_id>(8 + rng() % 14);
    auto g = testkit::random_snapshot(rng, users, 1 + rng() % 4);
    const double alpha = 0.1 * static_cast<double>(rng() % 21);
    community_tracker tr(g, alpha, det);
    node_id next = 200;
    const int len = 1 + static_cast<int>(rng() % 40);
    for (int k = 0; k < len; ++k) {
      const auto ev = testkit::random_change(rng, tr.graph(), next, 30);
      kinds.insert(ev.kind);
      tr.apply(ev);
    }
    o.require(tr.graph().nodes.size() <= 30, "node bound exceeded");
    o.require(tr.registry().sc_member_sets() == initialize_sc(tr.graph(), alpha, det).sc_member_sets(),
              "sequence " + std::to_string(seq) + " diverges from initialize_sc");
  }
  o.require(kinds.size() == 4, "not every change kind was exercised");
  return o;
}

outcome router_dominance() {
  outcome o;
  const std::vector<seconds> ttls{600, 1800, 3600, 4 * 3600, 12 * 3600, 86400, 2 * 86400};
  const std::vector<std::string> routers{"epidemic", "saas", "direct"};
  int saas_direct_violations = 0, cells = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    community_trace_config c; // 27 users + 3 APs
    const auto tr = community_trace(c, seed);
    const auto tl = build_timeline(tr.events, tr.aps, timeline_config{});
    traffic_config tc;
    tc.packets_per_node = 8;
    const auto users = trace_users(tr.events, tr.aps);
    const auto traffic = generate_traffic(users, trace_start(tr.events), trace_end(tr.events), tc, seed);
    std::map<std::string, double> prev;
    for (seconds ttl : ttls) {
      std::map<std::string, double> dr;
      for (const auto& r : routers) {
        sim_config sc;
        sc.router = r;
        sc.ttl = ttl;
        sc.buffer_bytes = 0;
        dr[r] = run_simulation(tr.events, tr.aps, tl, traffic, sc).stats.delivery_ratio;
        if (prev.contains(r))
          o.require(dr[r] >= prev[r], r + " not monotone in ttl (seed " + std::to_string(seed) + ")");
      }
      ++cells;
      const std::string where = " (seed " + std::to_string(seed) + ", ttl " + std::to_string(ttl) + ")";
      o.require(dr["epidemic"] >= dr["saas"], "epidemic < saas" + where);
      if (dr["saas"] < dr["direct"]) ++saas_direct_violations;
      o.require(dr["saas"] >= dr["direct"], "saas < direct" + where + ": " + fmt(dr["saas"]) + " vs " +
                                                fmt(dr["direct"]));
      prev = dr;
    }
  }
  if (o.ok) o.detail = std::to_string(cells) + " trace/ttl cells";
  else o.detail += " [" + std::to_string(saas_direct_violations) + " saas<direct cells]";
  return o;
}

outcome directional_reproduction() {
  outcome o;
  const std::size_t seeds = 5;
  double dr_sc = 0, dr_pp = 0, dr_direct = 0, lat_sc = 0, lat_pp = 0, lat_direct = 0;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    const auto tr = planted_two_cluster_trace(planted_trace_config{}, seed);
    timeline_config sc_cfg, pp_cfg;
    sc_cfg.centrality = pp_cfg.centrality = false;
    pp_cfg.pipeline = sc_pipeline::pp_only;
    const auto sc_tl = build_timeline(tr.events, tr.aps, sc_cfg);
    const auto pp_tl = build_timeline(tr.events, tr.aps, pp_cfg);
    const auto users = trace_users(tr.events, tr.aps);
    const auto traffic =
        generate_traffic(users, trace_start(tr.events), trace_end(tr.events), traffic_config{}, seed);
    sim_config cfg;
    cfg.ttl = 86400;
    cfg.router = "saas";
    const auto a = run_simulation(tr.events, tr.aps, sc_tl, traffic, cfg).stats;
    const auto b = run_simulation(tr.events, tr.aps, pp_tl, traffic, cfg).stats;
    cfg.router = "direct";
    const auto c = run_simulation(tr.events, tr.aps, sc_tl, traffic, cfg).stats;
    o.require(a.average_latency && b.average_latency && c.average_latency, "a run delivered nothing");
    if (!o.ok) return o;
    dr_sc += a.delivery_ratio / seeds;
    dr_pp += b.delivery_ratio / seeds;
    dr_direct += c.delivery_ratio / seeds;
    lat_sc += *a.average_latency / seeds;
    lat_pp += *b.average_latency / seeds;
    lat_direct += *c.average_latency / seeds;
  }
  o.require(dr_sc - dr_pp >= 0.20, "delivery gain over PP-only below 20 points");
  o.require(dr_sc - dr_direct >= 0.20, "delivery gain over direct below 20 points");
  o.require(lat_sc < lat_pp, "latency not below PP-only");
  o.require(lat_sc < lat_direct, "latency not below direct");
  const std::string summary = "dr SC " + fmt(dr_sc) + " PP " + fmt(dr_pp) + " direct " + fmt(dr_direct) +
                              "; latency SC " + fmt(lat_sc) + " PP " + fmt(lat_pp) + " direct " +
                              fmt(lat_direct);
  o.detail = o.ok ? summary : o.detail + " (" + summary + ")";
  return o;
}

outcome betweenness_oracle() {
  outcome o;
  std::mt19937_64 rng(707);
  for (int trial = 0; trial < 50; ++trial) {
    const node_id n = 1 + rng() % 12;
    const unsigned density = 15 + rng() % 60;
    adjacency g;
    for (node_id v = 0; v < n; ++v) g[v];
    for (node_id a = 0; a < n; ++a)
      for (node_id b = a + 1; b < n; ++b)
        if (rng() % 100 < density) {
          g[a].insert(b);
          g[b].insert(a);
        }
    const auto bc = betweenness_centrality(g);
    for (const auto& [v, x] : testkit::betweenness_by_enumeration(g))
      o.require(std::abs(bc.at(v) - x) <= 1e-9, "graph " + std::to_string(trial) + " node " + std::to_string(v));
  }
  return o;
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream is(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    files[fs::relative(e.path(), root).generic_string()] = ss.str();
  }
  return files;
}

outcome sweep_determinism() {
  outcome o;
  const fs::path base = fs::temp_directory_path() / "saasim-acceptance-sweep";
  fs::remove_all(base);
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* tag : {"a", "b"}) {
    const fs::path out = base / tag;
    const std::string cmd = std::string("\"") + SAASIM_CLI + "\" sweep \"" + SAASIM_PRESETS +
                            "/desk.yaml\" --out \"" + out.string() + "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    o.require(rc == 0, "sweep exited with " + std::to_string(rc));
    if (!o.ok) return o;
    runs.push_back(snapshot_tree(out));
  }
  o.require(!runs[0].empty() && runs[0].contains("metrics.csv") && runs[0].contains("summary.csv"),
            "missing CSV outputs");
  o.require(runs[0] == runs[1], "outputs differ between runs");
  if (o.ok) o.detail = std::to_string(runs[0].size()) + " files identical";
  fs::remove_all(base);
  return o;
}

outcome trace_golden() {
  outcome o;
  const auto ev = parse_contact_trace("0 CONN 93 96 up\n"
                                      "0 CONN 93 14 up\n"
                                      "128 CONN 85 17 up\n"
                                      "129 CONN 94 29 up\n"
                                      "1100 CONN 5 28 up\n"
                                      "1169 CONN 28 5 down\n");
  const std::vector<contact_event> want{{0, link_state::up, 93, 96},     {0, link_state::up, 14, 93},
                                        {128, link_state::up, 17, 85},   {129, link_state::up, 29, 94},
                                        {1100, link_state::up, 5, 28},   {1169, link_state::down, 5, 28}};
  o.require(ev == want, "sample lines parsed differently");
  const std::vector<std::pair<std::string, std::size_t>> bad{
      {"0 CONN 1 2 up\n0 CONN 1 2\n", 2},
      {"0 CONN 1 2 up\n\n7 CONN 1 2 sideways\n", 3},
      {"abc CONN 1 2 up\n", 1},
      {"0 CONN 1 2 up\n5 LINK 1 2 down\n", 2},
  };
  for (const auto& [text, line] : bad) {
    try {
      parse_contact_trace(text);
      o.require(false, "accepted malformed input");
    } catch (const parse_error& e) {
      o.require(e.line() == line, "wrong line number");
      o.require(std::string(e.what()).find("line " + std::to_string(line)) != std::string::npos,
                "message lacks line number");
    }
  }
  return o;
}

} // namespace

int main() {
  criterion(1, "activity sum rule", 1, activity_sum_rule);
  criterion(2, "pearson contract", 1, pearson_contract);
  criterion(3, "combination criterion oracle", 1, combination_oracle);
  criterion(4, "incremental equals from-scratch", 30, incremental_equivalence);
  criterion(5, "router dominance and ttl monotonicity", 60, router_dominance);
  criterion(6, "space-crossing vs pp-only and direct", 60, directional_reproduction);
  criterion(7, "betweenness oracle", 10, betweenness_oracle);
  criterion(8, "sweep determinism on desk preset", 120, sweep_determinism);
  criterion(9, "trace format golden", 0, trace_golden);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
