// Two clusters joined only through an access point: compares SAAS under the
// space-crossing and PP-only pipelines against direct delivery.

#include <cstdio>

#include "saasim/saasim.hpp"

using namespace saasim;

int main() {
  const auto trace = planted_two_cluster_trace({}, 7);
  const auto users = trace_users(trace.events, trace.aps);
  traffic_config traffic;
  traffic.packets_per_node = 20;
  const auto messages =
      generate_traffic(users, trace_start(trace.events), trace_end(trace.events), traffic, 1);

  timeline_config tc;
  tc.alpha = 0.6;
  tc.centrality = false;
  const auto sc_timeline = build_timeline(trace.events, trace.aps, tc);
  tc.pipeline = sc_pipeline::pp_only;
  const auto pp_timeline = build_timeline(trace.events, trace.aps, tc);

  sim_config sim;
  sim.ttl = 86400;
  struct run {
    const char* label;
    const char* router;
    const community_timeline* tl;
  };
  for (const run& r : {run{"saas/space-crossing", "saas", &sc_timeline}, run{"saas/pp-only", "saas", &pp_timeline},
                       run{"direct", "direct", &sc_timeline}}) {
    sim.router = r.router;
    const auto m = run_simulation(trace.events, trace.aps, *r.tl, messages, sim).stats;
    std::printf("%-20s delivered %3llu/%llu  ratio %.3f  latency %s s\n", r.label,
                static_cast<unsigned long long>(m.delivered), static_cast<unsigned long long>(m.created),
                m.delivery_ratio, format_optional(m.average_latency).c_str());
  }
}
