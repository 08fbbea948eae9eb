// saasim: command-line front end for simulations, sweeps and trace utilities.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "saasim/config.hpp"
#include "saasim/saasim.hpp"

namespace fs = std::filesystem;
using namespace saasim;

namespace {

int cmd_simulate(const fs::path& config, const std::string& out, bool audit) {
  const auto cfg = load_experiment_config(config);
  const auto in = load_inputs(cfg);
  const double alpha = cfg.alphas.front();
  const seconds ttl = cfg.ttls.front();
  const std::uint64_t seed = cfg.seeds.front();
  const auto tl = build_timeline(in.events, in.aps, timeline_for(cfg, alpha, sc_pipeline::space_crossing));
  const auto traffic = generate_traffic(trace_users(in.events, in.aps), trace_start(in.events),
                                        trace_end(in.events), cfg.traffic, seed);
  result_table table;
  for (const auto& r : cfg.routers) {
    sim_config sc;
    sc.router = r;
    sc.ttl = ttl;
    sc.buffer_bytes = cfg.buffer_bytes;
    sc.audit = audit;
    auto res = run_simulation(in.events, in.aps, tl, traffic, sc);
    table.rows.push_back({r, alpha, ttl, seed, res.stats});
    if (audit) {
      if (out.empty()) throw config_error("--audit needs --out");
      fs::create_directories(out);
      auto os = open_output(fs::path(out) / ("audit_" + r + ".csv"));
      write_audit_csv(os, res.audit);
    }
  }
  write_metrics_csv(std::cout, table);
  if (!out.empty()) {
    fs::create_directories(out);
    auto os = open_output(fs::path(out) / "metrics.csv");
    write_metrics_csv(os, table);
  }
  return 0;
}

int cmd_sweep(const fs::path& config, const std::string& out) {
  const auto cfg = load_experiment_config(config);
  const auto in = load_inputs(cfg);
  const auto table = run_experiment(cfg, in);
  write_results(table, out);
  write_summary_csv(std::cout, table);
  return 0;
}

int cmd_compare(const fs::path& config, const std::string& out) {
  const auto cfg = load_experiment_config(config);
  const auto in = load_inputs(cfg);
  const auto [sc, pp] = compare_detectors(cfg, in);
  write_results(sc, fs::path(out) / to_string(sc_pipeline::space_crossing));
  write_results(pp, fs::path(out) / to_string(sc_pipeline::pp_only));
  std::cout << "# " << to_string(sc_pipeline::space_crossing) << '\n';
  write_summary_csv(std::cout, sc);
  std::cout << "# " << to_string(sc_pipeline::pp_only) << '\n';
  write_summary_csv(std::cout, pp);
  return 0;
}

int cmd_dump(const fs::path& config, seconds at, std::optional<double> alpha, bool pp_only) {
  const auto cfg = load_experiment_config(config);
  const auto in = load_inputs(cfg);
  const double a = alpha.value_or(cfg.alphas.front());
  check_alpha(a);
  const auto g = build_snapshot(in.events, in.aps, cfg.graph, at);
  const density_detector det(cfg.detector);
  const auto reg = initialize_sc(g, a, det, pp_only ? sc_pipeline::pp_only : sc_pipeline::space_crossing);
  write_registry(std::cout, reg);
  return 0;
}

int cmd_validate(const fs::path& trace, const std::string& ap_file) {
  std::ifstream in(trace);
  if (!in) throw io_error("cannot open trace " + trace.string());
  std::vector<contact_event> events;
  try {
    events = parse_contact_trace(in);
  } catch (const parse_error& e) {
    throw parse_error(e.line(), trace.string() + ": " + e.detail());
  }
  const auto nodes = trace_nodes(events);
  std::cout << "events " << events.size() << '\n'
            << "nodes " << nodes.size() << '\n'
            << "start " << trace_start(events) << '\n'
            << "end " << trace_end(events) << '\n';
  if (!ap_file.empty()) {
    std::ifstream f(ap_file);
    if (!f) throw io_error("cannot open AP list " + ap_file);
    const auto aps = parse_ap_list(f);
    for (node_id a : aps.aps)
      if (!std::binary_search(nodes.begin(), nodes.end(), a))
        throw validation_error("access point " + std::to_string(a) + " never appears in the trace");
    std::cout << "aps " << aps.size() << '\n';
  }
  return 0;
}

int cmd_synth(const std::string& kind, std::uint64_t seed, const std::string& out, const std::string& aps_out,
              std::size_t users, std::size_t aps, double days) {
  synthetic_trace t;
  if (kind == "community") {
    community_trace_config c;
    c.users = users;
    c.aps = aps;
    c.groups = aps;
    c.span = static_cast<seconds>(days * 86400);
    c.contacts = static_cast<std::size_t>(days * 400);
    c.ap_visits = static_cast<std::size_t>(days * 120);
    t = community_trace(c, seed);
  } else if (kind == "planted") {
    planted_trace_config c;
    c.cluster_size = users / 2;
    c.span = static_cast<seconds>(days * 86400);
    t = planted_two_cluster_trace(c, seed);
  } else {
    throw config_error("unknown trace kind '" + kind + "' (expected community or planted)");
  }
  {
    auto os = open_output(out);
    os << serialize_contact_trace(t.events);
  }
  if (!aps_out.empty()) {
    auto os = open_output(aps_out);
    for (node_id a : t.aps.ring) os << a << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-crossing community DTN routing simulator"};
  app.require_subcommand(1);

  std::string config, out = "results", trace, ap_file, kind = "community", synth_out, synth_aps;
  bool audit = false, pp_only = false;
  seconds at = 0;
  std::optional<double> alpha;
  std::uint64_t seed = 1;
  std::size_t users = 40, aps = 3;
  double days = 7.0;

  auto* sim = app.add_subcommand("simulate", "one run per router at the first alpha, ttl and seed");
  sim->add_option("config", config, "experiment config (YAML)")->required();
  auto* sim_out = sim->add_option("--out", out, "directory for metrics.csv and audit logs");
  sim->add_flag("--audit", audit, "write per-message audit logs");

  auto* sweep = app.add_subcommand("sweep", "full router x alpha x ttl x seed sweep");
  sweep->add_option("config", config, "experiment config (YAML)")->required();
  sweep->add_option("--out", out, "output directory")->capture_default_str();

  auto* cmp = app.add_subcommand("compare-detectors", "sweep under the space-crossing and PP-only pipelines");
  cmp->add_option("config", config, "experiment config (YAML)")->required();
  cmp->add_option("--out", out, "output directory")->capture_default_str();

  auto* dump = app.add_subcommand("dump-communities", "print the SC communities at a time");
  dump->add_option("config", config, "experiment config (YAML)")->required();
  dump->add_option("--at", at, "trace time in seconds")->required();
  dump->add_option("--alpha", alpha, "override the first configured alpha");
  dump->add_flag("--pp-only", pp_only, "skip the AP combination criteria");

  auto* val = app.add_subcommand("validate-trace", "parse and check a contact trace");
  val->add_option("trace", trace, "trace file")->required();
  val->add_option("--aps", ap_file, "AP list to check against the trace");

  auto* synth = app.add_subcommand("synth-trace", "write a seeded synthetic trace");
  synth->add_option("--kind", kind, "community or planted")->capture_default_str();
  synth->add_option("--seed", seed, "random seed")->capture_default_str();
  synth->add_option("--users", users, "number of users")->capture_default_str();
  synth->add_option("--aps", aps, "number of access points (community kind)")->capture_default_str();
  synth->add_option("--days", days, "trace span in days")->capture_default_str();
  synth->add_option("--out", synth_out, "trace output file")->required();
  synth->add_option("--aps-out", synth_aps, "AP list output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(error_category::config);
  }

  try {
    if (*sim) return cmd_simulate(config, sim_out->count() ? out : std::string{}, audit);
    if (*sweep) return cmd_sweep(config, out);
    if (*cmp) return cmd_compare(config, out);
    if (*dump) return cmd_dump(config, at, alpha, pp_only);
    if (*val) return cmd_validate(trace, ap_file);
    if (*synth) return cmd_synth(kind, seed, synth_out, synth_aps, users, aps, days);
  } catch (const saasim::error& e) {
    std::cerr << "saasim: " << e.what() << '\n';
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    std::cerr << "saasim: " << e.what() << '\n';
    return static_cast<int>(error_category::io);
  }
  return 0;
}
