#pragma once

// Sweeps over routers x alpha x ttl x seed, aggregation and result files.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "saasim/community.hpp"
#include "saasim/error.hpp"
#include "saasim/routers.hpp"
#include "saasim/simulation.hpp"
#include "saasim/trace.hpp"

namespace saasim {

struct ap_source {
  std::optional<std::filesystem::path> file; ///< ring order, one id per line
  std::size_t count = 0;                     ///< random designation when no file
  std::uint64_t seed = 1;
};

struct experiment_config {
  std::filesystem::path trace_path;
  ap_source aps;
  snapshot_config graph;
  seconds refresh = 1800;
  std::vector<double> alphas{0.6};
  std::vector<seconds> ttls{86400};
  std::vector<std::string> routers{"saas"};
  std::vector<std::uint64_t> seeds{1};
  traffic_config traffic;
  std::uint64_t buffer_bytes = 5'000'000;
  density_detector::params detector;
  bool incremental = false;
  std::size_t workers = 1;

  void validate() const {
    if (alphas.empty()) throw config_error("at least one alpha is required");
    for (double a : alphas) check_alpha(a);
    if (ttls.empty()) throw config_error("at least one ttl is required");
    for (seconds t : ttls)
      if (t <= 0) throw config_error("ttl values must be positive");
    if (routers.empty()) throw config_error("at least one router is required");
    for (const auto& r : routers) make_router(r);
    if (seeds.empty()) throw config_error("at least one seed is required");
    if (refresh <= 0) throw config_error("refresh interval must be positive");
    if (!aps.file && aps.count == 0) throw config_error("access points need a file or a positive count");
    if (workers == 0) throw config_error("workers must be at least 1");
  }
};

struct experiment_inputs {
  std::vector<contact_event> events;
  ap_designation aps;
};

inline experiment_inputs load_inputs(const experiment_config& cfg) {
  experiment_inputs in;
  std::ifstream trace(cfg.trace_path);
  if (!trace) throw io_error("cannot open trace " + cfg.trace_path.string());
  try {
    in.events = parse_contact_trace(trace);
  } catch (const parse_error& e) {
    throw parse_error(e.line(), cfg.trace_path.string() + ": " + e.detail());
  }
  if (cfg.aps.file) {
    std::ifstream f(*cfg.aps.file);
    if (!f) throw io_error("cannot open AP list " + cfg.aps.file->string());
    in.aps = parse_ap_list(f);
  } else {
    const auto nodes = trace_nodes(in.events);
    in.aps = designate_aps(nodes, cfg.aps.count, cfg.aps.seed);
  }
  return in;
}

struct run_row {
  std::string router;
  double alpha = 0.0;
  seconds ttl = 0;
  std::uint64_t seed = 0;
  metrics stats;
};

struct result_table {
  sc_pipeline pipeline = sc_pipeline::space_crossing;
  std::vector<run_row> rows; ///< router, alpha, ttl, seed in config order
};

inline timeline_config timeline_for(const experiment_config& cfg, double alpha, sc_pipeline pipeline) {
  timeline_config t;
  t.graph = cfg.graph;
  t.refresh = cfg.refresh;
  t.alpha = alpha;
  t.pipeline = pipeline;
  t.detector = cfg.detector;
  t.incremental = cfg.incremental;
  t.centrality = std::find(cfg.routers.begin(), cfg.routers.end(), "bubble_rap") != cfg.routers.end();
  return t;
}

namespace detail {

/// Runs `job(i)` for i in [0, n) on up to `workers` threads. The exception of
/// the lowest failing index is rethrown after all threads finish.
template <class Job>
void parallel_for(std::size_t n, std::size_t workers, Job job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t k = std::min(workers, n);
  if (k <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace detail

/// Full Cartesian sweep. Traffic depends only on the seed, so every router and
/// pipeline sees the same messages for a given seed.
inline result_table run_experiment(const experiment_config& cfg, const experiment_inputs& in,
                                   sc_pipeline pipeline = sc_pipeline::space_crossing) {
  cfg.validate();
  std::vector<community_timeline> timelines(cfg.alphas.size());
  detail::parallel_for(cfg.alphas.size(), cfg.workers, [&](std::size_t i) {
    timelines[i] = build_timeline(in.events, in.aps, timeline_for(cfg, cfg.alphas[i], pipeline));
  });
  const auto users = trace_users(in.events, in.aps);
  std::vector<std::vector<message_spec>> traffic(cfg.seeds.size());
  for (std::size_t s = 0; s < cfg.seeds.size(); ++s)
    traffic[s] = generate_traffic(users, trace_start(in.events), trace_end(in.events), cfg.traffic, cfg.seeds[s]);

  result_table table;
  table.pipeline = pipeline;
  for (const auto& r : cfg.routers)
    for (double a : cfg.alphas)
      for (seconds ttl : cfg.ttls)
        for (std::uint64_t seed : cfg.seeds) table.rows.push_back({r, a, ttl, seed, {}});

  const std::size_t per_router = cfg.alphas.size() * cfg.ttls.size() * cfg.seeds.size();
  detail::parallel_for(table.rows.size(), cfg.workers, [&](std::size_t i) {
    auto& row = table.rows[i];
    const std::size_t rest = i % per_router;
    const std::size_t ai = rest / (cfg.ttls.size() * cfg.seeds.size());
    const std::size_t si = rest % cfg.seeds.size();
    sim_config sc;
    sc.router = row.router;
    sc.ttl = row.ttl;
    sc.buffer_bytes = cfg.buffer_bytes;
    row.stats = run_simulation(in.events, in.aps, timelines[ai], traffic[si], sc).stats;
  });
  return table;
}

/// The same sweep under the space-crossing pipeline and the PP-only pipeline.
inline std::pair<result_table, result_table> compare_detectors(const experiment_config& cfg,
                                                               const experiment_inputs& in) {
  return {run_experiment(cfg, in, sc_pipeline::space_crossing), run_experiment(cfg, in, sc_pipeline::pp_only)};
}

// ---------------------------------------------------------------------------
// Aggregation

struct sample_stats {
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> stddev; ///< sample (n - 1); needs n >= 2
};

inline sample_stats summarize(const std::vector<double>& xs) {
  sample_stats s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  s.mean = m;
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

struct summary_cell {
  std::string router;
  double alpha = 0.0;
  seconds ttl = 0;
  sample_stats delivery_ratio;
  sample_stats avg_latency; ///< over seeds with at least one delivery
};

/// One cell per (router, alpha, ttl) in first-appearance order.
inline std::vector<summary_cell> summarize(const result_table& t) {
  std::vector<summary_cell> out;
  std::map<std::tuple<std::string, double, seconds>, std::size_t> where;
  std::vector<std::vector<double>> ratios, latencies;
  for (const auto& r : t.rows) {
    auto key = std::make_tuple(r.router, r.alpha, r.ttl);
    auto [it, fresh] = where.emplace(key, out.size());
    if (fresh) {
      out.push_back({r.router, r.alpha, r.ttl, {}, {}});
      ratios.emplace_back();
      latencies.emplace_back();
    }
    ratios[it->second].push_back(r.stats.delivery_ratio);
    if (r.stats.average_latency) latencies[it->second].push_back(*r.stats.average_latency);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].delivery_ratio = summarize(ratios[i]);
    out[i].avg_latency = summarize(latencies[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string format_optional(const std::optional<double>& x) { return x ? format_number(*x) : "NA"; }

inline void write_metrics_csv(std::ostream& os, const result_table& t) {
  os << "router,alpha,ttl_s,seed,created,delivered,delivery_ratio,avg_latency_s\n";
  for (const auto& r : t.rows)
    os << r.router << ',' << format_number(r.alpha) << ',' << r.ttl << ',' << r.seed << ',' << r.stats.created
       << ',' << r.stats.delivered << ',' << format_number(r.stats.delivery_ratio) << ','
       << format_optional(r.stats.average_latency) << '\n';
}

inline void write_summary_csv(std::ostream& os, const result_table& t) {
  os << "router,alpha,ttl_s,runs,delivery_ratio_mean,delivery_ratio_sd,avg_latency_mean_s,avg_latency_sd_s\n";
  for (const auto& c : summarize(t))
    os << c.router << ',' << format_number(c.alpha) << ',' << c.ttl << ',' << c.delivery_ratio.n << ','
       << format_optional(c.delivery_ratio.mean) << ',' << format_optional(c.delivery_ratio.stddev) << ','
       << format_optional(c.avg_latency.mean) << ',' << format_optional(c.avg_latency.stddev) << '\n';
}

enum class plot_metric { delivery_ratio, avg_latency };

inline plot_metric parse_plot_metric(const std::string& name) {
  if (name == "delivery_ratio") return plot_metric::delivery_ratio;
  if (name == "avg_latency") return plot_metric::avg_latency;
  throw config_error("unknown metric '" + name + "' (expected delivery_ratio or avg_latency)");
}

inline std::string to_string(plot_metric m) {
  return m == plot_metric::delivery_ratio ? "delivery_ratio" : "avg_latency";
}

struct series {
  std::string router;
  double alpha = 0.0;
  std::vector<std::pair<seconds, sample_stats>> points; ///< ttl ascending

  std::string file_name(plot_metric m) const {
    char a[32];
    std::snprintf(a, sizeof a, "%.2f", alpha);
    return router + "_alpha" + a + "_" + to_string(m) + ".csv";
  }
};

/// One series per (router, alpha): x = ttl, y = metric mean and stddev.
inline std::vector<series> plot_series(const result_table& t, plot_metric m) {
  if (t.rows.empty()) throw state_error("cannot plot an empty result table");
  std::vector<series> out;
  for (const auto& c : summarize(t)) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const series& s) { return s.router == c.router && s.alpha == c.alpha; });
    if (it == out.end()) {
      out.push_back({c.router, c.alpha, {}});
      it = std::prev(out.end());
    }
    it->points.emplace_back(c.ttl, m == plot_metric::delivery_ratio ? c.delivery_ratio : c.avg_latency);
  }
  for (auto& s : out)
    std::stable_sort(s.points.begin(), s.points.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

inline void write_series_csv(std::ostream& os, const series& s) {
  os << "ttl_s,mean,stddev\n";
  for (const auto& [ttl, st] : s.points)
    os << ttl << ',' << format_optional(st.mean) << ',' << format_optional(st.stddev) << '\n';
}

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw io_error("cannot write " + p.string());
  return os;
}

/// Writes one series file per (router, alpha) into `dir`; returns the paths.
inline std::vector<std::filesystem::path> emit_plot_data(const result_table& t, plot_metric m,
                                                         const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& s : plot_series(t, m)) {
    const auto p = dir / s.file_name(m);
    auto os = open_output(p);
    write_series_csv(os, s);
    written.push_back(p);
  }
  return written;
}

/// metrics.csv, summary.csv and series/ for both metrics under `dir`.
inline void write_results(const result_table& t, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());
  {
    auto os = open_output(dir / "metrics.csv");
    write_metrics_csv(os, t);
  }
  {
    auto os = open_output(dir / "summary.csv");
    write_summary_csv(os, t);
  }
  emit_plot_data(t, plot_metric::delivery_ratio, dir / "series");
  emit_plot_data(t, plot_metric::avg_latency, dir / "series");
}

} // namespace saasim
