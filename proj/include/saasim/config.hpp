#pragma once

// YAML experiment configuration. Relative paths resolve against the config
// file's directory. Unknown keys are rejected.

#include <filesystem>
#include <set>
#include <string>

#include <yaml-cpp/yaml.h>

#include "saasim/error.hpp"
#include "saasim/experiment.hpp"

namespace saasim {

namespace detail {

inline void check_keys(const YAML::Node& n, const std::string& where, const std::set<std::string>& allowed) {
  if (!n.IsMap()) throw config_error(where + " must be a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw config_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw config_error("invalid value for '" + key + "'");
  }
}

template <class T>
std::vector<T> scalar_list(const YAML::Node& n, const std::string& key) {
  std::vector<T> out;
  if (n.IsScalar()) {
    out.push_back(scalar<T>(n, key));
  } else if (n.IsSequence()) {
    for (const auto& x : n) out.push_back(scalar<T>(x, key));
  } else {
    throw config_error("'" + key + "' must be a value or a list");
  }
  return out;
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

} // namespace detail

inline experiment_config parse_experiment_config(const YAML::Node& root, const std::filesystem::path& base) {
  using detail::scalar;
  experiment_config cfg;
  detail::check_keys(root, "config",
                     {"trace", "aps", "graph", "refresh_s", "alpha", "ttl_s", "routers", "seeds", "traffic",
                      "buffer_bytes", "detector", "incremental", "workers", "scan"});
  if (!root["trace"]) throw config_error("missing 'trace'");
  cfg.trace_path = detail::resolve(base, scalar<std::string>(root["trace"], "trace"));

  const auto aps = root["aps"];
  if (!aps) throw config_error("missing 'aps'");
  detail::check_keys(aps, "aps", {"file", "count", "seed"});
  if (aps["file"]) cfg.aps.file = detail::resolve(base, scalar<std::string>(aps["file"], "aps.file"));
  if (aps["count"]) cfg.aps.count = scalar<std::size_t>(aps["count"], "aps.count");
  if (aps["seed"]) cfg.aps.seed = scalar<std::uint64_t>(aps["seed"], "aps.seed");
  if (cfg.aps.file && aps["count"]) throw config_error("aps: give either 'file' or 'count', not both");

  // WiFi scan interval sets the default refresh; the Bluetooth scan interval
  // is a property of the trace and is only recorded.
  if (const auto scan = root["scan"]) {
    detail::check_keys(scan, "scan", {"bluetooth_s", "wifi_s"});
    if (scan["wifi_s"]) cfg.refresh = scalar<seconds>(scan["wifi_s"], "scan.wifi_s");
  }
  if (root["refresh_s"]) cfg.refresh = scalar<seconds>(root["refresh_s"], "refresh_s");

  if (const auto g = root["graph"]) {
    detail::check_keys(g, "graph", {"window", "interval_s", "window_intervals"});
    if (g["window"]) {
      const auto w = scalar<std::string>(g["window"], "graph.window");
      if (w == "growing")
        cfg.graph.mode = window_mode::growing;
      else if (w == "sliding")
        cfg.graph.mode = window_mode::sliding;
      else
        throw config_error("graph.window must be 'growing' or 'sliding'");
    }
    if (g["interval_s"]) cfg.graph.interval_length = scalar<seconds>(g["interval_s"], "graph.interval_s");
    if (g["window_intervals"])
      cfg.graph.window = scalar<interval_index>(g["window_intervals"], "graph.window_intervals");
  }

  if (root["alpha"]) cfg.alphas = detail::scalar_list<double>(root["alpha"], "alpha");
  if (root["ttl_s"]) cfg.ttls = detail::scalar_list<seconds>(root["ttl_s"], "ttl_s");
  if (root["routers"]) cfg.routers = detail::scalar_list<std::string>(root["routers"], "routers");
  if (const auto s = root["seeds"]) {
    if (s.IsMap()) {
      detail::check_keys(s, "seeds", {"from", "to"});
      if (!s["from"] || !s["to"]) throw config_error("seeds range needs 'from' and 'to'");
      const auto from = scalar<std::uint64_t>(s["from"], "seeds.from");
      const auto to = scalar<std::uint64_t>(s["to"], "seeds.to");
      if (to < from) throw config_error("seeds range is empty");
      cfg.seeds.clear();
      for (auto x = from; x <= to; ++x) cfg.seeds.push_back(x);
    } else {
      cfg.seeds = detail::scalar_list<std::uint64_t>(s, "seeds");
    }
  }
  if (const auto t = root["traffic"]) {
    detail::check_keys(t, "traffic", {"packets_per_node", "min_size", "max_size", "creation_span"});
    if (t["packets_per_node"])
      cfg.traffic.packets_per_node = scalar<std::uint32_t>(t["packets_per_node"], "traffic.packets_per_node");
    if (t["min_size"]) cfg.traffic.min_size = scalar<std::uint32_t>(t["min_size"], "traffic.min_size");
    if (t["max_size"]) cfg.traffic.max_size = scalar<std::uint32_t>(t["max_size"], "traffic.max_size");
    if (t["creation_span"])
      cfg.traffic.creation_span = scalar<double>(t["creation_span"], "traffic.creation_span");
  }
  if (root["buffer_bytes"]) cfg.buffer_bytes = scalar<std::uint64_t>(root["buffer_bytes"], "buffer_bytes");
  if (const auto d = root["detector"]) {
    detail::check_keys(d, "detector", {"tau", "beta"});
    if (d["tau"]) cfg.detector.tau = scalar<double>(d["tau"], "detector.tau");
    if (d["beta"]) cfg.detector.beta = scalar<double>(d["beta"], "detector.beta");
  }
  if (root["incremental"]) cfg.incremental = scalar<bool>(root["incremental"], "incremental");
  if (root["workers"]) cfg.workers = scalar<std::size_t>(root["workers"], "workers");
  cfg.validate();
  return cfg;
}

inline experiment_config load_experiment_config(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw io_error("cannot open config " + path.string());
  } catch (const YAML::ParserException& e) {
    throw config_error(path.string() + ": " + e.what());
  }
  return parse_experiment_config(root, path.parent_path());
}

} // namespace saasim
