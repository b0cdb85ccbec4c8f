#include "netmimo/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "netmimo/error.hpp"
#include "netmimo/scheduler.hpp"

namespace netmimo {

namespace {

std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.line < 0) return "config";
  return fmt::format("line {}", m.line + 1);
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) {
  throw ConfigError(fmt::format("{}: {}", where(n), msg));
}

void check_map(const YAML::Node& n, const std::string& section, const std::set<std::string>& allowed) {
  if (!n.IsMap()) fail(n, fmt::format("section '{}' must be a mapping", section));
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, fmt::format("unknown key '{}' in section '{}'", key, section));
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, fmt::format("'{}' has the wrong type", key));
  }
}

template <class T>
void read(const YAML::Node& parent, const std::string& key, T& out) {
  if (auto n = parent[key]) out = scalar<T>(n, key);
}

template <class T>
void read_list(const YAML::Node& parent, const std::string& key, std::vector<T>& out) {
  auto n = parent[key];
  if (!n) return;
  out.clear();
  if (n.IsScalar()) {
    out.push_back(scalar<T>(n, key));
    return;
  }
  if (!n.IsSequence()) fail(n, fmt::format("'{}' must be a list", key));
  for (const auto& e : n) out.push_back(scalar<T>(e, key));
}

void require(bool ok, const YAML::Node& parent, const std::string& key, const std::string& msg) {
  if (ok) return;
  auto n = parent[key];
  fail(n ? n : parent, fmt::format("'{}' {}", key, msg));
}

ClusterMode parse_mode(const YAML::Node& n) {
  const auto s = scalar<std::string>(n, "cluster_mode");
  if (s == "switched") return ClusterMode::Switched;
  if (s == "up") return ClusterMode::FixedUp;
  if (s == "down") return ClusterMode::FixedDown;
  fail(n, fmt::format("unknown cluster_mode '{}' (expected switched, up or down)", s));
}

SchemeSpec parse_scheme(const YAML::Node& n) {
  SchemeSpec s;
  if (n.IsScalar()) {
    const auto text = n.as<std::string>();
    char tail = 0;
    if (std::sscanf(text.c_str(), "(%d,%d,%d)Q%d%c", &s.F, &s.C, &s.J, &s.Q, &tail) != 4) {
      fail(n, fmt::format("scheme '{}' is not of the form (F,C,J)Q", text));
    }
    return s;
  }
  check_map(n, "family.schemes", {"F", "C", "J", "Q", "S"});
  for (const char* k : {"F", "C", "J", "Q"}) {
    if (!n[k]) fail(n, fmt::format("scheme entry needs '{}'", k));
  }
  read(n, "F", s.F);
  read(n, "C", s.C);
  read(n, "J", s.J);
  read(n, "Q", s.Q);
  read(n, "S", s.S);
  require(s.S >= 0.0, n, "S", "must be non-negative");
  return s;
}

void parse_layout(const YAML::Node& n, LayoutConfig& c) {
  check_map(n, "layout", {"dimension", "B", "hex_radius_km", "grid_density", "user_offset", "cluster_mode", "bins"});
  read(n, "dimension", c.dimension);
  require(c.dimension == 1 || c.dimension == 2, n, "dimension", "must be 1 or 2");
  read(n, "B", c.bs_count);
  require(c.bs_count >= 1, n, "B", "must be positive");
  read(n, "hex_radius_km", c.hex_radius_km);
  require(c.hex_radius_km > 0.0, n, "hex_radius_km", "must be positive");
  read(n, "grid_density", c.grid_density);
  require(c.grid_density >= 2, n, "grid_density", "must be at least 2");
  if (auto u = n["user_offset"]) {
    if (c.dimension != 1) fail(u, "user_offset applies to 1-D layouts only");
    c.user_offset = scalar<double>(u, "user_offset");
  }
  if (auto m = n["cluster_mode"]) c.cluster_mode = parse_mode(m);
  if (auto b = n["bins"]) {
    check_map(b, "layout.bins", {"x", "points", "radii", "angles_deg"});
    if (c.dimension == 1) {
      for (const char* k : {"points", "radii", "angles_deg"}) {
        if (b[k]) fail(b[k], fmt::format("'{}' applies to 2-D layouts only", k));
      }
      read_list(b, "x", c.bin_x);
      for (double x : c.bin_x) require(x >= 0.0 && x <= 0.5, b, "x", "entries must lie in [0, 0.5]");
    } else {
      if (b["x"]) fail(b["x"], "'x' applies to 1-D layouts only");
      read_list(b, "radii", c.bin_radii);
      for (double r : c.bin_radii) require(r >= 0.0 && r < 1.0, b, "radii", "entries must lie in [0, 1)");
      read_list(b, "angles_deg", c.bin_angles_deg);
      if (auto p = b["points"]) {
        if (!p.IsSequence()) fail(p, "'points' must be a list of [x, y] pairs");
        for (const auto& e : p) {
          auto v = scalar<std::vector<double>>(e, "points");
          if (v.size() != 2) fail(e, "each point needs two coordinates");
          c.bin_points.push_back({v[0], v[1]});
        }
      }
    }
  }
}

void parse_pathloss(const YAML::Node& n, PathlossModel& p) {
  check_map(n, "pathloss", {"G0", "alpha", "delta"});
  read(n, "G0", p.G0);
  require(p.G0 > 0.0, n, "G0", "must be positive");
  read(n, "alpha", p.alpha);
  require(p.alpha > 0.0, n, "alpha", "must be positive");
  read(n, "delta", p.delta);
  require(p.delta > 0.0, n, "delta", "must be positive");
}

void parse_system(const YAML::Node& n, SystemConfig& s) {
  check_map(n, "system", {"M", "M_list", "L", "U", "alpha_ul", "bandwidth_hz"});
  read(n, "M", s.M);
  require(s.M > 0.0, n, "M", "must be positive");
  read_list(n, "M_list", s.M_list);
  for (double m : s.M_list) require(m > 0.0, n, "M_list", "entries must be positive");
  read(n, "L", s.L);
  require(s.L > 0.0, n, "L", "must be positive");
  read(n, "U", s.U);
  require(s.U >= 0.0, n, "U", "must be non-negative");
  read(n, "alpha_ul", s.alpha_ul);
  require(s.alpha_ul > 0.0, n, "alpha_ul", "must be positive");
  read(n, "bandwidth_hz", s.bandwidth_hz);
  require(s.bandwidth_hz > 0.0, n, "bandwidth_hz", "must be positive");
}

void parse_family(const YAML::Node& n, FamilyConfig& f) {
  check_map(n, "family", {"F", "C", "Q", "J", "schemes", "S_max"});
  read_list(n, "F", f.F);
  read_list(n, "C", f.C);
  read_list(n, "Q", f.Q);
  if (auto j = n["J"]) {
    std::vector<std::string> names;
    read_list(n, "J", names);
    f.J.clear();
    for (const auto& s : names) {
      try {
        f.J.push_back(parse_j_rule(s));
      } catch (const ConfigError& e) {
        fail(j, e.what());
      }
    }
  }
  if (auto s = n["schemes"]) {
    if (n["F"] || n["C"] || n["Q"] || n["J"]) fail(s, "give either 'schemes' or the F/C/Q/J sets, not both");
    if (!s.IsSequence()) fail(s, "'schemes' must be a list");
    f.explicit_list = true;
    for (const auto& e : s) {
      auto spec = parse_scheme(e);
      try {
        validate_scheme({spec.F, spec.C, spec.J, spec.Q, 1.0, 1.0});
      } catch (const ConfigError& err) {
        fail(e, err.what());
      }
      f.schemes.push_back(spec);
    }
  }
  read(n, "S_max", f.S_max);
  require(f.S_max >= 0.0, n, "S_max", "must be non-negative");
}

void parse_run(const YAML::Node& n, RunConfig& r) {
  check_map(n, "run", {"command", "seed", "trials", "N", "threads", "rel_tol", "se_factor", "utility",
                       "fairness_alpha", "rates", "lemma_trials", "lemma_N", "output"});
  read(n, "command", r.command);
  read(n, "seed", r.seed);
  read(n, "trials", r.trials);
  require(r.trials >= 0, n, "trials", "must be non-negative");
  read_list(n, "N", r.N);
  require(!r.N.empty(), n, "N", "must not be empty");
  for (int v : r.N) require(v >= 1, n, "N", "entries must be positive");
  read(n, "threads", r.threads);
  require(r.threads >= 1, n, "threads", "must be positive");
  read(n, "rel_tol", r.rel_tol);
  require(r.rel_tol > 0.0, n, "rel_tol", "must be positive");
  read(n, "se_factor", r.se_factor);
  require(r.se_factor >= 0.0, n, "se_factor", "must be non-negative");
  read(n, "utility", r.utility);
  read(n, "fairness_alpha", r.fairness_alpha);
  try {
    parse_utility(r.utility, r.fairness_alpha);
  } catch (const ConfigError& e) {
    fail(n["utility"] ? n["utility"] : n, e.what());
  }
  read_list(n, "rates", r.rates);
  for (double v : r.rates) require(v > 0.0, n, "rates", "entries must be positive");
  read(n, "lemma_trials", r.lemma_trials);
  require(r.lemma_trials >= 1, n, "lemma_trials", "must be positive");
  read_list(n, "lemma_N", r.lemma_N);
  for (int v : r.lemma_N) require(v >= 1, n, "lemma_N", "entries must be positive");
  read(n, "output", r.output);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  ExperimentConfig cfg;
  if (root.IsNull()) return cfg;
  check_map(root, "top level", {"layout", "pathloss", "system", "family", "run"});
  if (auto n = root["layout"]) parse_layout(n, cfg.layout);
  if (auto n = root["pathloss"]) parse_pathloss(n, cfg.pathloss);
  if (auto n = root["system"]) parse_system(n, cfg.system);
  if (auto n = root["family"]) parse_family(n, cfg.family);
  if (auto n = root["run"]) parse_run(n, cfg.run);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace netmimo
