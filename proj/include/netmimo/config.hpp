#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netmimo/optimizer.hpp"

namespace netmimo {

struct LayoutConfig {
  int dimension = 1;
  int bs_count = 24;
  double hex_radius_km = 1.6;
  int grid_density = 20;
  std::optional<double> user_offset;  ///< 1-D only, in units of the BS spacing
  std::vector<double> bin_x;          ///< explicit 1-D bin representatives
  std::vector<Point> bin_points;      ///< explicit 2-D bin representatives (km)
  std::vector<double> bin_radii{0.125, 0.375, 0.625, 0.875};
  std::vector<double> bin_angles_deg{7.5, 22.5, 37.5, 52.5};
  ClusterMode cluster_mode = ClusterMode::Switched;
};

struct SystemConfig {
  double M = 30.0;
  std::vector<double> M_list;
  double L = 40.0;
  double U = 0.0;  ///< users-per-location factor; 0 disables the m*U >= C*M check
  double alpha_ul = 10.0;
  double bandwidth_hz = 20e6;
};

struct FamilyConfig {
  std::vector<int> F{1};
  std::vector<int> C{1};
  std::vector<int> Q{1};
  std::vector<JRule> J{JRule::Zero, JRule::One, JRule::EqualQ, JRule::Masked};
  bool explicit_list = false;
  std::vector<SchemeSpec> schemes;
  double S_max = 0.0;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 1;
  int trials = 0;
  std::vector<int> N{1};
  int threads = 1;
  double rel_tol = 0.05;
  double se_factor = 3.0;
  std::string utility = "pf";
  double fairness_alpha = 1.0;
  std::vector<double> rates;
  int lemma_trials = 100;
  std::vector<int> lemma_N{1, 2, 4, 8};
  std::string output;
};

struct ExperimentConfig {
  LayoutConfig layout;
  PathlossModel pathloss;
  SystemConfig system;
  FamilyConfig family;
  RunConfig run;
};

/// Parses YAML text. Unknown keys, wrong types and out-of-range values raise
/// ConfigError with the line number of the offending node.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace netmimo
