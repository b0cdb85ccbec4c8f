#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "netmimo/asymptotic.hpp"

namespace netmimo {

/// Which C=3 triangles a 2-D bin may be served by: only upward or only
/// downward ones, or whichever has its centroid closest to the bin.
enum class ClusterMode { FixedUp, FixedDown, Switched };

/// Representative location of a bin: x in [0, 1/2] (1-D) or a point of the
/// reference cell (2-D).
struct BinSite {
  int id = 0;
  Point point;
  int ring = 0;  ///< radial index for 2-D grids, 0 = innermost
};

/// 1-D representatives: user grid points in [0, 1/2], x_k = u0 + k/K.
std::vector<BinSite> grid_bins_1d(const Layout& layout);
/// 2-D representatives on a polar grid of the reference hexagon. `radii` are
/// fractions of the distance to the cell boundary along each ray and
/// `angles_deg` are measured from the direction of a hexagon vertex.
std::vector<BinSite> polar_bins_2d(const Layout& layout, const std::vector<double>& radii,
                                   const std::vector<double>& angles_deg);

/// Builds and caches the scenario of each (bin, F, C, Q).
class ScenarioFactory {
 public:
  ScenarioFactory(Layout layout, PathlossModel pathloss, SystemParams system, std::vector<BinSite> bins,
                  ClusterMode mode = ClusterMode::Switched);

  const Layout& layout() const { return layout_; }
  const SystemParams& system() const { return system_; }
  const PathlossModel& pathloss() const { return pathloss_; }
  const std::vector<BinSite>& bins() const { return bins_; }
  int num_bins() const { return static_cast<int>(bins_.size()); }

  /// Scenario of bin index `bin` (position in `bins()`).
  const Scenario& scenario(int bin, int F, int C, int Q) const;

 private:
  Layout layout_;
  PathlossModel pathloss_;
  SystemParams system_;
  std::vector<BinSite> bins_;
  ClusterMode mode_;
  mutable std::mutex mutex_;
  mutable std::map<std::tuple<int, int, int, int>, std::unique_ptr<Scenario>> cache_;
};

/// J as a function of (C, Q).
enum class JRule { Zero, One, EqualQ, Masked };

int apply_j_rule(JRule rule, int C, int Q);
JRule parse_j_rule(const std::string& name);

/// A scheme without its loading and antenna factors.
struct SchemeSpec {
  int F = 1;
  int C = 1;
  int J = 0;
  int Q = 1;
  double S = 0.0;  ///< fixed loading; 0 means optimize

  friend bool operator==(const SchemeSpec&, const SchemeSpec&) = default;
};

struct SchemeFamily {
  std::vector<SchemeSpec> schemes;
  double s_max = 0.0;  ///< optional cap on S; 0 = none
};

/// Product of the allowed sets, keeping combinations that are valid for the
/// layout (reuse factors, J rules, J > 1 only with Q > 1). Duplicates dropped.
SchemeFamily make_family(const Layout& layout, const std::vector<int>& F, const std::vector<int>& C,
                         const std::vector<int>& Q, const std::vector<JRule>& J);

/// Baseline single-cell scheme (1,1,0) with Q = 1.
SchemeSpec baseline_scheme();

struct LoadingOptimum {
  double S = 0.0;
  double net = 0.0;
};

/// Maximizes net(S) on (0, s_max]: 64-point grid, then golden-section search
/// on the cells around the best grid point down to `tol` in S.
LoadingOptimum maximize_loading(const std::function<double(double)>& net, double s_max, double tol = 1e-4);

/// Upper end of the loading interval: min(C*M, L/Q, C*M/J when J >= 1, cap).
double loading_limit(const SchemeSpec& spec, double M, double L, double cap = 0.0);

/// Net rate of `spec` at loading S; zero where zero forcing is infeasible.
double scheme_net_rate(const Scenario& scn, const SchemeSpec& spec, double S, double M);

struct RankedScheme {
  SchemeConfig config;
  double net_rate = 0.0;
  double group_rate = 0.0;
};

struct BinOptimum {
  int bin_id = 0;
  SchemeConfig best;
  double R_star = 0.0;
  std::vector<RankedScheme> ranking;  ///< best first, at most 5 entries
  double baseline_rate = 0.0;         ///< optimized net rate of the baseline scheme
  double baseline_ratio = 0.0;        ///< R_star / baseline_rate
};

/// Best (F, C, J, Q, S) for one bin at antenna factor M.
RankedScheme optimize_scheme(const ScenarioFactory& factory, int bin, const SchemeSpec& spec, double M,
                             double s_cap = 0.0);
BinOptimum optimize_bin(const ScenarioFactory& factory, int bin, const SchemeFamily& family, double M);
std::vector<BinOptimum> sweep_bins(const ScenarioFactory& factory, const SchemeFamily& family, double M,
                                   int threads = 1);

}  // namespace netmimo
