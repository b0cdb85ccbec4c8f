#include "netmimo/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include <fmt/format.h>

#include "netmimo/error.hpp"

namespace netmimo {

namespace {

constexpr int kGridPoints = 64;
constexpr std::size_t kRankingDepth = 5;

// Triangle containing BS 0 whose centroid is closest to x, as the root shift s
// (the served triangle is root + s) and the orientation.
struct TriangleChoice {
  ClusterOrientation orientation;
  LatticeCoord shift;
};

TriangleChoice closest_triangle(const Layout& layout, Point x, ClusterMode mode) {
  std::vector<ClusterOrientation> allowed;
  if (mode != ClusterMode::FixedDown) allowed.push_back(ClusterOrientation::Up);
  if (mode != ClusterMode::FixedUp) allowed.push_back(ClusterOrientation::Down);
  TriangleChoice best{allowed.front(), {0, 0}};
  double best_d = std::numeric_limits<double>::infinity();
  for (auto o : allowed) {
    auto root = cluster_template(layout, 3, o);
    Point centroid{0.0, 0.0};
    for (auto z : root) centroid = centroid + layout.to_point(z);
    centroid = (1.0 / 3.0) * centroid;
    for (auto z : root) {
      LatticeCoord s{-z.i, -z.j};
      double d = std::round((x - (centroid + layout.to_point(s))).norm() * 1e9);
      if (d < best_d) {
        best_d = d;
        best = {o, s};
      }
    }
  }
  return best;
}

}  // namespace

std::vector<BinSite> grid_bins_1d(const Layout& layout) {
  if (layout.dimension() != 1) throw ConfigError("grid_bins_1d needs a 1-D layout");
  std::vector<BinSite> bins;
  // Grid points in the half cell [0, 1/2]; the other half mirrors them.
  for (int k = 0; k < layout.user_grid_density(); ++k) {
    const double x = layout.user_grid_point(k).x;
    if (x >= 0.0 && x <= 0.5 + 1e-12) bins.push_back({static_cast<int>(bins.size()), {x, 0.0}, k});
  }
  return bins;
}

std::vector<BinSite> polar_bins_2d(const Layout& layout, const std::vector<double>& radii,
                                   const std::vector<double>& angles_deg) {
  if (layout.dimension() != 2) throw ConfigError("polar_bins_2d needs a 2-D layout");
  const double h = std::sqrt(3.0) / 2.0 * layout.hex_radius();
  std::vector<BinSite> bins;
  int id = 0;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    if (!(radii[r] >= 0.0 && radii[r] < 1.0)) throw ConfigError(fmt::format("bin radius {} not in [0, 1)", radii[r]));
    for (double a : angles_deg) {
      double folded = std::fmod(std::fmod(a, 60.0) + 60.0, 60.0);
      double boundary = h / std::cos((folded - 30.0) * std::numbers::pi / 180.0);
      double rho = radii[r] * boundary;
      double t = a * std::numbers::pi / 180.0;
      bins.push_back({id++, {rho * std::cos(t), rho * std::sin(t)}, static_cast<int>(r)});
    }
  }
  return bins;
}

ScenarioFactory::ScenarioFactory(Layout layout, PathlossModel pathloss, SystemParams system,
                                 std::vector<BinSite> bins, ClusterMode mode)
    : layout_(std::move(layout)),
      pathloss_(pathloss),
      system_(system),
      bins_(std::move(bins)),
      mode_(mode) {
  if (bins_.empty()) throw ConfigError("no bins to evaluate");
}

const Scenario& ScenarioFactory::scenario(int bin, int F, int C, int Q) const {
  if (bin < 0 || bin >= num_bins()) throw ConfigError(fmt::format("bin index {} out of range", bin));
  std::lock_guard lock(mutex_);
  auto key = std::make_tuple(bin, F, C, Q);
  if (auto it = cache_.find(key); it != cache_.end()) return *it->second;

  const Point x = bins_[static_cast<std::size_t>(bin)].point;
  std::vector<LatticeCoord> root;
  BinDescriptor desc;
  if (layout_.dimension() == 1) {
    root = cluster_template(layout_, C);
    desc = C == 1 ? BinDescriptor::mirror_pair(x.x) : BinDescriptor::cluster_pair(x.x);
  } else if (C == 1) {
    root = cluster_template(layout_, 1);
    desc = BinDescriptor::orbit(x, {0.0, 0.0}, 3);
  } else {
    auto choice = closest_triangle(layout_, x, mode_);
    root = cluster_template(layout_, C, choice.orientation);
    // Translate the bin so that the root cluster serves it.
    desc = BinDescriptor::orbit(x - layout_.to_point(choice.shift), build_cluster_pattern(layout_, root).root_centroid(),
                                3);
  }
  auto clusters = build_cluster_pattern(layout_, root);
  auto binp = build_bin(layout_, clusters, desc);
  auto reuse = assign_reuse(layout_, clusters, F, Q);
  auto scn = std::make_unique<Scenario>(layout_, std::move(clusters), std::move(binp), std::move(reuse), pathloss_,
                                        system_);
  const Scenario& ref = *scn;
  cache_.emplace(key, std::move(scn));
  return ref;
}

int apply_j_rule(JRule rule, int C, int Q) {
  switch (rule) {
    case JRule::Zero: return 0;
    case JRule::One: return 1;
    case JRule::EqualQ: return Q;
    case JRule::Masked: return C * (Q - 1) + 1;
  }
  return 0;
}

JRule parse_j_rule(const std::string& name) {
  if (name == "zero" || name == "0") return JRule::Zero;
  if (name == "one" || name == "1") return JRule::One;
  if (name == "Q" || name == "q") return JRule::EqualQ;
  if (name == "masked") return JRule::Masked;
  throw ConfigError(fmt::format("unknown J rule '{}' (expected zero, one, Q or masked)", name));
}

SchemeFamily make_family(const Layout& layout, const std::vector<int>& F, const std::vector<int>& C,
                         const std::vector<int>& Q, const std::vector<JRule>& J) {
  SchemeFamily fam;
  const auto single = build_cluster_pattern(layout, std::vector<LatticeCoord>{{0, 0}});
  for (int f : F) {
    for (int c : C) {
      for (int q : Q) {
        try {
          assign_reuse(layout, single, f, q);
          cluster_template(layout, c);
        } catch (const ConfigError&) {
          continue;
        }
        for (auto rule : J) {
          SchemeSpec s{f, c, apply_j_rule(rule, c, q), q, 0.0};
          if (s.J > 1 && q <= 1) continue;
          if (std::find(fam.schemes.begin(), fam.schemes.end(), s) == fam.schemes.end()) fam.schemes.push_back(s);
        }
      }
    }
  }
  if (fam.schemes.empty()) throw ConfigError("the scheme family is empty for this layout");
  return fam;
}

SchemeSpec baseline_scheme() { return {1, 1, 0, 1, 0.0}; }

LoadingOptimum maximize_loading(const std::function<double(double)>& net, double s_max, double tol) {
  if (!(s_max > 0.0)) throw ConfigError("empty loading interval");
  LoadingOptimum best;
  int best_i = 0;
  for (int i = 1; i <= kGridPoints; ++i) {
    double s = s_max * i / kGridPoints;
    double v = net(s);
    if (!std::isfinite(v)) throw NumericalError(fmt::format("non-finite net rate at S = {}", s));
    if (i == 1 || v > best.net) {
      best = {s, v};
      best_i = i;
    }
  }
  double a = s_max * (best_i - 1) / kGridPoints;
  double b = s_max * std::min(best_i + 1, kGridPoints) / kGridPoints;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = net(c);
  double fd = net(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = net(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = net(d);
    }
  }
  if (fc > best.net) best = {c, fc};
  if (fd > best.net) best = {d, fd};
  return best;
}

double loading_limit(const SchemeSpec& spec, double M, double L, double cap) {
  double lim = std::min(spec.C * M, L / spec.Q);
  if (spec.J >= 1) lim = std::min(lim, spec.C * M / spec.J);
  if (cap > 0.0) lim = std::min(lim, cap);
  return lim;
}

double scheme_net_rate(const Scenario& scn, const SchemeSpec& spec, double S, double M) {
  SchemeConfig cfg{spec.F, spec.C, spec.J, spec.Q, S, M};
  RateOptions opt;
  opt.zero_when_infeasible = true;
  auto r = scheme_rate(scn, cfg, opt);
  return r.group_rate * overhead_factor(spec.Q, S, scn.system().L);
}

RankedScheme optimize_scheme(const ScenarioFactory& factory, int bin, const SchemeSpec& spec, double M,
                             double s_cap) {
  const double L = factory.system().L;
  const double lim = loading_limit(spec, M, L, s_cap);
  if (!(lim > 0.0)) {
    std::string binding = "C*M";
    if (L / spec.Q <= lim) binding = "L/Q";
    if (s_cap > 0.0 && s_cap <= lim) binding = "S_max";
    throw ConfigError(fmt::format("scheme ({},{},{})Q{} has an empty loading interval (binding: {})", spec.F, spec.C,
                                  spec.J, spec.Q, binding));
  }
  const Scenario& scn = factory.scenario(bin, spec.F, spec.C, spec.Q);
  double S = spec.S;
  if (S > 0.0) {
    if (S > lim) {
      throw ConfigError(fmt::format("fixed loading S = {} exceeds the feasible limit {}", S, lim));
    }
  } else {
    S = maximize_loading([&](double s) { return scheme_net_rate(scn, spec, s, M); }, lim).S;
  }
  SchemeConfig cfg{spec.F, spec.C, spec.J, spec.Q, S, M};
  RateOptions opt;
  opt.zero_when_infeasible = true;
  auto r = scheme_rate(scn, cfg, opt);
  return {cfg, r.group_rate * overhead_factor(spec.Q, S, factory.system().L), r.group_rate};
}

BinOptimum optimize_bin(const ScenarioFactory& factory, int bin, const SchemeFamily& family, double M) {
  if (family.schemes.empty()) throw ConfigError("the scheme family is empty");
  std::vector<RankedScheme> all;
  all.reserve(family.schemes.size());
  for (const auto& spec : family.schemes) all.push_back(optimize_scheme(factory, bin, spec, M, family.s_max));
  std::stable_sort(all.begin(), all.end(),
                   [](const RankedScheme& a, const RankedScheme& b) { return a.net_rate > b.net_rate; });
  BinOptimum out;
  out.bin_id = factory.bins()[static_cast<std::size_t>(bin)].id;
  out.best = all.front().config;
  out.R_star = all.front().net_rate;
  all.resize(std::min(all.size(), kRankingDepth));
  out.ranking = std::move(all);
  out.baseline_rate = optimize_scheme(factory, bin, baseline_scheme(), M, family.s_max).net_rate;
  out.baseline_ratio = out.baseline_rate > 0.0 ? out.R_star / out.baseline_rate
                                               : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<BinOptimum> sweep_bins(const ScenarioFactory& factory, const SchemeFamily& family, double M,
                                   int threads) {
  const int n = factory.num_bins();
  std::vector<BinOptimum> out(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int k = next++; k < n; k = next++) {
      try {
        out[static_cast<std::size_t>(k)] = optimize_bin(factory, k, family, M);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const int t = std::clamp(threads, 1, std::max(1, n));
  if (t == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace netmimo
