#include "netmimo/asymptotic.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "netmimo/error.hpp"
#include "netmimo/numeric.hpp"

namespace netmimo {

namespace {

void check_consistent(const Scenario& scn, const SchemeConfig& cfg) {
  validate_scheme(cfg);
  if (cfg.F != scn.reuse().F || cfg.Q != scn.reuse().Q || cfg.C != scn.cluster_size()) {
    throw ConfigError(fmt::format("scheme {} does not match the scenario (F={}, C={}, Q={})", scheme_label(cfg),
                                  scn.reuse().F, scn.cluster_size(), scn.reuse().Q));
  }
  if (!(cfg.S > 0.0)) throw ConfigError(fmt::format("loading factor S must be positive, got {}", cfg.S));
  if (!(cfg.M > 0.0)) throw ConfigError(fmt::format("antenna factor M must be positive, got {}", cfg.M));
  if (cfg.S > cfg.C * cfg.M) {
    throw ConfigError(fmt::format("loading factor S = {} exceeds C*M = {}", cfg.S, cfg.C * cfg.M));
  }
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

SchemeRate assemble(const Scenario& scn, const SchemeConfig& cfg, std::vector<LocationCoefficients> coeffs,
                    double signal_scale, double contamination_scale) {
  SchemeRate r;
  r.config = cfg;
  CompensatedSum total;
  for (const auto& k : coeffs) {
    const double sinr =
        signal_scale * k.signal / (1.0 / cfg.F + k.interference + contamination_scale * k.contamination);
    r.per_location_sinr.push_back(sinr);
    total += std::log2(1.0 + sinr);
  }
  r.coefficients = std::move(coeffs);
  r.group_rate = cfg.S / (scn.multiplicity() * cfg.F) * total.value();
  r.net_rate = overhead_factor(cfg.Q, cfg.S, scn.system().L) * r.group_rate;
  return r;
}

SchemeRate zero_rate(const Scenario& scn, const SchemeConfig& cfg, std::vector<LocationCoefficients> coeffs) {
  SchemeRate r;
  r.config = cfg;
  r.coefficients = std::move(coeffs);
  r.per_location_sinr.assign(static_cast<std::size_t>(scn.multiplicity()), 0.0);
  return r;
}

void check_zf_feasible(const SchemeConfig& cfg, const RateOptions& opt, bool* zero) {
  *zero = false;
  if (cfg.J * cfg.S >= cfg.C * cfg.M) {
    if (!opt.zero_when_infeasible) {
      throw InfeasibleError(fmt::format("J*S = {} must be below C*M = {}", cfg.J * cfg.S, cfg.C * cfg.M));
    }
    *zero = true;
  }
}

}  // namespace

void validate_scheme(const SchemeConfig& cfg) {
  if (cfg.F < 1 || cfg.C < 1 || cfg.Q < 1) throw ConfigError("F, C and Q must be positive");
  if (cfg.J < 0) throw ConfigError("J must be non-negative");
  if (cfg.J > 1 && cfg.Q <= 1) {
    throw ConfigError(fmt::format("J = {} > 1 requires pilot reuse Q > 1", cfg.J));
  }
  if (cfg.J != 0 && cfg.J != 1 && cfg.J != cfg.Q && cfg.J != cfg.C * (cfg.Q - 1) + 1) {
    throw ConfigError(fmt::format("J = {} not in {{0, 1, Q, C(Q-1)+1}} for C = {}, Q = {}", cfg.J, cfg.C, cfg.Q));
  }
}

std::string scheme_label(const SchemeConfig& cfg) {
  return fmt::format("({},{},{})Q{}", cfg.F, cfg.C, cfg.J, cfg.Q);
}

double overhead_factor(int Q, double S, double L) { return std::max(1.0 - Q * S / L, 0.0); }

std::vector<LocationCoefficients> lsubf_coefficients(const Scenario& scn, const SchemeConfig& cfg) {
  const auto& reuse = scn.reuse();
  const int m = scn.multiplicity();
  const int C = scn.cluster_size();
  const double S = cfg.S;
  const auto& active = reuse.D(0);
  const auto& same_pilot = reuse.P(0, 0);

  // xi_{c,c,b}(x') / xi-bar_{c,c}(x') for every x', c in D(0), b.
  std::vector<double> weight(static_cast<std::size_t>(m) * active.size() * static_cast<std::size_t>(C));
  auto widx = [&](int i, std::size_t a, int b) {
    return (static_cast<std::size_t>(i) * active.size() + a) * static_cast<std::size_t>(C) + static_cast<std::size_t>(b);
  };
  for (int i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < active.size(); ++a) {
      const int c = active[a];
      const double xi_bar = cluster_averages(scn, i, c, S).xi_own;
      for (int b = 0; b < C; ++b) {
        weight[widx(i, a, b)] = link_coefficients(scn, i, c, scn.clusters().member(c, b), S).xi / xi_bar;
      }
    }
  }

  std::vector<LocationCoefficients> out;
  for (int i = 0; i < m; ++i) {
    LocationCoefficients k;
    k.signal = cluster_averages(scn, i, 0, S).xi_own;
    CompensatedSum eta;
    for (int ip = 0; ip < m; ++ip) {
      for (int b = 0; b < C; ++b) {
        for (std::size_t a = 0; a < active.size(); ++a) {
          eta += weight[widx(ip, a, b)] * scn.gain(i, 0, scn.clusters().member(active[a], b));
        }
      }
    }
    k.interference = eta.value() / (m * C);
    CompensatedSum zeta;
    for (int c : same_pilot) {
      if (c == 0) continue;
      CompensatedSum inner;
      for (int b = 0; b < C; ++b) {
        const int bs = scn.clusters().member(c, b);
        inner += scn.gain(i, 0, bs) / scn.gain(i, c, bs) * link_coefficients(scn, i, c, bs, S).xi;
      }
      const double v = inner.value() / C;
      zeta += v * v / cluster_averages(scn, i, c, S).xi_own;
    }
    k.contamination = zeta.value();
    out.push_back(k);
  }
  return out;
}

std::vector<LocationCoefficients> lzfbf_single_coefficients(const Scenario& scn, const SchemeConfig& cfg) {
  const auto& reuse = scn.reuse();
  const int m = scn.multiplicity();
  const double S = cfg.S;
  const auto& same_pilot = reuse.P(0, 0);
  std::vector<LocationCoefficients> out;
  for (int i = 0; i < m; ++i) {
    const auto E = nearest_zf_clusters(scn.layout(), scn.clusters(), reuse, scn.bin().locations[static_cast<std::size_t>(i)],
                                       cfg.J, 0);
    LocationCoefficients k;
    k.signal = link_coefficients(scn, i, 0, 0, S).xi;
    CompensatedSum alpha;
    for (int c : reuse.D(0)) {
      const int bs = scn.clusters().member(c, 0);
      if (contains(same_pilot, c) || contains(E, c)) {
        alpha += link_coefficients(scn, i, 0, bs, S).sigma;
      } else {
        alpha += scn.gain(i, 0, bs);
      }
    }
    k.interference = alpha.value();
    CompensatedSum beta;
    for (int c : same_pilot) {
      if (c == 0) continue;
      const int bs = scn.clusters().member(c, 0);
      const double ratio = scn.gain(i, 0, bs) / scn.gain(i, c, bs);
      beta += ratio * ratio * link_coefficients(scn, i, c, bs, S).xi;
    }
    k.contamination = beta.value();
    out.push_back(k);
  }
  return out;
}

std::vector<LocationCoefficients> lzfbf_cluster_coefficients(const Scenario& scn, const SchemeConfig& cfg) {
  const auto& reuse = scn.reuse();
  const auto& cl = scn.clusters();
  const int m = scn.multiplicity();
  const int C = scn.cluster_size();
  const double S = cfg.S;
  const bool masked = cfg.J != 1 && cfg.J != cfg.Q && cfg.J == C * (cfg.Q - 1) + 1;
  std::vector<LocationCoefficients> out;
  for (int i = 0; i < m; ++i) {
    const Point x = scn.bin().locations[static_cast<std::size_t>(i)];
    const auto E = nearest_zf_clusters(scn.layout(), cl, reuse, x, cfg.J, 0);
    LocationCoefficients k;
    k.signal = cluster_averages(scn, i, 0, S).xi_own;
    CompensatedSum alpha;
    alpha += cluster_averages(scn, i, 0, S).sigma_ref;
    for (int c : reuse.D(0)) {
      if (c == 0) continue;
      if (!contains(E, c)) {
        alpha += cluster_averages(scn, i, c, S).gain_ref;
      } else if (!masked) {
        alpha += cluster_averages(scn, i, c, S).sigma_ref;
      } else {
        const int bx = cl.closest_member(scn.layout(), x, c);
        CompensatedSum t;
        for (int b = 0; b < C; ++b) {
          const int bs = cl.member(c, b);
          t += b == bx ? link_coefficients(scn, i, 0, bs, S).sigma : scn.gain(i, 0, bs);
        }
        alpha += t.value() / C;
      }
    }
    k.interference = alpha.value();
    CompensatedSum beta;
    for (int c : reuse.P(0, 0)) {
      if (c == 0) continue;
      CompensatedSum inner;
      for (int b = 0; b < C; ++b) {
        const int bs = cl.member(c, b);
        const double ratio = scn.gain(i, 0, bs) / scn.gain(i, c, bs);
        inner += ratio * ratio * link_coefficients(scn, i, c, bs, S).xi;
      }
      beta += inner.value() / C;
    }
    k.contamination = beta.value();
    out.push_back(k);
  }
  return out;
}

SchemeRate rate_lsubf(const Scenario& scn, const SchemeConfig& cfg, const RateOptions& opt) {
  (void)opt;
  check_consistent(scn, cfg);
  if (cfg.J != 0) throw ConfigError("linear single-user beamforming requires J = 0");
  const double load = cfg.C * cfg.M / cfg.S;
  return assemble(scn, cfg, lsubf_coefficients(scn, cfg), load, load);
}

SchemeRate rate_lzfbf_single(const Scenario& scn, const SchemeConfig& cfg, const RateOptions& opt) {
  check_consistent(scn, cfg);
  if (cfg.C != 1 || cfg.J < 1) throw ConfigError("single-cell zero forcing requires C = 1 and J >= 1");
  bool zero = false;
  check_zf_feasible(cfg, opt, &zero);
  auto coeffs = lzfbf_single_coefficients(scn, cfg);
  if (zero) return zero_rate(scn, cfg, std::move(coeffs));
  const double dof = (cfg.M - cfg.J * cfg.S) / cfg.S;
  return assemble(scn, cfg, std::move(coeffs), dof, dof);
}

SchemeRate rate_lzfbf_cluster(const Scenario& scn, const SchemeConfig& cfg, const RateOptions& opt) {
  check_consistent(scn, cfg);
  if (cfg.C <= 1 || cfg.J < 1) throw ConfigError("cluster zero forcing requires C > 1 and J >= 1");
  bool zero = false;
  check_zf_feasible(cfg, opt, &zero);
  auto coeffs = lzfbf_cluster_coefficients(scn, cfg);
  if (zero) return zero_rate(scn, cfg, std::move(coeffs));
  const double dof = (cfg.C * cfg.M - cfg.J * cfg.S) / cfg.S;
  return assemble(scn, cfg, std::move(coeffs), dof, cfg.C * cfg.M / cfg.S);
}

SchemeRate rate_massive_limit(const Scenario& scn, const SchemeConfig& cfg, const RateOptions& opt) {
  if (cfg.C != 1 || cfg.Q != 1) throw ConfigError("the massive-MIMO limit is defined for C = 1, Q = 1");
  if (cfg.F != scn.reuse().F || scn.cluster_size() != 1 || scn.reuse().Q != 1) {
    throw ConfigError("scheme does not match the scenario");
  }
  SchemeRate r;
  r.config = cfg;
  CompensatedSum total;
  for (int i = 0; i < scn.multiplicity(); ++i) {
    const double own = scn.gain(i, 0, 0);
    CompensatedSum contamination;
    for (int c : scn.reuse().P(0, 0)) {
      if (c == 0) continue;
      const double g = scn.gain(i, 0, c);
      contamination += g * g;
    }
    double sinr = opt.sinr_cap;
    if (contamination.value() > 0.0) {
      sinr = own * own / contamination.value();
    } else {
      r.sinr_capped = true;
    }
    r.per_location_sinr.push_back(sinr);
    r.coefficients.push_back({own, 0.0, contamination.value()});
    total += std::log2(1.0 + sinr);
  }
  r.group_rate = cfg.S / (scn.multiplicity() * cfg.F) * total.value();
  r.net_rate = overhead_factor(cfg.Q, cfg.S, scn.system().L) * r.group_rate;
  return r;
}

SchemeRate scheme_rate(const Scenario& scn, const SchemeConfig& cfg, const RateOptions& opt) {
  if (cfg.J == 0) return rate_lsubf(scn, cfg, opt);
  if (cfg.C == 1) return rate_lzfbf_single(scn, cfg, opt);
  return rate_lzfbf_cluster(scn, cfg, opt);
}

SchemeRate net_rate(SchemeRate rate, int Q, double S, double L) {
  if (Q < 1 || !(S > 0.0) || !(L > 0.0)) throw ConfigError("net rate needs Q, S, L > 0");
  rate.net_rate = overhead_factor(Q, S, L) * rate.group_rate;
  return rate;
}

}  // namespace netmimo
