#pragma once

#include <string>
#include <vector>

#include "netmimo/channel.hpp"

namespace netmimo {

/// One transmission scheme (F, C, J) with pilot reuse Q, loading S = K/N and
/// antenna factor M = per-BS antennas / N.
struct SchemeConfig {
  int F = 1;
  int C = 1;
  int J = 0;
  int Q = 1;
  double S = 1.0;
  double M = 1.0;
};

/// Checks the integer structure of a scheme: J in {0, 1, Q, C(Q-1)+1} and
/// J > 1 only with Q > 1. Throws ConfigError.
void validate_scheme(const SchemeConfig& cfg);

/// "(F,C,J)Q" label, e.g. "(2,2,1)Q2".
std::string scheme_label(const SchemeConfig& cfg);

/// Per-location coefficients of a rate expression. `signal` is the estimate
/// variance of the useful link (xi_000 or its cluster average), `interference`
/// is eta / alpha / underline-alpha and `contamination` is zeta / beta /
/// underline-beta. All three depend on S only through alpha_ul * Q * S.
struct LocationCoefficients {
  double signal = 0.0;
  double interference = 0.0;
  double contamination = 0.0;
};

struct SchemeRate {
  SchemeConfig config;
  double group_rate = 0.0;  ///< bit/s/Hz per bin
  double net_rate = 0.0;    ///< group_rate times the training overhead factor
  std::vector<double> per_location_sinr;
  std::vector<LocationCoefficients> coefficients;
  bool sinr_capped = false;
};

struct RateOptions {
  /// SINR reported when an interference sum is empty.
  double sinr_cap = 1e6;
  /// Report a zero rate instead of throwing when J*S >= C*M.
  bool zero_when_infeasible = false;
};

/// max{1 - QS/L, 0}.
double overhead_factor(int Q, double S, double L);

std::vector<LocationCoefficients> lsubf_coefficients(const Scenario& scn, const SchemeConfig& cfg);
std::vector<LocationCoefficients> lzfbf_single_coefficients(const Scenario& scn, const SchemeConfig& cfg);
std::vector<LocationCoefficients> lzfbf_cluster_coefficients(const Scenario& scn, const SchemeConfig& cfg);

/// Linear single-user beamforming (J = 0).
SchemeRate rate_lsubf(const Scenario& scn, const SchemeConfig& cfg, const RateOptions& opt = {});
/// Linear zero-forcing beamforming with single-BS clusters (C = 1, J >= 1).
SchemeRate rate_lzfbf_single(const Scenario& scn, const SchemeConfig& cfg, const RateOptions& opt = {});
/// Linear zero-forcing beamforming with multi-BS clusters (C > 1, J >= 1).
SchemeRate rate_lzfbf_cluster(const Scenario& scn, const SchemeConfig& cfg, const RateOptions& opt = {});
/// M -> infinity limit of single-cell schemes with full pilot reuse.
SchemeRate rate_massive_limit(const Scenario& scn, const SchemeConfig& cfg, const RateOptions& opt = {});

/// Dispatches to the closed form matching (C, J).
SchemeRate scheme_rate(const Scenario& scn, const SchemeConfig& cfg, const RateOptions& opt = {});

SchemeRate net_rate(SchemeRate rate, int Q, double S, double L);

}  // namespace netmimo
