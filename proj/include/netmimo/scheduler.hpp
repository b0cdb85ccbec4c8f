#pragma once

#include <string>
#include <vector>

namespace netmimo {

enum class UtilityKind { ProportionalFair, MaxMin, AlphaFair };

struct Utility {
  UtilityKind kind = UtilityKind::ProportionalFair;
  double alpha = 1.0;  ///< fairness exponent of AlphaFair
};

Utility parse_utility(const std::string& name, double alpha = 1.0);

struct SchedulePlan {
  Utility utility;
  std::vector<double> rho;    ///< fraction of slots given to each bin, sums to 1
  std::vector<double> rates;  ///< R_k = rho_k * R*_k
  double utility_value = 0.0;
  int iterations = 0;
};

/// Time sharing across bins maximizing the utility of the long-run rates
/// rho_k * R*_k subject to sum rho_k = 1. Every R*_k must be positive.
SchedulePlan schedule(const std::vector<double>& r_star, Utility utility);

/// Sum of the scheduled rates times the bandwidth (bit/s).
double system_throughput(const SchedulePlan& plan, double bandwidth_hz = 20e6);

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(const std::vector<double>& v);

/// Utility of a rate vector (sum of logs, minimum, or alpha-fair sum).
double utility_of(const std::vector<double>& rates, Utility utility);

}  // namespace netmimo
