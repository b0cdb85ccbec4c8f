#include "netmimo/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "netmimo/error.hpp"
#include "netmimo/numeric.hpp"

namespace netmimo {

Utility parse_utility(const std::string& name, double alpha) {
  if (name == "pf" || name == "proportional_fair") return {UtilityKind::ProportionalFair, 1.0};
  if (name == "maxmin" || name == "max_min") return {UtilityKind::MaxMin, 0.0};
  if (name == "alpha" || name == "alpha_fair") {
    if (!(alpha > 0.0)) throw ConfigError(fmt::format("fairness alpha must be positive, got {}", alpha));
    return {UtilityKind::AlphaFair, alpha};
  }
  throw ConfigError(fmt::format("unknown utility '{}' (expected pf, maxmin or alpha)", name));
}

double utility_of(const std::vector<double>& rates, Utility utility) {
  if (utility.kind == UtilityKind::MaxMin) return *std::min_element(rates.begin(), rates.end());
  const double a = utility.kind == UtilityKind::ProportionalFair ? 1.0 : utility.alpha;
  CompensatedSum sum;
  for (double r : rates) {
    if (!(r > 0.0)) return -std::numeric_limits<double>::infinity();
    sum += std::abs(a - 1.0) < 1e-12 ? std::log(r) : std::pow(r, 1.0 - a) / (1.0 - a);
  }
  return sum.value();
}

std::vector<double> project_to_simplex(const std::vector<double>& v) {
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

namespace {

std::vector<double> scaled(const std::vector<double>& rho, const std::vector<double>& r_star) {
  std::vector<double> r(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) r[k] = rho[k] * r_star[k];
  return r;
}

// Projected gradient ascent with backtracking on the simplex.
std::vector<double> alpha_fair_shares(const std::vector<double>& r_star, double alpha, int* iterations) {
  const std::size_t K = r_star.size();
  const Utility u{UtilityKind::AlphaFair, alpha};
  std::vector<double> rho(K, 1.0 / static_cast<double>(K));
  double value = utility_of(scaled(rho, r_star), u);
  double step = 1.0 / static_cast<double>(K);
  std::vector<double> grad(K), trial(K);
  int it = 0;
  for (; it < 100000; ++it) {
    double gmax = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      grad[k] = std::pow(r_star[k], 1.0 - alpha) * std::pow(rho[k], -alpha);
      gmax = std::max(gmax, std::abs(grad[k]));
    }
    for (auto& g : grad) g /= gmax;
    bool accepted = false;
    double next_value = value;
    for (int halvings = 0; halvings < 80; ++halvings) {
      for (std::size_t k = 0; k < K; ++k) trial[k] = rho[k] + step * grad[k];
      trial = project_to_simplex(trial);
      next_value = utility_of(scaled(trial, r_star), u);
      if (next_value > value) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double gain = next_value - value;
    rho = trial;
    value = next_value;
    step *= 2.0;
    if (gain < 1e-10 * std::max(1.0, std::abs(value))) break;
  }
  *iterations = it + 1;
  return rho;
}

}  // namespace

SchedulePlan schedule(const std::vector<double>& r_star, Utility utility) {
  if (r_star.empty()) throw ConfigError("no bin rates to schedule");
  for (double r : r_star) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError(fmt::format("bin rate {} is not positive", r));
  }
  const std::size_t K = r_star.size();
  SchedulePlan plan;
  plan.utility = utility;
  switch (utility.kind) {
    case UtilityKind::ProportionalFair:
      plan.rho.assign(K, 1.0 / static_cast<double>(K));
      break;
    case UtilityKind::MaxMin: {
      CompensatedSum inv;
      for (double r : r_star) inv += 1.0 / r;
      for (double r : r_star) plan.rho.push_back(1.0 / r / inv.value());
      break;
    }
    case UtilityKind::AlphaFair:
      plan.rho = alpha_fair_shares(r_star, utility.alpha, &plan.iterations);
      break;
  }
  plan.rates = scaled(plan.rho, r_star);
  plan.utility_value = utility_of(plan.rates, utility);
  return plan;
}

double system_throughput(const SchedulePlan& plan, double bandwidth_hz) {
  CompensatedSum sum;
  for (double r : plan.rates) sum += r;
  return sum.value() * bandwidth_hz;
}

}  // namespace netmimo
