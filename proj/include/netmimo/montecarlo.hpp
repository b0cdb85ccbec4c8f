#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netmimo/asymptotic.hpp"

namespace netmimo {

/// Everything about a finite-N simulation that does not depend on the random
/// draw: dimensions, MMSE filter weights and the zero-forcing targets of each
/// active cluster.
class TrainingPlan {
 public:
  /// Throws ConfigError unless M*N and S*N/m are positive integers.
  TrainingPlan(const Scenario& scn, const SchemeConfig& cfg, int N);

  const Scenario& scenario() const { return *scn_; }
  const SchemeConfig& config() const { return cfg_; }
  int N() const { return N_; }
  int antennas_per_bs() const { return antennas_; }
  int users_per_location() const { return upl_; }
  int users_per_cluster() const { return upl_ * m_; }
  int multiplicity() const { return m_; }

  /// Active clusters D(0), reference cluster first.
  const std::vector<int>& active_clusters() const { return active_; }
  /// Base stations that belong to at least one active cluster.
  const std::vector<int>& active_bs() const { return bs_list_; }
  /// Slot of a BS in `active_bs()`, or -1.
  int bs_slot(int bs) const { return bs_slot_[static_cast<std::size_t>(bs)]; }

  /// MMSE weight g(x_loc + c, bs) / ((alpha Q S)^-1 + sum over P(q(c)) of gains).
  double weight(int group, int loc, int bs) const;
  /// Per-entry variance of the pilot observation for codebook q at bs.
  double observation_variance(int q, int loc, int bs) const;

  /// One zero-forcing target: users of `group` at root location `loc`, with
  /// only member `kept` of the precoding cluster retained (-1: all members).
  struct Target {
    int group;
    int loc;
    int kept;
  };
  const std::vector<Target>& targets(int cluster) const { return targets_[static_cast<std::size_t>(cluster)]; }

 private:
  const Scenario* scn_;
  SchemeConfig cfg_;
  int N_;
  int antennas_;
  int upl_;
  int m_;
  std::vector<int> active_;
  std::vector<int> bs_list_;
  std::vector<int> bs_slot_;
  std::vector<double> weights_;       // [group][loc][bs]
  std::vector<double> obs_variance_;  // [q][loc][bs]
  std::vector<std::vector<Target>> targets_;
};

/// Channels and pilot observations of one Monte Carlo trial.
///
/// Only what the reference group's rate needs is drawn: the true channels of
/// the reference group to every active BS, and the pilot observations of
/// every codebook at every active BS. Estimates of any group are the MMSE
/// filter applied to the shared observation, so estimates of same-pilot users
/// are exactly proportional.
class ChannelRealization {
 public:
  ChannelRealization() = default;

  const TrainingPlan& plan() const { return *plan_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t trial() const { return trial_; }
  int attempt() const { return attempt_; }

  /// MN x (m * users per location) pilot observation, columns ordered by location.
  const Eigen::MatrixXcd& observation(int bs, int q) const;
  /// True channels of the reference group to `bs`, same column order.
  const Eigen::MatrixXcd& reference_channel(int bs) const;
  /// MMSE estimate at `bs` of the channels of `group`.
  Eigen::MatrixXcd estimate(int group, int bs) const;
  /// Estimation error of the reference group at `bs`.
  Eigen::MatrixXcd reference_error(int bs) const { return reference_channel(bs) - estimate(0, bs); }

 private:
  friend void simulate_training_into(std::shared_ptr<const TrainingPlan>, std::uint64_t, std::uint64_t, int,
                                     ChannelRealization&);
  std::shared_ptr<const TrainingPlan> plan_;
  std::uint64_t seed_ = 0;
  std::uint64_t trial_ = 0;
  int attempt_ = 0;
  std::vector<Eigen::MatrixXcd> obs_;  // [slot][q]
  std::vector<Eigen::MatrixXcd> ref_;  // [slot]
};

void simulate_training_into(std::shared_ptr<const TrainingPlan> plan, std::uint64_t seed, std::uint64_t trial,
                            int attempt, ChannelRealization& out);

/// Draws one realization. Throws ConfigError if S*N/m is not an integer.
ChannelRealization simulate_training(const Scenario& scn, const SchemeConfig& cfg, int N, std::uint64_t seed,
                                     std::uint64_t trial = 0);

struct Precoder {
  Eigen::MatrixXcd V;            ///< C*M*N x S*N, unit-norm columns
  Eigen::MatrixXcd constraints;  ///< stacked (masked) estimates the precoder was computed from
  int J = 0;
  int cluster = 0;
  int block_rows = 0;  ///< antennas per BS
  /// Zero-forcing targets whose estimates were masked to a single BS block.
  std::vector<TrainingPlan::Target> masks;
};

/// Precoder of `cluster` (default: the reference cluster). Throws
/// SingularError if the stacked matrix is column-rank deficient and
/// InfeasibleError if it has more columns than rows.
Precoder build_precoder(const ChannelRealization& real, int cluster = 0);

/// Block traces (1/(S N)) * sum over the rows of BS block b of [V V^H]_ll.
std::vector<double> partial_trace_profile(const Precoder& prec);

struct MonteCarloOptions {
  int N = 1;
  int trials = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  /// Scales the useful and interfering beam powers; noise is unchanged.
  double transmit_power_scale = 1.0;
  /// Receives "trial,location,user,sinr,rate" rows when set.
  std::ostream* diagnostics = nullptr;
};

struct RateEstimate {
  SchemeConfig config;  ///< with S replaced by the simulated loading
  std::vector<double> location_rate;  ///< mean log2(1 + SINR) per user at each location
  std::vector<double> location_se;
  double group_rate = 0.0;
  double group_se = 0.0;
  int users_per_location = 0;
  int trials = 0;
  int resampled = 0;
  std::vector<std::string> warnings;
};

/// Ergodic rate estimate for the reference group. The loading is rounded to
/// the nearest feasible S*N/m; a warning is recorded when S moves by > 1%.
RateEstimate estimate_rates(const Scenario& scn, const SchemeConfig& cfg, const MonteCarloOptions& opt);

/// Loading closest to S for which S*N/m is a positive integer.
double feasible_loading(double S, int N, int m);

}  // namespace netmimo
