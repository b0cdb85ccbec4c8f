#pragma once

#include <memory>
#include <string>
#include <vector>

#include "netmimo/config.hpp"
#include "netmimo/montecarlo.hpp"
#include "netmimo/optimizer.hpp"
#include "netmimo/scheduler.hpp"

namespace netmimo {

/// A parsed configuration turned into a layout, bins and a scheme family.
struct Experiment {
  ExperimentConfig config;
  std::unique_ptr<ScenarioFactory> factory;
  SchemeFamily family;
};

Experiment build_experiment(const ExperimentConfig& cfg);

/// Bins of a layout section: explicit representatives or the default grid.
std::vector<BinSite> configured_bins(const Layout& layout, const LayoutConfig& cfg);

struct CsvFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  std::vector<CsvFile> files;
  std::vector<std::string> messages;
  bool all_pass = true;
};

/// Fixed-precision number formatting used by every CSV writer.
std::string format_number(double v);

/// Loading used for a finite-N simulation of a scheme whose optimum is S:
/// the nearest S with S*N/m integer, stepped down while J*S >= C*M or Q*S >= L.
double simulation_loading(const SchemeConfig& cfg, double S, int N, int m, double L);

struct Comparison {
  int bin_id = 0;
  SchemeConfig config;  ///< with the simulated loading
  int N = 1;
  double closed_form = 0.0;
  double monte_carlo = 0.0;
  double standard_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Closed form vs Monte Carlo group spectral efficiency of one scheme at one
/// bin. The loading is the closed-form optimum rounded for the simulation;
/// the tolerance is max(rel_tol * closed form, se_factor * standard error).
Comparison compare_bin(const ScenarioFactory& factory, int bin, const SchemeSpec& spec, double M,
                       const MonteCarloOptions& opt, double rel_tol, double se_factor, double s_cap = 0.0);

struct TraceRow {
  int N = 1;
  int trials = 0;
  std::vector<double> mean_trace;  ///< per-BS partial trace averaged over realizations
  double max_deviation = 0.0;      ///< max over BSs of |mean trace - 1/C|
  double mean_max_deviation = 0.0; ///< per-realization max over BSs of |trace - 1/C|, averaged
  double max_total_error = 0.0;    ///< max over realizations of |sum of traces - 1|
};

/// Partial traces of the zero-forcing precoder of the reference cluster.
std::vector<TraceRow> partial_trace_table(const Scenario& scn, const SchemeConfig& cfg, const std::vector<int>& Ns,
                                          int trials, std::uint64_t seed);

/// Checks xi + sigma = g on every (location, group, BS) link; returns the
/// number of violations and appends descriptions to `failures`.
int check_training_identities(const Scenario& scn, double S, std::vector<std::string>* failures);

/// PF throughput of per-bin net rates (bit/s per cluster).
double pf_throughput(const std::vector<double>& r_star, double bandwidth_hz);

/// Mean over bins of the optimized net rate of the baseline scheme in the
/// M -> infinity limit (bit/s/Hz).
double baseline_asymptote(const ScenarioFactory& factory);

CommandResult cmd_bin_rates(const Experiment& ex);
CommandResult cmd_optimize_map(const Experiment& ex);
CommandResult cmd_throughput_sweep(const Experiment& ex);
CommandResult cmd_validate(const Experiment& ex);
CommandResult cmd_schedule(const Experiment& ex);

/// Dispatches on the subcommand name.
CommandResult run_command(const std::string& command, const Experiment& ex);

}  // namespace netmimo
