#include "netmimo/experiments.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "netmimo/error.hpp"
#include "netmimo/numeric.hpp"

namespace netmimo {

namespace {

std::string scheme_tag(const SchemeSpec& s) { return fmt::format("F{}C{}J{}Q{}", s.F, s.C, s.J, s.Q); }

std::string output_name(const Experiment& ex, const std::string& fallback) {
  return ex.config.run.output.empty() ? fallback : ex.config.run.output;
}

// Sibling file of the primary output: "map.csv" -> "map_ranking.csv".
std::string sibling(const std::string& primary, const std::string& suffix) {
  auto dot = primary.rfind('.');
  if (dot == std::string::npos) return primary + "_" + suffix;
  return primary.substr(0, dot) + "_" + suffix + primary.substr(dot);
}

std::vector<double> m_values(const SystemConfig& s) {
  return s.M_list.empty() ? std::vector<double>{s.M} : s.M_list;
}

}  // namespace

std::string format_number(double v) { return fmt::format("{:.10g}", v); }

std::vector<BinSite> configured_bins(const Layout& layout, const LayoutConfig& cfg) {
  std::vector<BinSite> bins;
  if (layout.dimension() == 1) {
    if (cfg.bin_x.empty()) return grid_bins_1d(layout);
    for (std::size_t k = 0; k < cfg.bin_x.size(); ++k) {
      bins.push_back({static_cast<int>(k), {cfg.bin_x[k], 0.0}, static_cast<int>(k)});
    }
    return bins;
  }
  if (cfg.bin_points.empty()) return polar_bins_2d(layout, cfg.bin_radii, cfg.bin_angles_deg);
  for (std::size_t k = 0; k < cfg.bin_points.size(); ++k) bins.push_back({static_cast<int>(k), cfg.bin_points[k], 0});
  return bins;
}

Experiment build_experiment(const ExperimentConfig& cfg) {
  Experiment ex;
  ex.config = cfg;
  const auto& lc = cfg.layout;
  Layout layout = build_layout(lc.dimension, lc.bs_count, lc.dimension == 1 ? 0.5 : lc.hex_radius_km, lc.grid_density);
  if (lc.user_offset) layout.set_user_offset({*lc.user_offset, 0.0});
  auto bins = configured_bins(layout, lc);
  const auto& fc = cfg.family;
  if (fc.explicit_list) {
    ex.family.schemes = fc.schemes;
  } else {
    ex.family = make_family(layout, fc.F, fc.C, fc.Q, fc.J);
  }
  ex.family.s_max = fc.S_max;
  if (cfg.system.U > 0.0) {
    const int m = lc.dimension == 1 ? 2 : 3;
    for (const auto& s : ex.family.schemes) {
      for (double M : m_values(cfg.system)) {
        if (m * cfg.system.U < s.C * M) {
          throw ConfigError(fmt::format("scheme {} at M = {} needs m*U >= C*M ({} < {})",
                                        scheme_label({s.F, s.C, s.J, s.Q, 1.0, M}), M, m * cfg.system.U, s.C * M));
        }
      }
    }
  }
  ex.factory = std::make_unique<ScenarioFactory>(std::move(layout), cfg.pathloss,
                                                 SystemParams{cfg.system.L, cfg.system.alpha_ul}, std::move(bins),
                                                 lc.cluster_mode);
  return ex;
}

double simulation_loading(const SchemeConfig& cfg, double S, int N, int m, double L) {
  const double step = static_cast<double>(m) / N;
  double s = feasible_loading(S, N, m);
  while (s > 0.0 && ((cfg.J >= 1 && cfg.J * s >= cfg.C * cfg.M) || cfg.Q * s >= L || s > cfg.C * cfg.M)) s -= step;
  if (!(s > 0.0)) {
    throw ConfigError(fmt::format("no simulable loading for {} with N = {} (needs S*N/m integer)", scheme_label(cfg), N));
  }
  return s;
}

Comparison compare_bin(const ScenarioFactory& factory, int bin, const SchemeSpec& spec, double M,
                       const MonteCarloOptions& opt, double rel_tol, double se_factor, double s_cap) {
  const Scenario& scn = factory.scenario(bin, spec.F, spec.C, spec.Q);
  SchemeConfig cfg = optimize_scheme(factory, bin, spec, M, s_cap).config;
  cfg.S = simulation_loading(cfg, cfg.S, opt.N, scn.multiplicity(), factory.system().L);
  Comparison c;
  c.bin_id = factory.bins()[static_cast<std::size_t>(bin)].id;
  c.N = opt.N;
  c.closed_form = scheme_rate(scn, cfg).group_rate;
  auto est = estimate_rates(scn, cfg, opt);
  c.config = est.config;
  c.monte_carlo = est.group_rate;
  c.standard_error = est.group_se;
  c.tolerance = std::max(rel_tol * std::abs(c.closed_form), se_factor * c.standard_error);
  c.pass = std::abs(c.monte_carlo - c.closed_form) <= c.tolerance;
  return c;
}

std::vector<TraceRow> partial_trace_table(const Scenario& scn, const SchemeConfig& cfg, const std::vector<int>& Ns,
                                          int trials, std::uint64_t seed) {
  if (cfg.J < 1) throw ConfigError("partial traces need a zero-forcing scheme (J >= 1)");
  const int C = scn.cluster_size();
  std::vector<TraceRow> rows;
  for (int N : Ns) {
    auto plan = std::make_shared<const TrainingPlan>(scn, cfg, N);
    TraceRow row;
    row.N = N;
    row.trials = trials;
    std::vector<CompensatedSum> sums(static_cast<std::size_t>(C));
    CompensatedSum spread;
    ChannelRealization real;
    for (int t = 0; t < trials; ++t) {
      Precoder prec;
      for (int attempt = 0;; ++attempt) {
        simulate_training_into(plan, seed, static_cast<std::uint64_t>(t), attempt, real);
        try {
          prec = build_precoder(real, 0);
          break;
        } catch (const SingularError&) {
          if (attempt >= 7) throw;
        }
      }
      auto prof = partial_trace_profile(prec);
      CompensatedSum total;
      double worst = 0.0;
      for (int b = 0; b < C; ++b) {
        const double v = prof[static_cast<std::size_t>(b)];
        sums[static_cast<std::size_t>(b)] += v;
        total += v;
        worst = std::max(worst, std::abs(v - 1.0 / C));
      }
      spread += worst;
      row.max_total_error = std::max(row.max_total_error, std::abs(total.value() - 1.0));
    }
    for (int b = 0; b < C; ++b) {
      const double mean = sums[static_cast<std::size_t>(b)].value() / trials;
      row.mean_trace.push_back(mean);
      row.max_deviation = std::max(row.max_deviation, std::abs(mean - 1.0 / C));
    }
    row.mean_max_deviation = spread.value() / trials;
    rows.push_back(std::move(row));
  }
  return rows;
}

int check_training_identities(const Scenario& scn, double S, std::vector<std::string>* failures) {
  int bad = 0;
  for (int i = 0; i < scn.multiplicity(); ++i) {
    for (int src = 0; src < scn.num_bs(); ++src) {
      for (int bs = 0; bs < scn.num_bs(); ++bs) {
        const auto t = link_coefficients(scn, i, src, bs, S);
        if (!satisfies_training_identity(t)) {
          ++bad;
          if (failures) {
            failures->push_back(fmt::format("location {} group {} bs {}: xi + sigma = {:.17g} != g = {:.17g}", i, src,
                                            bs, t.xi + t.sigma, t.g));
          }
        }
      }
    }
  }
  return bad;
}

double pf_throughput(const std::vector<double>& r_star, double bandwidth_hz) {
  return system_throughput(schedule(r_star, {UtilityKind::ProportionalFair, 1.0}), bandwidth_hz);
}

double baseline_asymptote(const ScenarioFactory& factory) {
  const double L = factory.system().L;
  CompensatedSum sum;
  for (int k = 0; k < factory.num_bins(); ++k) {
    const Scenario& scn = factory.scenario(k, 1, 1, 1);
    auto net = [&](double S) {
      SchemeConfig cfg{1, 1, 0, 1, S, 1.0};
      return rate_massive_limit(scn, cfg).group_rate * overhead_factor(1, S, L);
    };
    sum += maximize_loading(net, L).net;
  }
  return sum.value() / factory.num_bins();
}

// ---------------------------------------------------------------------------

CommandResult cmd_bin_rates(const Experiment& ex) {
  const auto& run = ex.config.run;
  const double M = ex.config.system.M;
  const ScenarioFactory& fac = *ex.factory;
  const bool mc = run.trials > 0;
  std::string csv = "bin_id,x,y,scheme,F,C,J,Q,S,group_rate,net_rate";
  if (mc) csv += ",N,S_mc,closed_form_at_S_mc,mc_group_rate,mc_se";
  csv += "\n";
  for (int k = 0; k < fac.num_bins(); ++k) {
    const auto& site = fac.bins()[static_cast<std::size_t>(k)];
    for (const auto& spec : ex.family.schemes) {
      auto r = optimize_scheme(fac, k, spec, M, ex.family.s_max);
      csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}", site.id, format_number(site.point.x),
                         format_number(site.point.y), scheme_tag(spec), spec.F, spec.C, spec.J, spec.Q,
                         format_number(r.config.S), format_number(r.group_rate), format_number(r.net_rate));
      if (mc) {
        MonteCarloOptions opt;
        opt.N = run.N.front();
        opt.trials = run.trials;
        opt.seed = run.seed;
        opt.threads = run.threads;
        auto c = compare_bin(fac, k, spec, M, opt, run.rel_tol, run.se_factor, ex.family.s_max);
        csv += fmt::format(",{},{},{},{},{}", c.N, format_number(c.config.S), format_number(c.closed_form),
                           format_number(c.monte_carlo), format_number(c.standard_error));
      }
      csv += "\n";
    }
  }
  CommandResult res;
  res.files.push_back({output_name(ex, "bin_rates.csv"), std::move(csv)});
  return res;
}

CommandResult cmd_optimize_map(const Experiment& ex) {
  const auto& run = ex.config.run;
  const ScenarioFactory& fac = *ex.factory;
  std::string map = "M,bin_id,x,y,ring,scheme,F,C,J,Q,S_star,R_star,baseline_rate,baseline_ratio\n";
  std::string ranking = "M,bin_id,rank,scheme,S,net_rate\n";
  for (double M : m_values(ex.config.system)) {
    auto opt = sweep_bins(fac, ex.family, M, run.threads);
    for (std::size_t k = 0; k < opt.size(); ++k) {
      const auto& site = fac.bins()[k];
      const auto& b = opt[k];
      const SchemeSpec best{b.best.F, b.best.C, b.best.J, b.best.Q, 0.0};
      map += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", format_number(M), b.bin_id,
                         format_number(site.point.x), format_number(site.point.y), site.ring, scheme_tag(best),
                         best.F, best.C, best.J, best.Q, format_number(b.best.S), format_number(b.R_star),
                         format_number(b.baseline_rate), format_number(b.baseline_ratio));
      for (std::size_t r = 0; r < b.ranking.size(); ++r) {
        const auto& c = b.ranking[r].config;
        ranking += fmt::format("{},{},{},{},{},{}\n", format_number(M), b.bin_id, r + 1,
                               scheme_tag({c.F, c.C, c.J, c.Q, 0.0}), format_number(c.S),
                               format_number(b.ranking[r].net_rate));
      }
    }
  }
  CommandResult res;
  const auto name = output_name(ex, "optimize_map.csv");
  res.files.push_back({name, std::move(map)});
  res.files.push_back({sibling(name, "ranking"), std::move(ranking)});
  return res;
}

CommandResult cmd_throughput_sweep(const Experiment& ex) {
  const auto& sys = ex.config.system;
  const ScenarioFactory& fac = *ex.factory;
  const double bw_mbps = sys.bandwidth_hz / 1e6;
  std::string csv = "M,optimized_mbps,baseline_mbps,baseline_asymptote_mbps";
  for (const auto& s : ex.family.schemes) csv += "," + scheme_tag(s) + "_mbps";
  csv += "\n";
  const double asymptote = baseline_asymptote(fac) * bw_mbps;
  for (double M : m_values(sys)) {
    auto opt = sweep_bins(fac, ex.family, M, ex.config.run.threads);
    std::vector<double> best, base;
    for (const auto& b : opt) {
      best.push_back(b.R_star);
      base.push_back(b.baseline_rate);
    }
    csv += fmt::format("{},{},{},{}", format_number(M), format_number(pf_throughput(best, bw_mbps)),
                       format_number(pf_throughput(base, bw_mbps)), format_number(asymptote));
    for (const auto& s : ex.family.schemes) {
      CompensatedSum sum;
      for (int k = 0; k < fac.num_bins(); ++k) sum += optimize_scheme(fac, k, s, M, ex.family.s_max).net_rate;
      // PF shares are 1/K, so the fixed-scheme throughput is the bin average.
      csv += "," + format_number(sum.value() / fac.num_bins() * bw_mbps);
    }
    csv += "\n";
  }
  CommandResult res;
  res.files.push_back({output_name(ex, "throughput_sweep.csv"), std::move(csv)});
  return res;
}

CommandResult cmd_validate(const Experiment& ex) {
  const auto& run = ex.config.run;
  const double M = ex.config.system.M;
  const ScenarioFactory& fac = *ex.factory;
  if (run.trials < 1) throw ConfigError("validate needs run.trials >= 1");
  CommandResult res;
  std::string csv = "bin_id,scheme,N,S,closed_form,monte_carlo,mc_se,rel_diff,tolerance,pass\n";
  int passed = 0;
  int total = 0;
  for (int N : run.N) {
    for (int k = 0; k < fac.num_bins(); ++k) {
      for (const auto& spec : ex.family.schemes) {
        MonteCarloOptions opt;
        opt.N = N;
        opt.trials = run.trials;
        opt.seed = run.seed;
        opt.threads = run.threads;
        auto c = compare_bin(fac, k, spec, M, opt, run.rel_tol, run.se_factor, ex.family.s_max);
        ++total;
        passed += c.pass ? 1 : 0;
        csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", c.bin_id, scheme_tag(spec), N, format_number(c.config.S),
                           format_number(c.closed_form), format_number(c.monte_carlo),
                           format_number(c.standard_error),
                           format_number((c.monte_carlo - c.closed_form) / c.closed_form),
                           format_number(c.tolerance), c.pass ? 1 : 0);
      }
    }
  }
  res.all_pass = passed == total;
  res.messages.push_back(fmt::format("closed form vs Monte Carlo: {}/{} within tolerance", passed, total));
  const auto name = output_name(ex, "validate.csv");
  res.files.push_back({name, std::move(csv)});

  // Training identities on every scenario of the family at its bin optimum.
  int violations = 0;
  std::vector<std::string> failures;
  for (int k = 0; k < fac.num_bins(); ++k) {
    for (const auto& spec : ex.family.schemes) {
      auto r = optimize_scheme(fac, k, spec, M, ex.family.s_max);
      violations += check_training_identities(fac.scenario(k, spec.F, spec.C, spec.Q), r.config.S, &failures);
    }
  }
  if (violations > 0) res.all_pass = false;
  res.messages.push_back(fmt::format("training identity xi + sigma = g: {} violations", violations));
  for (const auto& f : failures) res.messages.push_back(f);

  // Partial traces of the first multi-BS zero-forcing scheme, if any.
  auto it = std::find_if(ex.family.schemes.begin(), ex.family.schemes.end(),
                         [](const SchemeSpec& s) { return s.C > 1 && s.J >= 1; });
  if (it != ex.family.schemes.end()) {
    const Scenario& scn = fac.scenario(0, it->F, it->C, it->Q);
    SchemeConfig cfg = optimize_scheme(fac, 0, *it, M, ex.family.s_max).config;
    cfg.S = simulation_loading(cfg, cfg.S, 1, scn.multiplicity(), fac.system().L);
    auto rows = partial_trace_table(scn, cfg, run.lemma_N, run.lemma_trials, run.seed);
    std::string tr = "N,trials";
    for (int b = 0; b < it->C; ++b) tr += fmt::format(",trace_bs{}", b);
    tr += ",max_deviation,mean_max_deviation,max_total_error\n";
    for (const auto& r : rows) {
      tr += fmt::format("{},{}", r.N, r.trials);
      for (double v : r.mean_trace) tr += "," + format_number(v);
      tr += fmt::format(",{},{},{}\n", format_number(r.max_deviation), format_number(r.mean_max_deviation),
                        format_number(r.max_total_error));
    }
    res.files.push_back({sibling(name, "partial_trace"), std::move(tr)});
  }
  return res;
}

CommandResult cmd_schedule(const Experiment& ex) {
  const auto& run = ex.config.run;
  const ScenarioFactory& fac = *ex.factory;
  std::vector<double> r_star = run.rates;
  std::vector<int> ids;
  if (r_star.empty()) {
    for (const auto& b : sweep_bins(fac, ex.family, ex.config.system.M, run.threads)) {
      r_star.push_back(b.R_star);
      ids.push_back(b.bin_id);
    }
  } else {
    for (std::size_t k = 0; k < r_star.size(); ++k) ids.push_back(static_cast<int>(k));
  }
  auto plan = schedule(r_star, parse_utility(run.utility, run.fairness_alpha));
  std::string csv = "bin_id,rho,R_star,R,utility\n";
  for (std::size_t k = 0; k < r_star.size(); ++k) {
    csv += fmt::format("{},{},{},{},{}\n", ids[k], format_number(plan.rho[k]), format_number(r_star[k]),
                       format_number(plan.rates[k]), format_number(plan.utility_value));
  }
  CommandResult res;
  res.files.push_back({output_name(ex, "schedule.csv"), std::move(csv)});
  res.messages.push_back(fmt::format("system throughput: {} Mbit/s per cluster",
                                     format_number(system_throughput(plan, ex.config.system.bandwidth_hz) / 1e6)));
  return res;
}

CommandResult run_command(const std::string& command, const Experiment& ex) {
  if (command == "bin-rates") return cmd_bin_rates(ex);
  if (command == "optimize-map") return cmd_optimize_map(ex);
  if (command == "throughput-sweep") return cmd_throughput_sweep(ex);
  if (command == "validate") return cmd_validate(ex);
  if (command == "schedule") return cmd_schedule(ex);
  throw ConfigError(fmt::format("unknown command '{}'", command));
}

}  // namespace netmimo
