#include "netmimo/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/QR>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "netmimo/error.hpp"
#include "netmimo/numeric.hpp"
#include "netmimo/rng.hpp"

namespace netmimo {

namespace {

constexpr std::uint64_t kObservationTag = 1;
constexpr std::uint64_t kChannelTag = 2;
constexpr int kMaxAttempts = 8;

int exact_positive_int(double v, const char* what) {
  const double r = std::round(v);
  if (r < 1.0 || std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v))) {
    throw ConfigError(fmt::format("{} = {} must be a positive integer", what, v));
  }
  return static_cast<int>(r);
}

bool is_masked_case(const SchemeConfig& cfg) {
  return cfg.C > 1 && cfg.J != 1 && cfg.J != cfg.Q && cfg.J == cfg.C * (cfg.Q - 1) + 1;
}

}  // namespace

double feasible_loading(double S, int N, int m) {
  const double users = std::max(1.0, std::round(S * N / m));
  return users * m / N;
}

TrainingPlan::TrainingPlan(const Scenario& scn, const SchemeConfig& cfg, int N) : scn_(&scn), cfg_(cfg), N_(N) {
  validate_scheme(cfg);
  if (cfg.F != scn.reuse().F || cfg.Q != scn.reuse().Q || cfg.C != scn.cluster_size()) {
    throw ConfigError(fmt::format("scheme {} does not match the scenario", scheme_label(cfg)));
  }
  if (N < 1) throw ConfigError(fmt::format("N must be positive, got {}", N));
  m_ = scn.multiplicity();
  antennas_ = exact_positive_int(cfg.M * N, "M*N");
  upl_ = exact_positive_int(cfg.S * N / m_, "S*N/m");

  const auto& reuse = scn.reuse();
  const auto& cl = scn.clusters();
  const int B = scn.num_bs();
  active_ = reuse.D(0);
  bs_slot_.assign(static_cast<std::size_t>(B), -1);
  for (int c : active_) {
    for (int bs : cl.members(c)) bs_slot_[static_cast<std::size_t>(bs)] = 0;
  }
  for (int bs = 0; bs < B; ++bs) {
    if (bs_slot_[static_cast<std::size_t>(bs)] >= 0) {
      bs_slot_[static_cast<std::size_t>(bs)] = static_cast<int>(bs_list_.size());
      bs_list_.push_back(bs);
    }
  }

  const double noise = 1.0 / (scn.system().alpha_ul * cfg.Q * cfg.S);
  const auto Bs = static_cast<std::size_t>(B);
  const auto ms = static_cast<std::size_t>(m_);
  weights_.assign(Bs * ms * Bs, 0.0);
  for (int c : active_) {
    const int q = reuse.codebook[static_cast<std::size_t>(c)];
    for (int i = 0; i < m_; ++i) {
      for (int bs : bs_list_) {
        weights_[(static_cast<std::size_t>(c) * ms + static_cast<std::size_t>(i)) * Bs + static_cast<std::size_t>(bs)] =
            scn.gain(i, c, bs) / (noise + scn.pilot_load(i, q, 0, bs));
      }
    }
  }
  obs_variance_.assign(static_cast<std::size_t>(cfg.Q) * ms * Bs, 0.0);
  for (int q = 0; q < cfg.Q; ++q) {
    for (int i = 0; i < m_; ++i) {
      for (int bs : bs_list_) {
        obs_variance_[(static_cast<std::size_t>(q) * ms + static_cast<std::size_t>(i)) * Bs +
                      static_cast<std::size_t>(bs)] = (scn.pilot_load(i, q, 0, bs) + noise) / N;
      }
    }
  }

  targets_.assign(Bs, {});
  if (cfg.J >= 2) {
    const bool masked = is_masked_case(cfg);
    for (int c : active_) {
      for (int i = 0; i < m_; ++i) {
        const Point x = scn.bin().locations[static_cast<std::size_t>(i)];
        for (int target : nearest_zf_clusters(scn.layout(), cl, reuse, x, cfg.J, c)) {
          const int kept = masked ? cl.closest_member(scn.layout(), x + scn.layout().bs_position(c), target) : -1;
          targets_[static_cast<std::size_t>(target)].push_back({c, i, kept});
        }
      }
    }
  }
}

double TrainingPlan::weight(int group, int loc, int bs) const {
  const auto Bs = static_cast<std::size_t>(scn_->num_bs());
  return weights_[(static_cast<std::size_t>(group) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(loc)) *
                       Bs +
                   static_cast<std::size_t>(bs)];
}

double TrainingPlan::observation_variance(int q, int loc, int bs) const {
  const auto Bs = static_cast<std::size_t>(scn_->num_bs());
  return obs_variance_[(static_cast<std::size_t>(q) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(loc)) *
                           Bs +
                       static_cast<std::size_t>(bs)];
}

// ---------------------------------------------------------------------------

const Eigen::MatrixXcd& ChannelRealization::observation(int bs, int q) const {
  const int slot = plan_->bs_slot(bs);
  if (slot < 0) throw DomainError(fmt::format("base station {} is not active", bs));
  return obs_[static_cast<std::size_t>(slot) * static_cast<std::size_t>(plan_->config().Q) +
              static_cast<std::size_t>(q)];
}

const Eigen::MatrixXcd& ChannelRealization::reference_channel(int bs) const {
  const int slot = plan_->bs_slot(bs);
  if (slot < 0) throw DomainError(fmt::format("base station {} is not active", bs));
  return ref_[static_cast<std::size_t>(slot)];
}

Eigen::MatrixXcd ChannelRealization::estimate(int group, int bs) const {
  const int q = plan_->scenario().reuse().codebook[static_cast<std::size_t>(group)];
  Eigen::MatrixXcd out = observation(bs, q);
  const int upl = plan_->users_per_location();
  for (int i = 0; i < plan_->multiplicity(); ++i) out.middleCols(i * upl, upl) *= plan_->weight(group, i, bs);
  return out;
}

void simulate_training_into(std::shared_ptr<const TrainingPlan> plan, std::uint64_t seed, std::uint64_t trial,
                            int attempt, ChannelRealization& out) {
  const TrainingPlan& p = *plan;
  const Scenario& scn = p.scenario();
  const int rows = p.antennas_per_bs();
  const int upl = p.users_per_location();
  const int cols = p.users_per_cluster();
  const int Q = p.config().Q;
  const double N = p.N();
  const auto slots = p.active_bs().size();
  out.seed_ = seed;
  out.trial_ = trial;
  out.attempt_ = attempt;
  out.ref_.resize(slots);
  out.obs_.resize(slots * static_cast<std::size_t>(Q));
  const auto a = static_cast<std::uint64_t>(attempt);
  for (std::size_t s = 0; s < slots; ++s) {
    const int bs = p.active_bs()[s];
    const auto b64 = static_cast<std::uint64_t>(bs);
    Eigen::MatrixXcd& ref = out.ref_[s];
    ref.resize(rows, cols);
    for (int i = 0; i < p.multiplicity(); ++i) {
      Substream rs(stream_key({seed, trial, a, kChannelTag, b64, static_cast<std::uint64_t>(i)}));
      const double var = scn.gain(i, 0, bs) / N;
      for (int u = 0; u < upl; ++u) {
        for (int r = 0; r < rows; ++r) ref(r, i * upl + u) = rs.complex_normal(var);
      }
    }
    for (int q = 0; q < Q; ++q) {
      Eigen::MatrixXcd& obs = out.obs_[s * static_cast<std::size_t>(Q) + static_cast<std::size_t>(q)];
      obs.resize(rows, cols);
      for (int i = 0; i < p.multiplicity(); ++i) {
        Substream os(stream_key({seed, trial, a, kObservationTag, b64, static_cast<std::uint64_t>(q),
                                 static_cast<std::uint64_t>(i)}));
        double var = p.observation_variance(q, i, bs);
        // The reference group's own channel is drawn separately so that its
        // estimate and its true channel come from the same observation.
        if (q == 0) var = std::max(var - scn.gain(i, 0, bs) / N, 0.0);
        for (int u = 0; u < upl; ++u) {
          for (int r = 0; r < rows; ++r) obs(r, i * upl + u) = os.complex_normal(var);
        }
      }
      if (q == 0) obs += ref;
    }
  }
  out.plan_ = std::move(plan);
}

ChannelRealization simulate_training(const Scenario& scn, const SchemeConfig& cfg, int N, std::uint64_t seed,
                                     std::uint64_t trial) {
  auto plan = std::make_shared<const TrainingPlan>(scn, cfg, N);
  ChannelRealization r;
  simulate_training_into(std::move(plan), seed, trial, 0, r);
  return r;
}

// ---------------------------------------------------------------------------

Precoder build_precoder(const ChannelRealization& real, int cluster) {
  const TrainingPlan& p = real.plan();
  const Scenario& scn = p.scenario();
  const auto& cl = scn.clusters();
  const int C = cl.size();
  const int rows = p.antennas_per_bs();
  const int upl = p.users_per_location();
  const int own = p.users_per_cluster();
  const auto& targets = p.targets(cluster);
  const int cols = own + upl * static_cast<int>(targets.size());

  Precoder prec;
  prec.J = p.config().J;
  prec.cluster = cluster;
  prec.block_rows = rows;
  prec.constraints = Eigen::MatrixXcd::Zero(C * rows, cols);
  const int q_own = scn.reuse().codebook[static_cast<std::size_t>(cluster)];
  for (int b = 0; b < C; ++b) {
    const int bs = cl.member(cluster, b);
    const Eigen::MatrixXcd& obs = real.observation(bs, q_own);
    for (int i = 0; i < p.multiplicity(); ++i) {
      prec.constraints.block(b * rows, i * upl, rows, upl) = p.weight(cluster, i, bs) * obs.middleCols(i * upl, upl);
    }
  }
  int col = own;
  for (const auto& t : targets) {
    const int q = scn.reuse().codebook[static_cast<std::size_t>(t.group)];
    for (int b = 0; b < C; ++b) {
      if (t.kept >= 0 && t.kept != b) continue;
      const int bs = cl.member(cluster, b);
      prec.constraints.block(b * rows, col, rows, upl) =
          p.weight(t.group, t.loc, bs) * real.observation(bs, q).middleCols(t.loc * upl, upl);
    }
    if (t.kept >= 0) prec.masks.push_back(t);
    col += upl;
  }

  if (prec.J == 0) {
    prec.V = prec.constraints;
  } else {
    if (cols > C * rows) {
      throw InfeasibleError(fmt::format("{} zero-forcing columns exceed {} antennas", cols, C * rows));
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(prec.constraints);
    qr.setThreshold(1e-12);
    if (qr.rank() < cols) {
      throw SingularError(fmt::format("stacked zero-forcing matrix has rank {} < {}", qr.rank(), cols), real.seed(),
                          real.trial());
    }
    // A P = Q R, so the pseudo-inverse is A P (R^H R)^-1 P^T; only the
    // columns of the own users are needed.
    const auto R = qr.matrixR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
    Eigen::MatrixXcd X = qr.colsPermutation().transpose() * Eigen::MatrixXcd::Identity(cols, own);
    R.adjoint().solveInPlace(X);
    R.solveInPlace(X);
    prec.V.noalias() = prec.constraints * (qr.colsPermutation() * X);
  }
  for (int j = 0; j < prec.V.cols(); ++j) prec.V.col(j).normalize();
  return prec;
}

std::vector<double> partial_trace_profile(const Precoder& prec) {
  const auto C = prec.V.rows() / prec.block_rows;
  std::vector<double> out;
  for (Eigen::Index b = 0; b < C; ++b) {
    out.push_back(prec.V.middleRows(b * prec.block_rows, prec.block_rows).squaredNorm() /
                  static_cast<double>(prec.V.cols()));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// SINR of every reference-group user in one realization.
std::vector<double> trial_sinr(const ChannelRealization& real, double power_scale) {
  const TrainingPlan& p = real.plan();
  const Scenario& scn = p.scenario();
  const auto& cl = scn.clusters();
  const int C = cl.size();
  const int rows = p.antennas_per_bs();
  const int K = p.users_per_cluster();
  const double S = static_cast<double>(K) / p.N();
  const double noise = 1.0 / p.config().F;

  std::vector<double> interference(static_cast<std::size_t>(K), 0.0);
  std::vector<double> signal(static_cast<std::size_t>(K), 0.0);
  for (int c : p.active_clusters()) {
    const Precoder prec = build_precoder(real, c);
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(prec.V.cols(), K);
    for (int b = 0; b < C; ++b) {
      P.noalias() += prec.V.middleRows(b * rows, rows).adjoint() * real.reference_channel(cl.member(c, b));
    }
    if (c == 0) {
      for (int k = 0; k < K; ++k) {
        const std::complex<double> d = prec.V.col(k).dot(prec.constraints.col(k));
        const auto ks = static_cast<std::size_t>(k);
        signal[ks] = std::norm(d);
        interference[ks] += P.col(k).squaredNorm() - std::norm(P(k, k)) + std::norm(P(k, k) - d);
      }
    } else {
      for (int k = 0; k < K; ++k) interference[static_cast<std::size_t>(k)] += P.col(k).squaredNorm();
    }
  }
  std::vector<double> sinr(static_cast<std::size_t>(K));
  for (std::size_t k = 0; k < sinr.size(); ++k) {
    sinr[k] = power_scale * signal[k] / S / (power_scale * interference[k] / S + noise);
  }
  return sinr;
}

}  // namespace

RateEstimate estimate_rates(const Scenario& scn, const SchemeConfig& cfg_in, const MonteCarloOptions& opt) {
  if (opt.trials < 1) throw ConfigError("Monte Carlo needs at least one trial");
  if (opt.N < 1) throw ConfigError("N must be positive");
  if (!(opt.transmit_power_scale >= 0.0)) throw ConfigError("transmit power scale must be non-negative");
  const int m = scn.multiplicity();
  RateEstimate est;
  SchemeConfig cfg = cfg_in;
  cfg.S = feasible_loading(cfg_in.S, opt.N, m);
  if (std::abs(cfg.S - cfg_in.S) > 0.01 * cfg_in.S) {
    est.warnings.push_back(fmt::format("loading S = {:.6g} rounded to {:.6g} for N = {}", cfg_in.S, cfg.S, opt.N));
  }
  if (cfg.J >= 1 && cfg.J * cfg.S >= cfg.C * cfg.M) {
    throw InfeasibleError(fmt::format("J*S = {} must be below C*M = {}", cfg.J * cfg.S, cfg.C * cfg.M));
  }
  auto plan = std::make_shared<const TrainingPlan>(scn, cfg, opt.N);
  const int upl = plan->users_per_location();
  const int K = plan->users_per_cluster();

  const auto T = static_cast<std::size_t>(opt.trials);
  std::vector<double> loc_rates(T * static_cast<std::size_t>(m), 0.0);
  std::vector<int> attempts(T, 0);
  std::vector<std::vector<double>> sinr_log(opt.diagnostics ? T : 0);
  std::vector<std::exception_ptr> errors(T);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    ChannelRealization real;
    for (std::size_t t = next++; t < T; t = next++) {
      try {
        std::vector<double> sinr;
        int attempt = 0;
        for (;; ++attempt) {
          simulate_training_into(plan, opt.seed, t, attempt, real);
          try {
            sinr = trial_sinr(real, opt.transmit_power_scale);
            break;
          } catch (const SingularError&) {
            if (attempt + 1 >= kMaxAttempts) throw;
          }
        }
        attempts[t] = attempt;
        for (int i = 0; i < m; ++i) {
          CompensatedSum s;
          for (int u = 0; u < upl; ++u) s += std::log2(1.0 + sinr[static_cast<std::size_t>(i * upl + u)]);
          loc_rates[t * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)] = s.value() / upl;
        }
        if (opt.diagnostics) sinr_log[t] = std::move(sinr);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(opt.threads, opt.trials));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  est.config = cfg;
  est.users_per_location = upl;
  est.trials = opt.trials;
  for (int a : attempts) est.resampled += a;
  const double scale = cfg.S / (m * cfg.F);
  const double n = static_cast<double>(T);
  CompensatedSum g_sum;
  CompensatedSum g_sq;
  std::vector<CompensatedSum> l_sum(static_cast<std::size_t>(m));
  std::vector<CompensatedSum> l_sq(static_cast<std::size_t>(m));
  for (std::size_t t = 0; t < T; ++t) {
    CompensatedSum g;
    for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) {
      const double v = loc_rates[t * static_cast<std::size_t>(m) + i];
      l_sum[i] += v;
      l_sq[i] += v * v;
      g += v;
    }
    const double gv = scale * g.value();
    g_sum += gv;
    g_sq += gv * gv;
  }
  auto se = [n](double sum, double sq) {
    if (n < 2.0) return 0.0;
    const double mean = sum / n;
    const double var = std::max(sq / n - mean * mean, 0.0) * n / (n - 1.0);
    return std::sqrt(var / n);
  };
  for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) {
    est.location_rate.push_back(l_sum[i].value() / n);
    est.location_se.push_back(se(l_sum[i].value(), l_sq[i].value()));
  }
  est.group_rate = g_sum.value() / n;
  est.group_se = se(g_sum.value(), g_sq.value());

  if (opt.diagnostics) {
    for (std::size_t t = 0; t < T; ++t) {
      for (int k = 0; k < K; ++k) {
        const double s = sinr_log[t][static_cast<std::size_t>(k)];
        fmt::print(*opt.diagnostics, "{},{},{},{:.10g},{:.10g}\n", t, k / upl, k % upl, s, std::log2(1.0 + s));
      }
    }
  }
  return est;
}

}  // namespace netmimo
