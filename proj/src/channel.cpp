#include "netmimo/channel.hpp"

#include <cmath>

#include <fmt/format.h>

#include "netmimo/error.hpp"
#include "netmimo/numeric.hpp"

namespace netmimo {

double PathlossModel::gain(double distance) const { return G0 / (1.0 + std::pow(distance / delta, alpha)); }

double pathloss(const PathlossModel& model, const Layout& layout, Point x, Point b) {
  return model.gain(layout.distance(x, b));
}

Scenario::Scenario(Layout layout, ClusterPattern clusters, BinPattern bin, ReuseAssignment reuse,
                   PathlossModel pathloss, SystemParams system)
    : layout_(std::move(layout)),
      clusters_(std::move(clusters)),
      bin_(std::move(bin)),
      reuse_(std::move(reuse)),
      pathloss_(pathloss),
      system_(system),
      n_(static_cast<std::size_t>(layout_.num_bs())) {
  if (!(pathloss_.G0 > 0.0 && pathloss_.alpha > 0.0 && pathloss_.delta > 0.0)) {
    throw ConfigError("pathloss parameters G0, alpha and delta must be positive");
  }
  if (!(system_.L > 0.0)) throw ConfigError("coherence block length L must be positive");
  if (!(system_.alpha_ul > 0.0)) throw ConfigError("uplink pilot factor must be positive");
  if (reuse_.subband.size() != n_) throw ConfigError("reuse assignment does not match the layout");
  if (bin_.locations.empty()) throw ConfigError("bin without locations");
  const auto m = static_cast<std::size_t>(bin_.multiplicity());
  gains_.resize(m * n_ * n_);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < n_; ++c) {
      Point x = bin_.locations[i] + layout_.bs_position(static_cast<int>(c));
      for (std::size_t b = 0; b < n_; ++b) {
        gains_[(i * n_ + c) * n_ + b] = netmimo::pathloss(pathloss_, layout_, x, layout_.bs_position(static_cast<int>(b)));
      }
    }
  }
  rebuild_loads();
}

void Scenario::override_gains(const std::function<double(int, int, int)>& g) {
  const auto m = static_cast<std::size_t>(bin_.multiplicity());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < n_; ++c) {
      for (std::size_t b = 0; b < n_; ++b) {
        gains_[(i * n_ + c) * n_ + b] = g(static_cast<int>(i), static_cast<int>(c), static_cast<int>(b));
      }
    }
  }
  rebuild_loads();
}

void Scenario::rebuild_loads() {
  const auto m = static_cast<std::size_t>(bin_.multiplicity());
  const auto F = static_cast<std::size_t>(reuse_.F);
  const auto Q = static_cast<std::size_t>(reuse_.Q);
  loads_.assign(m * F * Q * n_, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t q = 0; q < Q; ++q) {
        for (std::size_t b = 0; b < n_; ++b) {
          CompensatedSum s;
          for (int c : reuse_.P(static_cast<int>(q), static_cast<int>(f))) {
            s += gain(static_cast<int>(i), c, static_cast<int>(b));
          }
          loads_[((i * F + f) * Q + q) * n_ + b] = s.value();
        }
      }
    }
  }
}

double Scenario::pilot_load(int loc, int q, int f, int bs) const {
  const auto F = static_cast<std::size_t>(reuse_.F);
  const auto Q = static_cast<std::size_t>(reuse_.Q);
  return loads_[((static_cast<std::size_t>(loc) * F + static_cast<std::size_t>(f)) * Q + static_cast<std::size_t>(q)) *
                    n_ +
                static_cast<std::size_t>(bs)];
}

TrainingCoefficients link_coefficients(const Scenario& scn, int loc, int src, int bs, double S) {
  if (!(S > 0.0)) throw DomainError(fmt::format("training requires S > 0, got {}", S));
  const auto& reuse = scn.reuse();
  const int q = reuse.codebook[static_cast<std::size_t>(src)];
  const int f = reuse.subband[static_cast<std::size_t>(src)];
  TrainingCoefficients t;
  t.g = scn.gain(loc, src, bs);
  const double noise = 1.0 / (scn.system().alpha_ul * reuse.Q * S);
  CompensatedSum others;
  for (int c : reuse.P(q, f)) {
    if (c != src) others += scn.gain(loc, c, bs);
  }
  t.gamma = t.g / (noise + others.value());
  t.sigma = t.g / (1.0 + t.gamma);
  t.xi = t.g * (t.gamma / (1.0 + t.gamma));
  return t;
}

TrainingCoefficients training_coefficients(const Scenario& scn, int loc, int src, int serve, int b, double S) {
  if (!scn.reuse().shares_pilot(src, serve)) {
    throw DomainError(fmt::format("group {} does not share the training codebook of cluster {}", src, serve));
  }
  if (b < 0 || b >= scn.cluster_size()) throw DomainError(fmt::format("cluster member index {} out of range", b));
  return link_coefficients(scn, loc, src, scn.clusters().member(serve, b), S);
}

ClusterAverages cluster_averages(const Scenario& scn, int loc, int c, double S) {
  CompensatedSum xi;
  CompensatedSum g;
  CompensatedSum sigma;
  for (int b = 0; b < scn.cluster_size(); ++b) {
    const int bs = scn.clusters().member(c, b);
    xi += link_coefficients(scn, loc, c, bs, S).xi;
    g += scn.gain(loc, 0, bs);
    sigma += link_coefficients(scn, loc, 0, bs, S).sigma;
  }
  const double inv = 1.0 / scn.cluster_size();
  return {inv * xi.value(), inv * g.value(), inv * sigma.value()};
}

bool satisfies_training_identity(const TrainingCoefficients& t, double rel_tol) {
  const double scale = std::max(std::abs(t.g), 1e-300);
  return std::abs(t.sigma + t.xi - t.g) <= rel_tol * scale &&
         std::abs(t.sigma - t.g / (1.0 + t.gamma)) <= rel_tol * scale;
}

}  // namespace netmimo
