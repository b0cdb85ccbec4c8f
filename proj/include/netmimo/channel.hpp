#pragma once

#include <functional>
#include <vector>

#include "netmimo/geometry.hpp"

namespace netmimo {

/// Bounded pathloss g(d) = G0 / (1 + (d / delta)^alpha).
struct PathlossModel {
  double G0 = 1e6;
  double alpha = 3.76;
  double delta = 0.05;

  double gain(double distance) const;
};

/// Large-scale gain between x and b, with the distance taken modulo Lambda.
double pathloss(const PathlossModel& model, const Layout& layout, Point x, Point b);

struct SystemParams {
  double L = 40.0;          ///< coherence block length (symbols)
  double alpha_ul = 10.0;   ///< uplink pilot SNR factor
};

/// One bin of one scheme geometry: layout, clusters, locations, reuse and a
/// table of all large-scale gains g(x_i + c, beta) for the root locations x_i,
/// user groups c and base stations beta.
class Scenario {
 public:
  Scenario(Layout layout, ClusterPattern clusters, BinPattern bin, ReuseAssignment reuse, PathlossModel pathloss,
           SystemParams system);

  const Layout& layout() const { return layout_; }
  const ClusterPattern& clusters() const { return clusters_; }
  const BinPattern& bin() const { return bin_; }
  const ReuseAssignment& reuse() const { return reuse_; }
  const PathlossModel& pathloss_model() const { return pathloss_; }
  const SystemParams& system() const { return system_; }

  int num_bs() const { return layout_.num_bs(); }
  int multiplicity() const { return bin_.multiplicity(); }
  int cluster_size() const { return clusters_.size(); }

  /// g(x_loc + pos(src), pos(bs)).
  double gain(int loc, int src, int bs) const {
    return gains_[(static_cast<std::size_t>(loc) * n_ + static_cast<std::size_t>(src)) * n_ + static_cast<std::size_t>(bs)];
  }

  /// Sum of gain(loc, c, bs) over the clusters c of P(q, f).
  double pilot_load(int loc, int q, int f, int bs) const;

  /// Replaces the gain table; used to evaluate formulas on synthetic gains.
  void override_gains(const std::function<double(int loc, int src, int bs)>& g);

 private:
  void rebuild_loads();

  Layout layout_;
  ClusterPattern clusters_;
  BinPattern bin_;
  ReuseAssignment reuse_;
  PathlossModel pathloss_;
  SystemParams system_;
  std::size_t n_ = 0;
  std::vector<double> gains_;
  std::vector<double> loads_;  // [loc][f][q][bs]
};

/// MMSE training coefficients of one link: gain g, training SNR gamma,
/// estimation error variance sigma and estimate variance xi = g - sigma.
struct TrainingCoefficients {
  double g = 0.0;
  double gamma = 0.0;
  double sigma = 0.0;
  double xi = 0.0;
};

/// Coefficients of the estimate, at member b of cluster `serve`, of the
/// channel from group `src` at root location `loc`. Requires `src` to share
/// the training codebook and subband of `serve`; throws DomainError otherwise.
TrainingCoefficients training_coefficients(const Scenario& scn, int loc, int src, int serve, int b, double S);

/// Coefficients of the estimate at BS `bs` of the channel from group `src`
/// trained on its own codebook. Defined for any pair.
TrainingCoefficients link_coefficients(const Scenario& scn, int loc, int src, int bs, double S);

/// Cluster averages over the C members of cluster c.
struct ClusterAverages {
  double xi_own = 0.0;     ///< (1/C) sum_b xi_{c,c,b}(x)
  double gain_ref = 0.0;   ///< (1/C) sum_b g(x, c + b)
  double sigma_ref = 0.0;  ///< (1/C) sum_b sigma_{0,c,b}(x)
};

ClusterAverages cluster_averages(const Scenario& scn, int loc, int c, double S);

/// Checks sigma + xi = g and sigma = g / (1 + gamma) to relative tolerance.
bool satisfies_training_identity(const TrainingCoefficients& t, double rel_tol = 1e-12);

}  // namespace netmimo
