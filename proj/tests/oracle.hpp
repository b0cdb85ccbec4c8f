#pragma once

// Reference evaluation of the closed-form rates straight from the raw gain
// table of a scenario. Deliberately naive: plain loops, no shared helpers
// from the library beyond geometry lookups.

#include <cmath>
#include <vector>

#include "netmimo/asymptotic.hpp"

namespace oracle {

using netmimo::Scenario;

inline double noise(const Scenario& s, double S) { return 1.0 / (s.system().alpha_ul * s.reuse().Q * S); }

// Sum over the groups c'' of codebook q of g(x + c'', bs).
inline double load(const Scenario& s, int loc, int q, int bs) {
  double sum = 0.0;
  for (int c : s.reuse().P(q, 0)) sum += s.gain(loc, c, bs);
  return sum;
}

// Estimate variance at bs of the channel of group src trained on its codebook.
inline double xi(const Scenario& s, int loc, int src, int bs, double S) {
  const double g = s.gain(loc, src, bs);
  const int q = s.reuse().codebook[static_cast<std::size_t>(src)];
  return g * g / (noise(s, S) + load(s, loc, q, bs));
}

inline double sigma(const Scenario& s, int loc, int src, int bs, double S) { return s.gain(loc, src, bs) - xi(s, loc, src, bs, S); }

inline double xi_bar(const Scenario& s, int loc, int c, double S) {
  double sum = 0.0;
  for (int b = 0; b < s.cluster_size(); ++b) sum += xi(s, loc, c, s.clusters().member(c, b), S);
  return sum / s.cluster_size();
}

inline double log_term(double sinr) { return std::log2(1.0 + sinr); }

inline double lsubf(const Scenario& s, const netmimo::SchemeConfig& cfg) {
  const int m = s.multiplicity();
  const int C = s.cluster_size();
  const double S = cfg.S;
  const auto& cl = s.clusters();
  double total = 0.0;
  for (int x = 0; x < m; ++x) {
    double eta = 0.0;
    for (int xp = 0; xp < m; ++xp) {
      for (int b = 0; b < C; ++b) {
        for (int c : s.reuse().D(0)) {
          eta += xi(s, xp, c, cl.member(c, b), S) * s.gain(x, 0, cl.member(c, b)) / xi_bar(s, xp, c, S);
        }
      }
    }
    eta /= m * C;
    double zeta = 0.0;
    for (int c : s.reuse().P(0, 0)) {
      if (c == 0) continue;
      double inner = 0.0;
      for (int b = 0; b < C; ++b) {
        const int bs = cl.member(c, b);
        inner += s.gain(x, 0, bs) / s.gain(x, 0, cl.member(0, b)) * xi(s, x, c, bs, S);
      }
      inner /= C;
      zeta += inner * inner / xi_bar(s, x, c, S);
    }
    const double load_f = C * cfg.M / S;
    total += log_term(load_f * xi_bar(s, x, 0, S) / (1.0 / cfg.F + eta + load_f * zeta));
  }
  return S / (m * cfg.F) * total;
}

inline double lzfbf_single(const Scenario& s, const netmimo::SchemeConfig& cfg) {
  const int m = s.multiplicity();
  const double S = cfg.S;
  const auto& reuse = s.reuse();
  double total = 0.0;
  for (int x = 0; x < m; ++x) {
    auto E = netmimo::nearest_zf_clusters(s.layout(), s.clusters(), reuse, s.bin().locations[static_cast<std::size_t>(x)],
                                          cfg.J);
    auto in = [](const std::vector<int>& v, int c) {
      for (int e : v) {
        if (e == c) return true;
      }
      return false;
    };
    double alpha = 0.0;
    for (int c : reuse.D(0)) {
      if (in(reuse.P(0, 0), c) || in(E, c)) {
        alpha += sigma(s, x, 0, c, S);
      } else {
        alpha += s.gain(x, 0, c);
      }
    }
    double beta = 0.0;
    for (int c : reuse.P(0, 0)) {
      if (c == 0) continue;
      const double r = s.gain(x, 0, c) / s.gain(x, 0, 0);
      beta += r * r * xi(s, x, c, c, S);
    }
    const double a = (cfg.M - cfg.J * S) / S;
    total += log_term(a * xi(s, x, 0, 0, S) / (1.0 / cfg.F + alpha + a * beta));
  }
  return S / (m * cfg.F) * total;
}

inline double lzfbf_cluster(const Scenario& s, const netmimo::SchemeConfig& cfg) {
  const int m = s.multiplicity();
  const int C = s.cluster_size();
  const double S = cfg.S;
  const auto& reuse = s.reuse();
  const auto& cl = s.clusters();
  const bool case_c = cfg.J == C * (cfg.Q - 1) + 1 && cfg.J != 1 && cfg.J != cfg.Q;
  double total = 0.0;
  for (int x = 0; x < m; ++x) {
    const auto px = s.bin().locations[static_cast<std::size_t>(x)];
    auto E = netmimo::nearest_zf_clusters(s.layout(), cl, reuse, px, cfg.J);
    auto in_E = [&](int c) {
      for (int e : E) {
        if (e == c) return true;
      }
      return false;
    };
    auto sigma_bar = [&](int c) {
      double v = 0.0;
      for (int b = 0; b < C; ++b) v += sigma(s, x, 0, cl.member(c, b), S);
      return v / C;
    };
    auto g_bar = [&](int c) {
      double v = 0.0;
      for (int b = 0; b < C; ++b) v += s.gain(x, 0, cl.member(c, b));
      return v / C;
    };
    double alpha = sigma_bar(0);
    for (int c : reuse.D(0)) {
      if (c == 0) continue;
      if (!in_E(c)) {
        alpha += g_bar(c);
      } else if (!case_c) {
        alpha += sigma_bar(c);
      } else {
        const int near = cl.closest_member(s.layout(), px, c);
        double v = sigma(s, x, 0, cl.member(c, near), S);
        for (int b = 0; b < C; ++b) {
          if (b != near) v += s.gain(x, 0, cl.member(c, b));
        }
        alpha += v / C;
      }
    }
    double beta = 0.0;
    for (int c : reuse.P(0, 0)) {
      if (c == 0) continue;
      double v = 0.0;
      for (int b = 0; b < C; ++b) {
        const int bs = cl.member(c, b);
        const double r = s.gain(x, 0, bs) / s.gain(x, 0, cl.member(0, b));
        v += r * r * xi(s, x, c, bs, S);
      }
      beta += v / C;
    }
    const double sig = (C * cfg.M - cfg.J * S) / S;
    total += log_term(sig * xi_bar(s, x, 0, S) / (1.0 / cfg.F + alpha + C * cfg.M / S * beta));
  }
  return S / (m * cfg.F) * total;
}

}  // namespace oracle
