#pragma once

#include <cstdlib>
#include <functional>

#include "netmimo/channel.hpp"

namespace support {

// 1-D scenario with the standard bin of the cluster size: {-x, x} for C=1
// and {x, 1-x} for C=2.
inline netmimo::Scenario ring(int B, int C, int F, int Q, double x, double alpha_ul = 10.0,
                              netmimo::PathlossModel pl = {}) {
  using namespace netmimo;
  auto layout = build_layout(1, B, 0.0, 20);
  auto cl = build_cluster_pattern(layout, cluster_template(layout, C));
  auto bin = build_bin(layout, cl, C == 1 ? BinDescriptor::mirror_pair(x) : BinDescriptor::cluster_pair(x));
  auto reuse = assign_reuse(layout, cl, F, Q);
  return Scenario(layout, cl, bin, reuse, pl, SystemParams{40.0, alpha_ul});
}

// Gain depending only on the ring distance between source group and BS:
// 1, 0.1, 0.01 for distance 0, 1, 2.
inline std::function<double(int, int, int)> toy_gains(const netmimo::Layout& layout) {
  return [&layout](int, int src, int bs) {
    const int d = std::abs(layout.bs_coord(layout.bs_sub(bs, src)).i);
    return d == 0 ? 1.0 : d == 1 ? 0.1 : 0.01;
  };
}

}  // namespace support
