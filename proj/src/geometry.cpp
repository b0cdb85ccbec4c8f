#include "netmimo/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <optional>
#include <tuple>

#include <Eigen/LU>
#include <fmt/format.h>

#include "netmimo/error.hpp"

namespace netmimo {

namespace {

int floor_div(long long a, long long b) {
  long long q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return static_cast<int>(q);
}

int positive_mod(long long a, long long b) {
  long long r = a % b;
  return static_cast<int>(r < 0 ? r + b : r);
}

// (p, q) with p*p + p*q + q*q == n, p >= 1, 0 <= q <= p.
std::optional<std::pair<int, int>> hex_norm_factor(int n) {
  for (int p = 1; p * p <= n; ++p) {
    for (int q = 0; q <= p; ++q) {
      if (p * p + p * q + q * q == n) return std::make_pair(p, q);
    }
  }
  return std::nullopt;
}

// Sublattice of Z^2 spanned by the columns of [[p, -q], [q, p + q]].
struct HexSublattice {
  int p = 1;
  int q = 0;
  int det = 1;
  std::vector<LatticeCoord> cosets;  // canonical representatives, origin first

  LatticeCoord canonical(LatticeCoord z) const {
    long long t0 = static_cast<long long>(p + q) * z.i + static_cast<long long>(q) * z.j;
    long long t1 = -static_cast<long long>(q) * z.i + static_cast<long long>(p) * z.j;
    int k0 = floor_div(t0, det);
    int k1 = floor_div(t1, det);
    return {z.i - (p * k0 - q * k1), z.j - (q * k0 + (p + q) * k1)};
  }

  int index(LatticeCoord z) const {
    LatticeCoord r = canonical(z);
    auto it = std::find(cosets.begin(), cosets.end(), r);
    return static_cast<int>(it - cosets.begin());
  }

  // Coordinates of (z - rep) in the sublattice basis.
  LatticeCoord quotient(LatticeCoord z) const {
    LatticeCoord d = z - canonical(z);
    long long t0 = static_cast<long long>(p + q) * d.i + static_cast<long long>(q) * d.j;
    long long t1 = -static_cast<long long>(q) * d.i + static_cast<long long>(p) * d.j;
    return {static_cast<int>(t0 / det), static_cast<int>(t1 / det)};
  }
};

HexSublattice make_sublattice(int p, int q) {
  HexSublattice s{p, q, p * p + p * q + q * q, {}};
  for (int i = -s.det; i <= s.det; ++i) {
    for (int j = -s.det; j <= s.det; ++j) {
      LatticeCoord r = s.canonical({i, j});
      if (std::find(s.cosets.begin(), s.cosets.end(), r) == s.cosets.end()) s.cosets.push_back(r);
    }
  }
  std::sort(s.cosets.begin(), s.cosets.end(), [](LatticeCoord a, LatticeCoord b) {
    bool a0 = a == LatticeCoord{};
    bool b0 = b == LatticeCoord{};
    if (a0 != b0) return a0;
    return a < b;
  });
  return s;
}

}  // namespace

Point Layout::to_point(LatticeCoord z) const {
  if (dimension_ == 1) return {static_cast<double>(z.i), 0.0};
  Eigen::Vector2d v = fine_ * Eigen::Vector2d(z.i, z.j);
  return {v(0), v(1)};
}

LatticeCoord Layout::canonical(LatticeCoord z) const {
  const int p = coarse_int_(0, 0);
  const int q = coarse_int_(1, 0);
  HexSublattice s{p, q, p * p + p * q + q * q, {}};
  return s.canonical(z);
}

int Layout::bs_id(LatticeCoord z) const {
  if (dimension_ == 1) return positive_mod(z.i, period_);
  LatticeCoord r = canonical(z);
  for (const auto& [rep, id] : canonical_) {
    if (rep == r) return id;
  }
  throw NumericalError("lattice point outside the coset table");
}

Point Layout::reduce(Point u) const {
  if (dimension_ == 1) {
    double b = static_cast<double>(period_);
    return {u.x - b * std::floor(u.x / b + 0.5), u.y};
  }
  Eigen::Vector2d v(u.x, u.y);
  Eigen::Vector2d t = coarse_inv_ * v;
  Eigen::Vector2d k0(std::round(t(0)), std::round(t(1)));
  Eigen::Vector2d best = v - coarse_ * k0;
  double best_norm = best.squaredNorm();
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      if (di == 0 && dj == 0) continue;
      Eigen::Vector2d cand = v - coarse_ * (k0 + Eigen::Vector2d(di, dj));
      double n = cand.squaredNorm();
      if (n < best_norm - 1e-12) {
        best = cand;
        best_norm = n;
      }
    }
  }
  return {best(0), best(1)};
}

Point Layout::user_grid_point(int i, int j) const {
  double k = static_cast<double>(grid_density_);
  if (dimension_ == 1) return {i / k + user_offset_.x, 0.0};
  Eigen::Vector2d v = fine_ * Eigen::Vector2d(i / k, j / k);
  return Point{v(0), v(1)} + user_offset_;
}

double Layout::bs_spacing() const { return dimension_ == 1 ? 1.0 : std::sqrt(3.0) * hex_radius_; }

bool Layout::on_bs_lattice(Point p, LatticeCoord* out) const {
  Eigen::Vector2d t = fine_inv_ * Eigen::Vector2d(p.x, dimension_ == 1 ? 0.0 : p.y);
  LatticeCoord z{static_cast<int>(std::lround(t(0))), dimension_ == 1 ? 0 : static_cast<int>(std::lround(t(1)))};
  if (dimension_ == 1 && std::abs(p.y) > 1e-9) return false;
  Point back = to_point(z);
  if ((back - p).norm() > 1e-9 * (1.0 + p.norm())) return false;
  if (out) *out = z;
  return true;
}

Layout build_layout(int dimension, int num_bs, double hex_radius, int user_grid_density) {
  Layout l;
  if (num_bs < 1) throw ConfigError(fmt::format("number of base stations must be positive, got {}", num_bs));
  if (user_grid_density < 1) throw ConfigError("user grid density must be positive");
  l.dimension_ = dimension;
  l.grid_density_ = user_grid_density;
  if (dimension == 1) {
    if (user_grid_density % 2 != 0) {
      throw ConfigError(fmt::format("1-D user grid density must be even, got {}", user_grid_density));
    }
    l.period_ = num_bs;
    l.fine_ = Eigen::Matrix2d::Identity();
    l.coarse_ = Eigen::Matrix2d::Identity();
    l.coarse_(0, 0) = num_bs;
    l.coarse_int_ << num_bs, 0, 0, 1;
    l.coarse_inv_ = l.coarse_.inverse();
    l.fine_inv_ = l.fine_.inverse();
    for (int id = 0; id < num_bs; ++id) {
      l.reps_.push_back({id < (num_bs + 1) / 2 ? id : id - num_bs, 0});
    }
    l.hex_radius_ = 0.5;
    l.user_offset_ = {1.0 / (2.0 * user_grid_density), 0.0};
    return l;
  }
  if (dimension != 2) throw ConfigError(fmt::format("dimension must be 1 or 2, got {}", dimension));
  if (!(hex_radius > 0.0)) throw ConfigError("hexagon radius must be positive");
  // Centred hexagonal numbers 3n^2 + 3n + 1 give a torus whose fundamental
  // cell is itself a hexagonal patch of cells.
  int n = 0;
  while (3 * n * n + 3 * n + 1 < num_bs) ++n;
  if (3 * n * n + 3 * n + 1 != num_bs) {
    throw ConfigError(fmt::format("2-D layouts need B = 3n^2+3n+1 (7, 19, 37, ...), got {}", num_bs));
  }
  const int p = n + 1;
  const int q = n;
  const double r = hex_radius;
  l.hex_radius_ = r;
  l.fine_ << 1.5 * r, 0.0, std::sqrt(3.0) / 2.0 * r, std::sqrt(3.0) * r;
  l.coarse_int_ << p, -q, q, p + q;
  l.coarse_ = l.fine_ * l.coarse_int_.cast<double>();
  l.coarse_inv_ = l.coarse_.inverse();
  l.fine_inv_ = l.fine_.inverse();

  HexSublattice s = make_sublattice(p, q);
  struct Rep {
    LatticeCoord canonical;
    LatticeCoord rep;
    double norm;
  };
  std::vector<Rep> reps;
  for (LatticeCoord c : s.cosets) {
    Rep best{c, c, 1e300};
    for (int k0 = -2; k0 <= 2; ++k0) {
      for (int k1 = -2; k1 <= 2; ++k1) {
        LatticeCoord z{c.i + p * k0 - q * k1, c.j + q * k0 + (p + q) * k1};
        double nz = l.to_point(z).norm();
        if (nz < best.norm - 1e-9 || (std::abs(nz - best.norm) <= 1e-9 && z < best.rep)) {
          best.rep = z;
          best.norm = nz;
        }
      }
    }
    reps.push_back(best);
  }
  std::sort(reps.begin(), reps.end(), [](const Rep& a, const Rep& b) {
    auto ka = std::make_tuple(std::llround(a.norm * 1e9), a.rep.i, a.rep.j);
    auto kb = std::make_tuple(std::llround(b.norm * 1e9), b.rep.i, b.rep.j);
    return ka < kb;
  });
  for (std::size_t id = 0; id < reps.size(); ++id) {
    l.reps_.push_back(reps[id].rep);
    l.canonical_.emplace_back(reps[id].canonical, static_cast<int>(id));
  }
  Eigen::Vector2d u0 = l.fine_ * Eigen::Vector2d(0.5 / user_grid_density, 0.5 / user_grid_density);
  l.user_offset_ = {u0(0), u0(1)};
  return l;
}

double mod_distance(const Layout& layout, Point u, Point v) { return layout.distance(u, v); }

Point rotate_about(Point p, Point center, double degrees) {
  const double a = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  Point d = p - center;
  return Point{c * d.x - s * d.y, s * d.x + c * d.y} + center;
}

// ---------------------------------------------------------------------------

int ClusterPattern::closest_member(const Layout& layout, Point x, int c) const {
  int best = 0;
  double best_d = 1e300;
  for (int b = 0; b < size(); ++b) {
    double d = layout.distance(x, layout.bs_position(member(c, b)));
    if (d < best_d - 1e-12) {
      best = b;
      best_d = d;
    }
  }
  return best;
}

ClusterPattern build_cluster_pattern(const Layout& layout, std::vector<LatticeCoord> root) {
  if (root.empty()) throw ConfigError("cluster root must contain at least one offset");
  if (root.front() != LatticeCoord{}) throw ConfigError("first cluster offset must be the origin");
  if (static_cast<int>(root.size()) > layout.num_bs()) {
    throw ConfigError(fmt::format("cluster size {} exceeds the number of base stations {}", root.size(),
                                  layout.num_bs()));
  }
  std::vector<int> ids;
  for (LatticeCoord z : root) {
    if (layout.dimension() == 1 && z.j != 0) throw ConfigError("1-D cluster offsets must have j = 0");
    int id = layout.bs_id(z);
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
      throw ConfigError(fmt::format("cluster offsets ({}, {}) coincide modulo the coverage lattice", z.i, z.j));
    }
    ids.push_back(id);
  }
  ClusterPattern cp;
  cp.root_ = std::move(root);
  Point centroid;
  for (LatticeCoord z : cp.root_) centroid += layout.to_point(z);
  cp.root_centroid_ = (1.0 / static_cast<double>(cp.root_.size())) * centroid;
  for (int c = 0; c < layout.num_bs(); ++c) {
    std::vector<int> m;
    for (LatticeCoord z : cp.root_) m.push_back(layout.bs_id(layout.bs_coord(c) + z));
    cp.members_.push_back(std::move(m));
  }
  return cp;
}

ClusterPattern build_cluster_pattern(const Layout& layout, const std::vector<Point>& root) {
  std::vector<LatticeCoord> coords;
  for (Point p : root) {
    LatticeCoord z;
    if (!layout.on_bs_lattice(p, &z)) {
      throw ConfigError(fmt::format("cluster offset ({}, {}) is not a base station position", p.x, p.y));
    }
    coords.push_back(z);
  }
  return build_cluster_pattern(layout, std::move(coords));
}

std::vector<LatticeCoord> cluster_template(const Layout& layout, int size, ClusterOrientation orientation) {
  if (size == 1) return {{0, 0}};
  if (layout.dimension() == 1) {
    if (size == 2) return {{0, 0}, {1, 0}};
    throw ConfigError(fmt::format("no 1-D cluster template of size {}", size));
  }
  if (size == 3) {
    if (orientation == ClusterOrientation::Up) return {{0, 0}, {1, 0}, {0, 1}};
    return {{0, 0}, {0, 1}, {-1, 1}};
  }
  throw ConfigError(fmt::format("no 2-D cluster template of size {}", size));
}

// ---------------------------------------------------------------------------

std::vector<double> root_distance_profile(const Layout& layout, const ClusterPattern& clusters, Point x) {
  std::vector<double> d;
  for (int b = 0; b < clusters.size(); ++b) d.push_back(layout.distance(x, layout.bs_position(clusters.member(0, b))));
  std::sort(d.begin(), d.end());
  return d;
}

BinPattern build_bin(const Layout& layout, const ClusterPattern& clusters, const BinDescriptor& descriptor) {
  using Kind = BinDescriptor::Kind;
  BinPattern bin;
  switch (descriptor.kind) {
    case Kind::MirrorPair:
    case Kind::ClusterPair: {
      if (layout.dimension() != 1) throw ConfigError("pair bins are defined for 1-D layouts only");
      double x = descriptor.x;
      if (!(x >= 0.0 && x <= 0.5)) throw ConfigError(fmt::format("bin location {} outside [0, 1/2]", x));
      if (descriptor.kind == Kind::MirrorPair) {
        bin.locations = {{-x, 0.0}, {x, 0.0}};
      } else {
        bin.locations = {{x, 0.0}, {1.0 - x, 0.0}};
      }
      break;
    }
    case Kind::Orbit: {
      if (descriptor.order < 1) throw ConfigError("orbit order must be positive");
      for (int k = 0; k < descriptor.order; ++k) {
        bin.locations.push_back(rotate_about(descriptor.point, descriptor.center, 360.0 * k / descriptor.order));
      }
      break;
    }
    case Kind::Explicit:
      if (descriptor.points.empty()) throw ConfigError("explicit bin without locations");
      bin.locations = descriptor.points;
      break;
  }
  const std::vector<double> ref = root_distance_profile(layout, clusters, bin.locations.front());
  for (const Point& x : bin.locations) {
    std::vector<double> d = root_distance_profile(layout, clusters, x);
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (std::abs(d[k] - ref[k]) > 1e-9 * (1.0 + ref[k])) {
        throw SymmetryError(fmt::format("bin location ({}, {}) has root-cluster distance {} instead of {}", x.x, x.y,
                                        d[k], ref[k]));
      }
    }
  }
  return bin;
}

// ---------------------------------------------------------------------------

bool valid_reuse_factor(const Layout& layout, int factor) {
  if (factor < 1) return false;
  if (layout.dimension() == 1) return layout.num_bs() % factor == 0;
  return hex_norm_factor(factor).has_value() && factor <= layout.num_bs();
}

ReuseAssignment assign_reuse(const Layout& layout, const ClusterPattern& clusters, int F, int Q) {
  (void)clusters;
  if (!valid_reuse_factor(layout, F)) throw ConfigError(fmt::format("invalid frequency reuse factor F = {}", F));
  if (!valid_reuse_factor(layout, Q)) throw ConfigError(fmt::format("invalid pilot reuse factor Q = {}", Q));
  const int B = layout.num_bs();
  ReuseAssignment r;
  r.F = F;
  r.Q = Q;
  r.subband.resize(static_cast<std::size_t>(B));
  r.codebook.resize(static_cast<std::size_t>(B));
  if (layout.dimension() == 1) {
    if (B % (F * Q) != 0) {
      throw ConfigError(fmt::format("F*Q = {} must divide B = {} for a periodic reuse pattern", F * Q, B));
    }
    for (int c = 0; c < B; ++c) {
      int z = layout.bs_coord(c).i;
      int f = positive_mod(z, F);
      r.subband[static_cast<std::size_t>(c)] = f;
      r.codebook[static_cast<std::size_t>(c)] = positive_mod((z - f) / F, Q);
    }
  } else {
    auto [fp, fq] = *hex_norm_factor(F);
    auto [qp, qq] = *hex_norm_factor(Q);
    HexSublattice fs = make_sublattice(fp, fq);
    HexSublattice qs = make_sublattice(qp, qq);
    for (int c = 0; c < B; ++c) {
      LatticeCoord z = layout.bs_coord(c);
      r.subband[static_cast<std::size_t>(c)] = fs.index(z);
      r.codebook[static_cast<std::size_t>(c)] = qs.index(fs.quotient(z));
    }
  }
  r.active.assign(static_cast<std::size_t>(F), {});
  r.pilot.assign(static_cast<std::size_t>(F), std::vector<std::vector<int>>(static_cast<std::size_t>(Q)));
  for (int c = 0; c < B; ++c) {
    auto f = static_cast<std::size_t>(r.subband[static_cast<std::size_t>(c)]);
    auto q = static_cast<std::size_t>(r.codebook[static_cast<std::size_t>(c)]);
    r.active[f].push_back(c);
    r.pilot[f][q].push_back(c);
  }
  return r;
}

std::vector<int> nearest_zf_clusters(const Layout& layout, const ClusterPattern& clusters,
                                     const ReuseAssignment& reuse, Point x, int J, int group) {
  if (J <= 1) return {};
  const auto g = static_cast<std::size_t>(group);
  const int f = reuse.subband[g];
  const int q = reuse.codebook[g];
  const Point xp = x + layout.bs_position(group);
  struct Cand {
    long long d;
    LatticeCoord z;
    int id;
  };
  std::vector<Cand> cands;
  for (int c : reuse.D(f)) {
    if (reuse.codebook[static_cast<std::size_t>(c)] == q) continue;
    double d = layout.distance(xp, clusters.center(layout, c));
    cands.push_back({std::llround(d * 1e9), layout.bs_coord(c), c});
  }
  if (static_cast<int>(cands.size()) < J - 1) {
    throw ConfigError(fmt::format("zero-forcing order J = {} needs {} neighbour clusters, only {} available", J,
                                  J - 1, cands.size()));
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return std::tie(a.d, a.z) < std::tie(b.d, b.z);
  });
  std::vector<int> out;
  for (int k = 0; k < J - 1; ++k) out.push_back(cands[static_cast<std::size_t>(k)].id);
  return out;
}

}  // namespace netmimo
