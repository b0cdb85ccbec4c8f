#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace netmimo {

/// A point of the plane. One-dimensional layouts use only `x`.
struct Point {
  double x = 0.0;
  double y = 0.0;

  Point& operator+=(const Point& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Point& operator-=(const Point& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point&, const Point&) = default;

  double norm() const { return std::hypot(x, y); }
};

/// Integer coordinates of a point of the BS lattice in its generator basis.
struct LatticeCoord {
  int i = 0;
  int j = 0;

  friend LatticeCoord operator+(LatticeCoord a, LatticeCoord b) { return {a.i + b.i, a.j + b.j}; }
  friend LatticeCoord operator-(LatticeCoord a, LatticeCoord b) { return {a.i - b.i, a.j - b.j}; }
  friend auto operator<=>(const LatticeCoord&, const LatticeCoord&) = default;
};

/// Nested lattices Lambda (coverage period) inside Lambda_bs (base stations).
///
/// Base stations are identified by an integer id in [0, B). Id 0 is the
/// origin. Every id has a representative lattice coordinate inside the
/// Voronoi cell V of Lambda, so arithmetic on ids is exact modular arithmetic
/// on the quotient Lambda_bs / Lambda.
class Layout {
 public:
  int dimension() const { return dimension_; }
  int num_bs() const { return static_cast<int>(reps_.size()); }

  /// Generator of Lambda (columns). For 1-D only the (0,0) entry is used.
  const Eigen::Matrix2d& coarse_basis() const { return coarse_; }
  /// Generator of Lambda_bs (columns).
  const Eigen::Matrix2d& bs_basis() const { return fine_; }

  Point to_point(LatticeCoord z) const;
  LatticeCoord bs_coord(int id) const { return reps_.at(static_cast<std::size_t>(id)); }
  Point bs_position(int id) const { return to_point(bs_coord(id)); }
  int bs_id(LatticeCoord z) const;
  int bs_add(int a, int b) const { return bs_id(bs_coord(a) + bs_coord(b)); }
  int bs_sub(int a, int b) const { return bs_id(bs_coord(a) - bs_coord(b)); }

  /// u mod Lambda, the representative closest to the origin.
  Point reduce(Point u) const;
  double distance(Point u, Point v) const { return reduce(u - v).norm(); }

  /// Offset u0 of the user grid translate.
  Point user_offset() const { return user_offset_; }
  int user_grid_density() const { return grid_density_; }
  /// Point (i, j) of the user grid Lambda_u + u0.
  Point user_grid_point(int i, int j = 0) const;

  /// Distance between two neighbouring base stations.
  double bs_spacing() const;
  /// Hexagon circumradius r (2-D), 0.5 for 1-D.
  double hex_radius() const { return hex_radius_; }

  /// Returns true when p lies on Lambda_bs (within tolerance) and writes its coordinate.
  bool on_bs_lattice(Point p, LatticeCoord* out) const;

  void set_user_offset(Point u0) { user_offset_ = u0; }

 private:
  friend Layout build_layout(int dimension, int num_bs, double hex_radius, int user_grid_density);

  int dimension_ = 1;
  int period_ = 1;                 // B (1-D)
  Eigen::Matrix2i coarse_int_;     // Lambda in Lambda_bs coordinates (2-D)
  Eigen::Matrix2d coarse_;         // physical generator of Lambda
  Eigen::Matrix2d coarse_inv_;
  Eigen::Matrix2d fine_;           // physical generator of Lambda_bs
  Eigen::Matrix2d fine_inv_;
  std::vector<LatticeCoord> reps_;
  std::vector<std::pair<LatticeCoord, int>> canonical_;  // canonical coset rep -> id (2-D)
  Point user_offset_;
  int grid_density_ = 2;
  double hex_radius_ = 0.5;

  LatticeCoord canonical(LatticeCoord z) const;
};

/// Builds a 1-D ring (Lambda = B Z, Lambda_bs = Z) or a 2-D hexagonal torus.
///
/// 2-D layouts require B to be a centred hexagonal number (7, 19, 37, ...);
/// `hex_radius` is the centre-to-vertex distance of one cell. The user grid
/// density must be even in 1-D so that u0 = 1/(2K) symmetrizes the grid.
Layout build_layout(int dimension, int num_bs, double hex_radius, int user_grid_density);

double mod_distance(const Layout& layout, Point u, Point v);

/// Rotation of p about `center` by `degrees`.
Point rotate_about(Point p, Point center, double degrees);

// ---------------------------------------------------------------------------

class ClusterPattern {
 public:
  int size() const { return static_cast<int>(root_.size()); }
  int num_clusters() const { return static_cast<int>(members_.size()); }
  const std::vector<LatticeCoord>& root() const { return root_; }

  /// BS ids of cluster c, ordered like the root offsets.
  std::span<const int> members(int c) const { return members_.at(static_cast<std::size_t>(c)); }
  int member(int c, int b) const { return members_[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)]; }

  /// Centroid of the root cluster translated by cluster shift c.
  Point center(const Layout& layout, int c) const { return root_centroid_ + layout.bs_position(c); }
  Point root_centroid() const { return root_centroid_; }

  /// Index b of the member of cluster c closest to x (ties: lowest index).
  int closest_member(const Layout& layout, Point x, int c) const;

 private:
  friend ClusterPattern build_cluster_pattern(const Layout&, std::vector<LatticeCoord>);
  std::vector<LatticeCoord> root_;
  std::vector<std::vector<int>> members_;
  Point root_centroid_;
};

/// Cluster pattern u(C) rooted at offsets `root` (first element must be 0).
ClusterPattern build_cluster_pattern(const Layout& layout, std::vector<LatticeCoord> root);
/// Same, with offsets given as points; every point must lie on Lambda_bs.
ClusterPattern build_cluster_pattern(const Layout& layout, const std::vector<Point>& root);

enum class ClusterOrientation { Up, Down };

/// Standard roots: 1-D {0} or {0,1}; 2-D {0} or the triangle of three
/// mutually adjacent cells (`Up`) or its 60 degree rotation (`Down`).
std::vector<LatticeCoord> cluster_template(const Layout& layout, int size,
                                           ClusterOrientation orientation = ClusterOrientation::Up);

// ---------------------------------------------------------------------------

/// Generators of symmetric location sets.
struct BinDescriptor {
  enum class Kind {
    MirrorPair,   ///< 1-D {-x, x}, served by a single cell
    ClusterPair,  ///< 1-D {x, 1-x}, served by the pair {0, 1}
    Orbit,        ///< rotations of `point` about `center` by multiples of 360/order degrees
    Explicit,     ///< caller-provided points
  };

  Kind kind = Kind::MirrorPair;
  double x = 0.0;
  Point point;
  Point center;
  int order = 3;
  std::vector<Point> points;

  static BinDescriptor mirror_pair(double x) { return {Kind::MirrorPair, x, {}, {}, 0, {}}; }
  static BinDescriptor cluster_pair(double x) { return {Kind::ClusterPair, x, {}, {}, 0, {}}; }
  static BinDescriptor orbit(Point p, Point c, int order) { return {Kind::Orbit, 0.0, p, c, order, {}}; }
  static BinDescriptor explicit_points(std::vector<Point> pts) {
    return {Kind::Explicit, 0.0, {}, {}, 0, std::move(pts)};
  }
};

struct BinPattern {
  std::vector<Point> locations;  ///< X, root locations served by cluster 0
  int multiplicity() const { return static_cast<int>(locations.size()); }
};

/// Builds a bin and checks that every location sees the same multiset of
/// modulo-Lambda distances to the root cluster; throws SymmetryError otherwise.
BinPattern build_bin(const Layout& layout, const ClusterPattern& clusters, const BinDescriptor& descriptor);

/// Sorted distances from x to the members of the root cluster.
std::vector<double> root_distance_profile(const Layout& layout, const ClusterPattern& clusters, Point x);

// ---------------------------------------------------------------------------

/// Frequency reuse (subband per cluster) and pilot reuse (codebook per cluster).
struct ReuseAssignment {
  int F = 1;
  int Q = 1;
  std::vector<int> subband;   ///< f(c)
  std::vector<int> codebook;  ///< q(c)
  std::vector<std::vector<int>> active;              ///< D(f), ascending ids
  std::vector<std::vector<std::vector<int>>> pilot;  ///< P(q, f) indexed [f][q]

  const std::vector<int>& D(int f) const { return active.at(static_cast<std::size_t>(f)); }
  const std::vector<int>& P(int q, int f) const {
    return pilot.at(static_cast<std::size_t>(f)).at(static_cast<std::size_t>(q));
  }
  bool shares_pilot(int a, int b) const {
    return subband[static_cast<std::size_t>(a)] == subband[static_cast<std::size_t>(b)] &&
           codebook[static_cast<std::size_t>(a)] == codebook[static_cast<std::size_t>(b)];
  }
};

/// True when F (or Q) is a valid reuse factor for the layout.
bool valid_reuse_factor(const Layout& layout, int factor);

ReuseAssignment assign_reuse(const Layout& layout, const ClusterPattern& clusters, int F, int Q);

/// E(x): the J-1 clusters on the same subband as `group`, using a different
/// training codebook, whose centres are closest to x + group. Ties are broken
/// by the lexicographic order of the cluster shift coordinates.
std::vector<int> nearest_zf_clusters(const Layout& layout, const ClusterPattern& clusters,
                                     const ReuseAssignment& reuse, Point x, int J, int group = 0);

}  // namespace netmimo
