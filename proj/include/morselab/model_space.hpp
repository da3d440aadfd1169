#pragma once

// Model CAT(0) spaces with closed-form metrics:
//   - the lattice-ray plane: R^2 with a vertical ray glued at every integer
//     point, whose Morse boundary is the set of rays;
//   - finite metric trees with an infinite ray glued at designated leaves;
//   - the bare Euclidean plane (empty Morse boundary).
//
// The first two share one structure: a "base" (plane or tree) plus rays glued
// at base points. A point on a ray at height h > 0 is at distance
// h + d_base(attachment, q) from every point q off that ray.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "morselab/errors.hpp"

namespace morselab {

// Tolerance for point equality after canonicalization.
inline constexpr double kGeomEps = 1e-9;

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

struct RayPoint {
  std::int64_t m = 0;
  std::int64_t n = 0;
  double h = 0.0;
  friend bool operator==(const RayPoint&, const RayPoint&) = default;
};

// A location on the tree edge {u, v} at distance t from u. The vertex w is
// written {w, w, 0}.
struct EdgePoint {
  std::int64_t u = 0;
  std::int64_t v = 0;
  double t = 0.0;
  friend bool operator==(const EdgePoint&, const EdgePoint&) = default;
};

class ModelPoint {
 public:
  using Chart = std::variant<PlanePoint, RayPoint, EdgePoint>;

  ModelPoint() = default;
  explicit ModelPoint(Chart chart) : chart_(chart) {}

  static ModelPoint plane(double x, double y) { return ModelPoint{PlanePoint{x, y}}; }
  static ModelPoint ray(std::int64_t m, std::int64_t n, double h) { return ModelPoint{RayPoint{m, n, h}}; }
  static ModelPoint edge(std::int64_t u, std::int64_t v, double t) { return ModelPoint{EdgePoint{u, v, t}}; }
  static ModelPoint vertex(std::int64_t v) { return ModelPoint{EdgePoint{v, v, 0.0}}; }

  const Chart& chart() const { return chart_; }
  bool is_plane() const { return std::holds_alternative<PlanePoint>(chart_); }
  bool is_ray() const { return std::holds_alternative<RayPoint>(chart_); }
  bool is_edge() const { return std::holds_alternative<EdgePoint>(chart_); }
  const PlanePoint& as_plane() const { return std::get<PlanePoint>(chart_); }
  const RayPoint& as_ray() const { return std::get<RayPoint>(chart_); }
  const EdgePoint& as_edge() const { return std::get<EdgePoint>(chart_); }

  // Exact field comparison; meaningful on canonical points.
  friend bool operator==(const ModelPoint&, const ModelPoint&) = default;

 private:
  Chart chart_{PlanePoint{}};
};

// A point of the Morse boundary. Lattice-ray plane: the ray r_{m,n}.
// Metric tree: the ray at leaf m (n is always 0).
struct BoundaryPoint {
  std::int64_t m = 0;
  std::int64_t n = 0;
  friend auto operator<=>(const BoundaryPoint&, const BoundaryPoint&) = default;
};

using Endpoint = std::variant<ModelPoint, BoundaryPoint>;

enum class SpaceKind { LatticeRayPlane, MetricTree, EuclideanPlane };

std::string to_string(SpaceKind kind);

struct TreeEdge {
  std::int64_t u = 0;
  std::int64_t v = 0;
  double length = 0.0;
};

// Immutable finite metric tree with dense internal vertex indices.
class MetricTree {
 public:
  // Throws InvalidInput unless the edges form a connected acyclic graph with
  // positive lengths. Rays go on ray_leaves, or on every leaf when omitted.
  MetricTree(std::vector<TreeEdge> edges, std::optional<std::vector<std::int64_t>> ray_leaves);

  struct Loc {
    int vertex = -1;  // >= 0 for a vertex
    int edge = -1;    // >= 0 for an edge interior point
    double t = 0.0;   // offset from edges()[edge].u
  };

  const std::vector<TreeEdge>& edges() const { return edges_; }  // u < v by id
  std::size_t vertex_count() const { return ids_.size(); }
  std::int64_t id(int index) const { return ids_[static_cast<std::size_t>(index)]; }
  int index_of(std::int64_t id) const;  // -1 when unknown
  int edge_index(std::int64_t u, std::int64_t v) const;  // -1 when absent
  int edge_u(int e) const { return edge_u_[static_cast<std::size_t>(e)]; }
  int edge_v(int e) const { return edge_v_[static_cast<std::size_t>(e)]; }
  double vertex_distance(int a, int b) const { return dist_[static_cast<std::size_t>(a) * ids_.size() + b]; }
  int depth(int vertex) const { return depth_[static_cast<std::size_t>(vertex)]; }
  bool has_ray(std::int64_t leaf_id) const;
  const std::vector<std::int64_t>& ray_leaves() const { return ray_leaves_; }
  const std::vector<int>& neighbors(int vertex) const { return adj_[static_cast<std::size_t>(vertex)]; }

  double loc_distance(const Loc& a, const Loc& b) const;
  double loc_to_vertex(const Loc& a, int vertex) const;
  // Edges traversed from a to b, as (edge, from offset, to offset) triples.
  struct Step {
    int edge;
    double from_t;
    double to_t;
  };
  std::vector<Step> path(const Loc& a, const Loc& b) const;

 private:
  std::vector<int> vertex_path(int a, int b) const;

  std::vector<TreeEdge> edges_;
  std::vector<std::int64_t> ids_;
  std::map<std::int64_t, int> index_;
  std::map<std::pair<int, int>, int> edge_lookup_;
  std::vector<int> edge_u_, edge_v_;
  std::vector<std::vector<int>> adj_;
  std::vector<double> dist_;
  std::vector<int> parent_, depth_;
  std::vector<std::int64_t> ray_leaves_;
};

class ModelSpace {
 public:
  static ModelSpace lattice_ray_plane();
  static ModelSpace euclidean_plane();
  static ModelSpace metric_tree(std::vector<TreeEdge> edges,
                                std::optional<std::vector<std::int64_t>> ray_leaves = std::nullopt);

  SpaceKind kind() const { return kind_; }
  bool is_lattice() const { return kind_ == SpaceKind::LatticeRayPlane; }
  bool is_tree() const { return kind_ == SpaceKind::MetricTree; }
  bool is_euclidean() const { return kind_ == SpaceKind::EuclideanPlane; }
  const MetricTree& tree() const;

  // Validates p and returns its canonical form. Throws InvalidInput for a
  // chart the space does not have, negative heights or non-finite values.
  ModelPoint canonical(const ModelPoint& p) const;
  void validate(const BoundaryPoint& b) const;
  bool has_boundary_point(const BoundaryPoint& b) const;

  // The point where the ray of b meets the base.
  ModelPoint attachment(const BoundaryPoint& b) const;

  // A stable key: "lattice_ray_plane", "euclidean_plane", or
  // "metric_tree:<hash of edges>".
  std::string key() const;

 private:
  SpaceKind kind_ = SpaceKind::LatticeRayPlane;
  std::shared_ptr<const MetricTree> tree_;
};

double distance(const ModelSpace& space, const ModelPoint& p, const ModelPoint& q);
bool same_point(const ModelSpace& space, const ModelPoint& p, const ModelPoint& q);

// Geodesic pieces. Parameters are unit-speed arc length.
struct PlaneSegmentPiece {
  PlanePoint a, b;
};
struct EdgeSegmentPiece {
  int edge = -1;  // index into MetricTree::edges()
  double from_t = 0.0, to_t = 0.0;
};
struct RaySegmentPiece {
  std::int64_t m = 0, n = 0;
  double from_h = 0.0, to_h = 0.0;
};
struct RayAscentPiece {  // up to infinity
  std::int64_t m = 0, n = 0;
  double from_h = 0.0;
};
struct RayDescentPiece {  // down from infinity
  std::int64_t m = 0, n = 0;
  double to_h = 0.0;
};
struct LinePiece {  // bi-infinite Euclidean line, unit direction
  PlanePoint origin;
  double dx = 1.0, dy = 0.0;
};

struct Piece {
  std::variant<PlaneSegmentPiece, EdgeSegmentPiece, RaySegmentPiece, RayAscentPiece, RayDescentPiece, LinePiece>
      shape;
  double t0 = 0.0;  // may be -inf
  double t1 = 0.0;  // may be +inf
  double length() const { return t1 - t0; }
};

class GeodesicPath {
 public:
  GeodesicPath(std::vector<Piece> pieces, Endpoint start, Endpoint end)
      : pieces_(std::move(pieces)), start_(std::move(start)), end_(std::move(end)) {}

  // A full line in the Euclidean plane through origin with direction (dx, dy).
  static GeodesicPath line(PlanePoint origin, double dx, double dy);

  const std::vector<Piece>& pieces() const { return pieces_; }
  const Endpoint& start() const { return start_; }
  const Endpoint& end() const { return end_; }
  double t_min() const { return pieces_.front().t0; }
  double t_max() const { return pieces_.back().t1; }
  bool is_bi_infinite() const;
  // The two boundary endpoints of a bi-infinite geodesic between rays.
  std::optional<std::pair<BoundaryPoint, BoundaryPoint>> boundary_ends() const;

  ModelPoint point_at(const ModelSpace& space, double t) const;
  // Total length of the base (plane or tree) portion.
  double base_length() const;

 private:
  std::vector<Piece> pieces_;
  Endpoint start_, end_;
};

// The unique geodesic between a and b (a != b). Throws InvalidInput when
// a == b or a boundary point is requested in the Euclidean plane.
GeodesicPath geodesic(const ModelSpace& space, const Endpoint& a, const Endpoint& b);

struct LatticeBox {
  std::int64_t m_lo = 0, m_hi = 0, n_lo = 0, n_hi = 0;
  static LatticeBox square(std::int64_t lo, std::int64_t hi) { return {lo, hi, lo, hi}; }
};
struct TreeDepth {
  int max_depth = 0;
};
using BoundaryWindow = std::variant<LatticeBox, TreeDepth>;

// Every boundary point inside the window exactly once, in a fixed order.
std::vector<BoundaryPoint> enumerate_boundary(const ModelSpace& space, const BoundaryWindow& window);

// Helpers shared by the geometry modules.
namespace detail {

// A point seen as (base location, height above it, ray it sits on).
struct Lifted {
  PlanePoint plane;          // plane base (lattice / euclidean)
  MetricTree::Loc tree_loc;  // tree base
  double h = 0.0;
  bool on_ray = false;  // h > 0
  std::int64_t m = 0, n = 0;
};

Lifted lift(const ModelSpace& space, const ModelPoint& canonical_point);
double base_distance(const ModelSpace& space, const Lifted& a, const Lifted& b);
MetricTree::Loc tree_loc(const MetricTree& tree, const EdgePoint& e);
ModelPoint tree_point(const MetricTree& tree, const MetricTree::Loc& loc);

}  // namespace detail

}  // namespace morselab
