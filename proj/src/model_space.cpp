#include "morselab/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace morselab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::LatticeRayPlane:
      return "lattice_ray_plane";
    case SpaceKind::MetricTree:
      return "metric_tree";
    case SpaceKind::EuclideanPlane:
      return "euclidean_plane";
  }
  return "unknown";
}

// ---------------------------------------------------------------- MetricTree

MetricTree::MetricTree(std::vector<TreeEdge> edges, std::optional<std::vector<std::int64_t>> ray_leaves) {
  if (edges.empty()) throw InvalidInput("metric tree needs at least one edge");
  std::set<std::int64_t> ids;
  for (auto& e : edges) {
    if (!finite(e.length) || e.length <= 0.0) throw InvalidInput("metric tree edge lengths must be positive");
    if (e.u == e.v) throw InvalidInput("metric tree edge is a loop");
    if (e.u > e.v) std::swap(e.u, e.v);
    ids.insert(e.u);
    ids.insert(e.v);
  }
  ids_.assign(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids_.size(); ++i) index_[ids_[i]] = static_cast<int>(i);
  if (edges.size() + 1 != ids_.size()) throw InvalidInput("metric tree edges do not form a tree");

  std::sort(edges.begin(), edges.end(), [](const TreeEdge& a, const TreeEdge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  edges_ = std::move(edges);
  adj_.resize(ids_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const int a = index_.at(edges_[e].u);
    const int b = index_.at(edges_[e].v);
    if (!edge_lookup_.emplace(std::pair(a, b), static_cast<int>(e)).second)
      throw InvalidInput("metric tree has a repeated edge");
    edge_lookup_.emplace(std::pair(b, a), static_cast<int>(e));
    edge_u_.push_back(a);
    edge_v_.push_back(b);
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }

  const std::size_t n = ids_.size();
  parent_.assign(n, -1);
  depth_.assign(n, -1);
  std::deque<int> queue{0};
  depth_[0] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : adj_[v]) {
      if (depth_[w] >= 0) continue;
      depth_[w] = depth_[v] + 1;
      parent_[w] = v;
      queue.push_back(w);
    }
  }
  if (std::any_of(depth_.begin(), depth_.end(), [](int d) { return d < 0; }))
    throw InvalidInput("metric tree is not connected");

  dist_.assign(n * n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::deque<int> q{static_cast<int>(s)};
    seen[s] = true;
    while (!q.empty()) {
      const int v = q.front();
      q.pop_front();
      for (int w : adj_[v]) {
        if (seen[w]) continue;
        seen[w] = true;
        const int e = edge_lookup_.at({v, w});
        dist_[s * n + w] = dist_[s * n + v] + edges_[e].length;
        q.push_back(w);
      }
    }
  }

  if (ray_leaves) {
    for (std::int64_t leaf : *ray_leaves) {
      const int i = index_of(leaf);
      if (i < 0 || adj_[i].size() != 1) throw InvalidInput("rays may only be attached at leaves");
      ray_leaves_.push_back(leaf);
    }
    std::sort(ray_leaves_.begin(), ray_leaves_.end());
    ray_leaves_.erase(std::unique(ray_leaves_.begin(), ray_leaves_.end()), ray_leaves_.end());
  } else {
    for (std::size_t i = 0; i < n; ++i)
      if (adj_[i].size() == 1) ray_leaves_.push_back(ids_[i]);
  }
}

int MetricTree::index_of(std::int64_t id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

int MetricTree::edge_index(std::int64_t u, std::int64_t v) const {
  const int a = index_of(u);
  const int b = index_of(v);
  if (a < 0 || b < 0) return -1;
  auto it = edge_lookup_.find({a, b});
  return it == edge_lookup_.end() ? -1 : it->second;
}

bool MetricTree::has_ray(std::int64_t leaf_id) const {
  return std::binary_search(ray_leaves_.begin(), ray_leaves_.end(), leaf_id);
}

double MetricTree::loc_to_vertex(const Loc& a, int vertex) const {
  if (a.vertex >= 0) return vertex_distance(a.vertex, vertex);
  const double len = edges_[a.edge].length;
  return std::min(a.t + vertex_distance(edge_u_[a.edge], vertex),
                  (len - a.t) + vertex_distance(edge_v_[a.edge], vertex));
}

double MetricTree::loc_distance(const Loc& a, const Loc& b) const {
  if (a.vertex >= 0) return loc_to_vertex(b, a.vertex);
  if (b.vertex >= 0) return loc_to_vertex(a, b.vertex);
  if (a.edge == b.edge) return std::abs(a.t - b.t);
  const double la = edges_[a.edge].length;
  return std::min(a.t + loc_to_vertex(b, edge_u_[a.edge]), (la - a.t) + loc_to_vertex(b, edge_v_[a.edge]));
}

std::vector<int> MetricTree::vertex_path(int a, int b) const {
  std::vector<int> up, down;
  while (a != b) {
    if (depth_[a] >= depth_[b]) {
      up.push_back(a);
      a = parent_[a];
    } else {
      down.push_back(b);
      b = parent_[b];
    }
  }
  up.push_back(a);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

std::vector<MetricTree::Step> MetricTree::path(const Loc& a, const Loc& b) const {
  std::vector<Step> steps;
  if (a.vertex < 0 && b.vertex < 0 && a.edge == b.edge) {
    if (a.t != b.t) steps.push_back({a.edge, a.t, b.t});
    return steps;
  }
  int x = a.vertex;
  if (x < 0) {
    const int u = edge_u_[a.edge], v = edge_v_[a.edge];
    const double len = edges_[a.edge].length;
    x = (a.t + loc_to_vertex(b, u) <= (len - a.t) + loc_to_vertex(b, v)) ? u : v;
    steps.push_back({a.edge, a.t, x == u ? 0.0 : len});
  }
  int y = b.vertex;
  std::optional<Step> tail;
  if (y < 0) {
    const int u = edge_u_[b.edge], v = edge_v_[b.edge];
    const double len = edges_[b.edge].length;
    y = (b.t + vertex_distance(x, u) <= (len - b.t) + vertex_distance(x, v)) ? u : v;
    tail = Step{b.edge, y == u ? 0.0 : len, b.t};
  }
  const auto verts = vertex_path(x, y);
  for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
    const int e = edge_lookup_.at({verts[i], verts[i + 1]});
    const double len = edges_[e].length;
    const bool forward = edge_u_[e] == verts[i];
    steps.push_back({e, forward ? 0.0 : len, forward ? len : 0.0});
  }
  if (tail) steps.push_back(*tail);
  return steps;
}

// ---------------------------------------------------------------- ModelSpace

ModelSpace ModelSpace::lattice_ray_plane() {
  ModelSpace s;
  s.kind_ = SpaceKind::LatticeRayPlane;
  return s;
}

ModelSpace ModelSpace::euclidean_plane() {
  ModelSpace s;
  s.kind_ = SpaceKind::EuclideanPlane;
  return s;
}

ModelSpace ModelSpace::metric_tree(std::vector<TreeEdge> edges, std::optional<std::vector<std::int64_t>> ray_leaves) {
  ModelSpace s;
  s.kind_ = SpaceKind::MetricTree;
  s.tree_ = std::make_shared<const MetricTree>(std::move(edges), std::move(ray_leaves));
  return s;
}

const MetricTree& ModelSpace::tree() const {
  if (!tree_) throw InvalidInput("space is not a metric tree");
  return *tree_;
}

ModelPoint ModelSpace::canonical(const ModelPoint& p) const {
  return std::visit(
      [&](const auto& c) -> ModelPoint {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PlanePoint>) {
          if (kind_ == SpaceKind::MetricTree) throw InvalidInput("plane chart is not valid in a metric tree");
          if (!finite(c.x) || !finite(c.y)) throw InvalidInput("plane coordinates must be finite");
          // Normalize -0.0 so equal points compare equal field-wise.
          return ModelPoint::plane(c.x + 0.0, c.y + 0.0);
        } else if constexpr (std::is_same_v<T, RayPoint>) {
          if (kind_ == SpaceKind::EuclideanPlane) throw InvalidInput("ray chart is not valid in the Euclidean plane");
          if (!finite(c.h) || c.h < -kGeomEps) throw InvalidInput("ray height must be finite and non-negative");
          if (kind_ == SpaceKind::MetricTree) {
            if (c.n != 0 || !tree_->has_ray(c.m)) throw InvalidInput("no ray is attached at that tree vertex");
            if (c.h <= kGeomEps) return ModelPoint::vertex(c.m);
            return ModelPoint::ray(c.m, 0, c.h);
          }
          if (c.h <= kGeomEps) return ModelPoint::plane(static_cast<double>(c.m), static_cast<double>(c.n));
          return ModelPoint::ray(c.m, c.n, c.h);
        } else {
          if (kind_ != SpaceKind::MetricTree) throw InvalidInput("edge chart is only valid in a metric tree");
          if (!finite(c.t)) throw InvalidInput("edge offset must be finite");
          if (c.u == c.v) {
            if (tree_->index_of(c.u) < 0) throw InvalidInput("unknown tree vertex");
            if (std::abs(c.t) > kGeomEps) throw InvalidInput("vertex chart must have t = 0");
            return ModelPoint::vertex(c.u);
          }
          const int e = tree_->edge_index(c.u, c.v);
          if (e < 0) throw InvalidInput("no such tree edge");
          const TreeEdge& edge = tree_->edges()[static_cast<std::size_t>(e)];
          const double t = (edge.u == c.u) ? c.t : edge.length - c.t;
          if (t < -kGeomEps || t > edge.length + kGeomEps) throw InvalidInput("edge offset out of range");
          if (t <= kGeomEps) return ModelPoint::vertex(edge.u);
          if (t >= edge.length - kGeomEps) return ModelPoint::vertex(edge.v);
          return ModelPoint::edge(edge.u, edge.v, t);
        }
      },
      p.chart());
}

bool ModelSpace::has_boundary_point(const BoundaryPoint& b) const {
  switch (kind_) {
    case SpaceKind::LatticeRayPlane:
      return true;
    case SpaceKind::MetricTree:
      return b.n == 0 && tree_->has_ray(b.m);
    case SpaceKind::EuclideanPlane:
      return false;
  }
  return false;
}

void ModelSpace::validate(const BoundaryPoint& b) const {
  if (kind_ == SpaceKind::EuclideanPlane) throw InvalidInput("the Euclidean plane has an empty Morse boundary");
  if (!has_boundary_point(b)) throw InvalidInput("no such boundary point");
}

ModelPoint ModelSpace::attachment(const BoundaryPoint& b) const {
  validate(b);
  if (kind_ == SpaceKind::MetricTree) return ModelPoint::vertex(b.m);
  return ModelPoint::plane(static_cast<double>(b.m), static_cast<double>(b.n));
}

std::string ModelSpace::key() const {
  if (kind_ != SpaceKind::MetricTree) return to_string(kind_);
  std::ostringstream os;
  os.precision(17);
  for (const auto& e : tree_->edges()) os << e.u << ',' << e.v << ',' << e.length << ';';
  os << '|';
  for (auto l : tree_->ray_leaves()) os << l << ',';
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << "metric_tree:" << std::hex << h;
  return out.str();
}

// ---------------------------------------------------------------- metric

namespace detail {

MetricTree::Loc tree_loc(const MetricTree& tree, const EdgePoint& e) {
  MetricTree::Loc loc;
  if (e.u == e.v) {
    loc.vertex = tree.index_of(e.u);
  } else {
    loc.edge = tree.edge_index(e.u, e.v);
    loc.t = e.t;
  }
  return loc;
}

ModelPoint tree_point(const MetricTree& tree, const MetricTree::Loc& loc) {
  if (loc.vertex >= 0) return ModelPoint::vertex(tree.id(loc.vertex));
  const TreeEdge& e = tree.edges()[static_cast<std::size_t>(loc.edge)];
  if (loc.t <= kGeomEps) return ModelPoint::vertex(e.u);
  if (loc.t >= e.length - kGeomEps) return ModelPoint::vertex(e.v);
  return ModelPoint::edge(e.u, e.v, loc.t);
}

Lifted lift(const ModelSpace& space, const ModelPoint& p) {
  Lifted l;
  if (p.is_plane()) {
    l.plane = p.as_plane();
  } else if (p.is_edge()) {
    l.tree_loc = tree_loc(space.tree(), p.as_edge());
  } else {
    const RayPoint& r = p.as_ray();
    l.h = r.h;
    l.on_ray = r.h > 0.0;
    l.m = r.m;
    l.n = r.n;
    if (space.is_tree()) {
      l.tree_loc.vertex = space.tree().index_of(r.m);
    } else {
      l.plane = {static_cast<double>(r.m), static_cast<double>(r.n)};
    }
  }
  return l;
}

double base_distance(const ModelSpace& space, const Lifted& a, const Lifted& b) {
  if (space.is_tree()) return space.tree().loc_distance(a.tree_loc, b.tree_loc);
  return std::hypot(a.plane.x - b.plane.x, a.plane.y - b.plane.y);
}

}  // namespace detail

namespace {

// Total order on lifted points so distance(p, q) and distance(q, p) run the
// same floating-point operations.
auto order_key(const detail::Lifted& l) {
  return std::tuple(l.plane.x, l.plane.y, l.tree_loc.vertex, l.tree_loc.edge, l.tree_loc.t, l.m, l.n, l.h);
}

}  // namespace

double distance(const ModelSpace& space, const ModelPoint& p, const ModelPoint& q) {
  auto a = detail::lift(space, space.canonical(p));
  auto b = detail::lift(space, space.canonical(q));
  if (order_key(b) < order_key(a)) std::swap(a, b);
  if (a.on_ray && b.on_ray && a.m == b.m && a.n == b.n) return std::abs(a.h - b.h);
  return a.h + detail::base_distance(space, a, b) + b.h;
}

bool same_point(const ModelSpace& space, const ModelPoint& p, const ModelPoint& q) {
  return distance(space, p, q) <= kGeomEps;
}

// ---------------------------------------------------------------- geodesics

GeodesicPath GeodesicPath::line(PlanePoint origin, double dx, double dy) {
  const double len = std::hypot(dx, dy);
  if (!(len > 0.0) || !finite(len)) throw InvalidInput("line direction must be a non-zero finite vector");
  Piece p{LinePiece{origin, dx / len, dy / len}, -kInf, kInf};
  return GeodesicPath({p}, ModelPoint::plane(origin.x, origin.y), ModelPoint::plane(origin.x, origin.y));
}

bool GeodesicPath::is_bi_infinite() const { return std::isinf(t_min()) && std::isinf(t_max()); }

std::optional<std::pair<BoundaryPoint, BoundaryPoint>> GeodesicPath::boundary_ends() const {
  if (!std::holds_alternative<BoundaryPoint>(start_) || !std::holds_alternative<BoundaryPoint>(end_))
    return std::nullopt;
  return std::pair(std::get<BoundaryPoint>(start_), std::get<BoundaryPoint>(end_));
}

double GeodesicPath::base_length() const {
  double total = 0.0;
  for (const auto& p : pieces_) {
    if (std::holds_alternative<PlaneSegmentPiece>(p.shape) || std::holds_alternative<EdgeSegmentPiece>(p.shape) ||
        std::holds_alternative<LinePiece>(p.shape))
      total += p.length();
  }
  return total;
}

ModelPoint GeodesicPath::point_at(const ModelSpace& space, double t) const {
  if (std::isnan(t) || t < t_min() || t > t_max()) throw InvalidInput("parameter outside the geodesic");
  const Piece* piece = &pieces_.back();
  for (const auto& p : pieces_) {
    if (t <= p.t1) {
      piece = &p;
      break;
    }
  }
  const double t0 = piece->t0;
  const double t1 = piece->t1;
  return std::visit(
      [&](const auto& s) -> ModelPoint {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PlaneSegmentPiece>) {
          const double len = t1 - t0;
          if (len <= 0.0) return ModelPoint::plane(s.a.x, s.a.y);
          const double f = (t - t0) / len;
          return space.canonical(ModelPoint::plane(s.a.x + f * (s.b.x - s.a.x), s.a.y + f * (s.b.y - s.a.y)));
        } else if constexpr (std::is_same_v<T, EdgeSegmentPiece>) {
          const double off = s.from_t + (s.to_t >= s.from_t ? 1.0 : -1.0) * (t - t0);
          return detail::tree_point(space.tree(), MetricTree::Loc{-1, s.edge, off});
        } else if constexpr (std::is_same_v<T, RaySegmentPiece>) {
          const double h = s.from_h + (s.to_h >= s.from_h ? 1.0 : -1.0) * (t - t0);
          return space.canonical(ModelPoint::ray(s.m, s.n, std::max(h, 0.0)));
        } else if constexpr (std::is_same_v<T, RayAscentPiece>) {
          return space.canonical(ModelPoint::ray(s.m, s.n, s.from_h + (t - t0)));
        } else if constexpr (std::is_same_v<T, RayDescentPiece>) {
          return space.canonical(ModelPoint::ray(s.m, s.n, s.to_h + (t1 - t)));
        } else {
          return ModelPoint::plane(s.origin.x + t * s.dx, s.origin.y + t * s.dy);
        }
      },
      piece->shape);
}

namespace {

struct EndInfo {
  bool boundary = false;
  BoundaryPoint b;
  ModelPoint p;
  detail::Lifted lifted;
  bool has_ray = false;  // sits on a ray strictly above the base, or is a ray end
  std::int64_t m = 0, n = 0;
  double h = 0.0;
};

EndInfo describe(const ModelSpace& space, const Endpoint& e) {
  EndInfo info;
  if (const auto* b = std::get_if<BoundaryPoint>(&e)) {
    space.validate(*b);
    info.boundary = true;
    info.b = *b;
    info.p = space.attachment(*b);
    info.lifted = detail::lift(space, info.p);
    info.has_ray = true;
    info.m = b->m;
    info.n = b->n;
    info.h = kInf;
    return info;
  }
  info.p = space.canonical(std::get<ModelPoint>(e));
  info.lifted = detail::lift(space, info.p);
  if (info.lifted.on_ray) {
    info.has_ray = true;
    info.m = info.lifted.m;
    info.n = info.lifted.n;
    info.h = info.lifted.h;
    // Base of the lift is the attachment point.
  }
  return info;
}

detail::Lifted base_only(detail::Lifted l) {
  l.h = 0.0;
  l.on_ray = false;
  return l;
}

}  // namespace

GeodesicPath geodesic(const ModelSpace& space, const Endpoint& a, const Endpoint& b) {
  const EndInfo A = describe(space, a);
  const EndInfo B = describe(space, b);
  if (A.boundary && B.boundary && A.b == B.b) throw InvalidInput("geodesic endpoints coincide");
  if (!A.boundary && !B.boundary && same_point(space, A.p, B.p)) throw InvalidInput("geodesic endpoints coincide");

  std::vector<Piece> pieces;
  auto push = [&](auto shape, double length) { pieces.push_back(Piece{shape, 0.0, length}); };

  if (A.has_ray && B.has_ray && A.m == B.m && A.n == B.n) {
    if (A.boundary) {
      pieces.push_back(Piece{RayDescentPiece{B.m, B.n, B.h}, -kInf, 0.0});
    } else if (B.boundary) {
      pieces.push_back(Piece{RayAscentPiece{A.m, A.n, A.h}, 0.0, kInf});
    } else {
      push(RaySegmentPiece{A.m, A.n, A.h, B.h}, std::abs(A.h - B.h));
    }
    return GeodesicPath(std::move(pieces), a, b);
  }

  if (A.boundary) {
    pieces.push_back(Piece{RayDescentPiece{A.m, A.n, 0.0}, -kInf, 0.0});
  } else if (A.has_ray) {
    push(RaySegmentPiece{A.m, A.n, A.h, 0.0}, A.h);
  }

  const detail::Lifted base_a = base_only(A.lifted);
  const detail::Lifted base_b = base_only(B.lifted);
  if (space.is_tree()) {
    for (const auto& step : space.tree().path(base_a.tree_loc, base_b.tree_loc))
      push(EdgeSegmentPiece{step.edge, step.from_t, step.to_t}, std::abs(step.to_t - step.from_t));
  } else {
    const double len = std::hypot(base_b.plane.x - base_a.plane.x, base_b.plane.y - base_a.plane.y);
    if (len > 0.0) push(PlaneSegmentPiece{base_a.plane, base_b.plane}, len);
  }

  if (B.boundary) {
    pieces.push_back(Piece{RayAscentPiece{B.m, B.n, 0.0}, 0.0, kInf});
  } else if (B.has_ray) {
    push(RaySegmentPiece{B.m, B.n, 0.0, B.h}, B.h);
  }

  // Lay out parameters: 0 at the first finite point.
  double t = 0.0;
  for (auto& p : pieces) {
    if (std::isinf(p.t0)) continue;  // descent from infinity already ends at 0
    const double len = p.t1 - p.t0;
    p.t0 = t;
    p.t1 = std::isinf(len) ? kInf : t + len;
    t = p.t1;
  }
  return GeodesicPath(std::move(pieces), a, b);
}

std::vector<BoundaryPoint> enumerate_boundary(const ModelSpace& space, const BoundaryWindow& window) {
  std::vector<BoundaryPoint> out;
  if (const auto* box = std::get_if<LatticeBox>(&window)) {
    if (box->m_lo > box->m_hi || box->n_lo > box->n_hi) throw InvalidInput("empty boundary window");
    if (!space.is_lattice()) return out;
    for (auto m = box->m_lo; m <= box->m_hi; ++m)
      for (auto n = box->n_lo; n <= box->n_hi; ++n) out.push_back({m, n});
    return out;
  }
  const auto& depth = std::get<TreeDepth>(window);
  if (depth.max_depth < 0) throw InvalidInput("empty boundary window");
  if (!space.is_tree()) return out;
  const auto& tree = space.tree();
  for (auto leaf : tree.ray_leaves())
    if (tree.depth(tree.index_of(leaf)) <= depth.max_depth) out.push_back({leaf, 0});
  return out;
}

}  // namespace morselab
