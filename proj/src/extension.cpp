#include "morselab/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "morselab/enclosing_ball.hpp"
#include "morselab/kernels.hpp"
#include "morselab/random.hpp"
#include "morselab/tables.hpp"

namespace morselab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A plane-based cloud reduced to what matters for balls and diameters: the
// hull of the plane points and, per ray, its lowest and highest point.
struct ReducedCloud {
  std::vector<PlanePoint> hull;
  struct Ray {
    PlanePoint base;
    std::int64_t m, n;
    double lo, hi;
  };
  std::vector<Ray> rays;
};

ReducedCloud reduce(std::span<const ModelPoint> cloud) {
  std::vector<PlanePoint> plane;
  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<double, double>> rays;
  for (const auto& p : cloud) {
    if (p.is_plane()) {
      plane.push_back(p.as_plane());
    } else if (p.is_ray()) {
      const auto& r = p.as_ray();
      auto [it, fresh] = rays.try_emplace({r.m, r.n}, r.h, r.h);
      if (!fresh) {
        it->second.first = std::min(it->second.first, r.h);
        it->second.second = std::max(it->second.second, r.h);
      }
    } else {
      throw InvalidInput("tree point in a plane-based cloud");
    }
  }
  ReducedCloud out;
  out.hull = geom::convex_hull(std::move(plane));
  for (const auto& [mn, h] : rays) {
    out.rays.push_back({{static_cast<double>(mn.first), static_cast<double>(mn.second)}, mn.first, mn.second,
                        h.first, h.second});
  }
  return out;
}

double plane_distance(const PlanePoint& a, const PlanePoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::pair<std::size_t, std::size_t> tree_diametral_pair(const ModelSpace& space, std::span<const ModelPoint> cloud) {
  auto farthest = [&](std::size_t from) {
    std::size_t best = from;
    double d_best = -1.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double d = distance(space, cloud[from], cloud[i]);
      if (d > d_best) {
        d_best = d;
        best = i;
      }
    }
    return best;
  };
  const std::size_t a = farthest(0);
  return {a, farthest(a)};
}

}  // namespace

ModelPoint translate(const ModelPoint& p, std::int64_t dx, std::int64_t dy) {
  if (dx == 0 && dy == 0) return p;
  if (p.is_plane()) return ModelPoint::plane(p.as_plane().x + static_cast<double>(dx), p.as_plane().y + static_cast<double>(dy));
  if (p.is_ray()) return ModelPoint::ray(p.as_ray().m + dx, p.as_ray().n + dy, p.as_ray().h);
  throw InvalidInput("translations act on the lattice-ray plane only");
}

double cloud_diameter(const ModelSpace& space, std::span<const ModelPoint> cloud) {
  if (cloud.empty()) return 0.0;
  if (space.is_tree()) {
    const auto [a, b] = tree_diametral_pair(space, cloud);
    return distance(space, cloud[a], cloud[b]);
  }
  const auto r = reduce(cloud);
  double d = 0.0;
  for (std::size_t i = 0; i < r.hull.size(); ++i)
    for (std::size_t j = i + 1; j < r.hull.size(); ++j) d = std::max(d, plane_distance(r.hull[i], r.hull[j]));
  for (std::size_t i = 0; i < r.rays.size(); ++i) {
    const auto& a = r.rays[i];
    d = std::max(d, a.hi - a.lo);
    for (const auto& p : r.hull) d = std::max(d, plane_distance(p, a.base) + a.hi);
    for (std::size_t j = i + 1; j < r.rays.size(); ++j)
      d = std::max(d, a.hi + r.rays[j].hi + plane_distance(a.base, r.rays[j].base));
  }
  return d;
}

Ball enclosing_ball(const ModelSpace& space, std::span<const ModelPoint> cloud) {
  if (cloud.empty()) throw InvalidInput("barycenter of an empty cloud");
  if (space.is_tree()) {
    const auto [a, b] = tree_diametral_pair(space, cloud);
    const double d = distance(space, cloud[a], cloud[b]);
    if (d == 0.0) return {space.canonical(cloud[a]), 0.0};
    const auto g = geodesic(space, cloud[a], cloud[b]);
    return {g.point_at(space, 0.5 * d), 0.5 * d};
  }
  const auto r = reduce(cloud);
  if (r.rays.empty()) {
    const auto c = geom::min_enclosing_circle(r.hull);
    return {ModelPoint::plane(c.x, c.y), c.r};
  }
  std::vector<double> xs, ys, ws;
  for (const auto& p : r.hull) {
    xs.push_back(p.x);
    ys.push_back(p.y);
    ws.push_back(0.0);
  }
  for (const auto& ray : r.rays) {
    xs.push_back(ray.base.x);
    ys.push_back(ray.base.y);
    ws.push_back(ray.hi);
  }
  const auto wc = geom::min_weighted_center(xs, ys, ws);
  Ball best{ModelPoint::plane(wc.x, wc.y), wc.value};
  // A center up one of the rays: G(t) = max(hi - t, t + O) with O the
  // farthest reach of everything off that ray from its foot, or -lo when the
  // lowest point of the ray itself is the binding one.
  for (std::size_t i = 0; i < r.rays.size(); ++i) {
    const auto& ray = r.rays[i];
    double O = -ray.lo;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j == r.hull.size() + i) continue;
      O = std::max(O, ws[j] + std::hypot(xs[j] - ray.base.x, ys[j] - ray.base.y));
    }
    if (ray.hi > O) {
      const double value = 0.5 * (ray.hi + O);
      if (value < best.radius) best = {space.canonical(ModelPoint::ray(ray.m, ray.n, 0.5 * (ray.hi - O))), value};
    }
  }
  return best;
}

namespace {

struct Sides {
  std::array<GeodesicPath, 3> g;
};

Sides triangle_sides(const ModelSpace& space, const Triangle& T) {
  return {{geodesic(space, T[0], T[1]), geodesic(space, T[1], T[2]), geodesic(space, T[2], T[0])}};
}

double max_side_distance(const ModelSpace& space, const Sides& s, const ModelPoint& p) {
  double d = 0.0;
  for (const auto& g : s.g) d = std::max(d, project_point(space, g, p).distance);
  return d;
}

// The projections of each vertex on the opposite side; always members.
void add_side_projections(const ModelSpace& space, const Triangle& T, const Sides& sides, double K,
                          std::vector<ModelPoint>& out) {
  for (int i = 0; i < 3; ++i) {
    const auto& side = sides.g[static_cast<std::size_t>(i)];
    const auto& opposite = T[static_cast<std::size_t>((i + 2) % 3)];
    const ModelPoint p = project_boundary(space, side, opposite).barycenter;
    if (max_side_distance(space, sides, p) > K + kGeomEps)
      throw InvariantViolation("side projection lies outside E_K; K is below the table value for this triangle");
    out.push_back(p);
  }
}

std::vector<ModelPoint> ek_cloud_lattice(const ModelSpace& space, const Triangle& T, double K, double pitch) {
  const auto sides = triangle_sides(space, T);
  std::array<PlanePoint, 3> v;
  for (int i = 0; i < 3; ++i)
    v[static_cast<std::size_t>(i)] = {static_cast<double>(T[static_cast<std::size_t>(i)].m),
                                      static_cast<double>(T[static_cast<std::size_t>(i)].n)};
  const std::array<kernels::Segment, 3> segs{kernels::Segment{v[0].x, v[0].y, v[1].x, v[1].y},
                                             kernels::Segment{v[1].x, v[1].y, v[2].x, v[2].y},
                                             kernels::Segment{v[2].x, v[2].y, v[0].x, v[0].y}};
  double x_lo = kInf, x_hi = -kInf, y_lo = kInf, y_hi = -kInf;
  for (const auto& p : v) {
    x_lo = std::min(x_lo, p.x - K);
    x_hi = std::max(x_hi, p.x + K);
    y_lo = std::min(y_lo, p.y - K);
    y_hi = std::max(y_hi, p.y + K);
  }

  std::vector<double> xs, ys;
  const auto i_lo = static_cast<std::int64_t>(std::ceil(x_lo / pitch)), i_hi = static_cast<std::int64_t>(std::floor(x_hi / pitch));
  const auto j_lo = static_cast<std::int64_t>(std::ceil(y_lo / pitch)), j_hi = static_cast<std::int64_t>(std::floor(y_hi / pitch));
  for (auto i = i_lo; i <= i_hi; ++i) {
    for (auto j = j_lo; j <= j_hi; ++j) {
      xs.push_back(static_cast<double>(i) * pitch);
      ys.push_back(static_cast<double>(j) * pitch);
    }
  }
  std::vector<double> d0(xs.size()), d1(xs.size()), d2(xs.size());
  const auto& k = kernels::active();
  k.distance_to_segment(xs.data(), ys.data(), xs.size(), segs[0], d0.data(), false);
  k.distance_to_segment(xs.data(), ys.data(), xs.size(), segs[1], d1.data(), false);
  k.distance_to_segment(xs.data(), ys.data(), xs.size(), segs[2], d2.data(), false);

  std::vector<ModelPoint> out;
  const double limit = K + kGeomEps;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::max({d0[i], d1[i], d2[i]}) <= limit) out.push_back(ModelPoint::plane(xs[i], ys[i]));

  // Ray stubs. A point at height h on the ray at q is at distance
  // h + d(q, side) from a side, or 0 if the side runs up that ray.
  for (auto m = static_cast<std::int64_t>(std::ceil(x_lo)); m <= static_cast<std::int64_t>(std::floor(x_hi)); ++m) {
    for (auto n = static_cast<std::int64_t>(std::ceil(y_lo)); n <= static_cast<std::int64_t>(std::floor(y_hi)); ++n) {
      const double qx = static_cast<double>(m), qy = static_cast<double>(n);
      double reach = 0.0;
      for (int s = 0; s < 3; ++s) {
        const auto& e0 = T[static_cast<std::size_t>(s)];
        const auto& e1 = T[static_cast<std::size_t>((s + 1) % 3)];
        if ((e0.m == m && e0.n == n) || (e1.m == m && e1.n == n)) continue;
        double d = 0.0;
        k.distance_to_segment(&qx, &qy, 1, segs[static_cast<std::size_t>(s)], &d, false);
        reach = std::max(reach, d);
      }
      const double h_max = K - reach;
      if (h_max <= kGeomEps) continue;
      for (double h = pitch; h < h_max; h += pitch) out.push_back(ModelPoint::ray(m, n, h));
      out.push_back(ModelPoint::ray(m, n, h_max));
    }
  }
  add_side_projections(space, T, sides, K, out);
  return out;
}

std::vector<ModelPoint> ek_cloud_tree(const ModelSpace& space, const Triangle& T, double K, double pitch) {
  const auto sides = triangle_sides(space, T);
  const auto& tree = space.tree();
  double min_edge = kInf;
  for (const auto& e : tree.edges()) min_edge = std::min(min_edge, e.length);
  const double step = std::max(pitch, min_edge / 64.0);

  std::vector<ModelPoint> candidates;
  for (std::size_t v = 0; v < tree.vertex_count(); ++v) candidates.push_back(ModelPoint::vertex(tree.id(static_cast<int>(v))));
  for (const auto& e : tree.edges())
    for (double t = step; t < e.length; t += step) candidates.push_back(ModelPoint::edge(e.u, e.v, t));
  for (auto leaf : tree.ray_leaves())
    for (double h = step; h <= K; h += step) candidates.push_back(ModelPoint::ray(leaf, 0, h));

  std::vector<ModelPoint> out;
  for (const auto& c : candidates) {
    const ModelPoint p = space.canonical(c);
    if (max_side_distance(space, sides, p) <= K + kGeomEps) out.push_back(p);
  }
  add_side_projections(space, T, sides, K, out);
  return out;
}

EKSet make_ek(const ModelSpace& space, const Triangle& T, double K, double pitch) {
  EKSet s;
  s.triangle = T;
  s.K = K;
  s.pitch = pitch;
  s.samples = space.is_tree() ? ek_cloud_tree(space, T, K, pitch) : ek_cloud_lattice(space, T, K, pitch);
  s.ball = enclosing_ball(space, s.samples);
  s.diameter = cloud_diameter(space, s.samples);
  return s;
}

}  // namespace

EKSet ek_set(const ModelSpace& space, const Triangle& T, double K, double grid_pitch) {
  if (space.is_euclidean()) throw InvalidInput("the Euclidean plane has no boundary triangles");
  if (!(K > 0.0)) throw InvalidInput("E_K needs K > 0");
  for (const auto& p : T) space.validate(p);
  if (T[0] == T[1] || T[1] == T[2] || T[0] == T[2]) throw InvalidInput("degenerate triangle");
  if (grid_pitch > 0.0) return make_ek(space, T, K, grid_pitch);

  const EKSet coarse = make_ek(space, T, K, K / 16.0);
  EKSet fine = make_ek(space, T, K, K / 32.0);
  if (distance(space, coarse.ball.center, fine.ball.center) >= K / 8.0)
    throw InvariantViolation("E_K barycenter moved by K/8 or more under grid refinement");
  return fine;
}

std::vector<Triangle> lattice_shapes(double D) {
  static std::mutex mutex;
  static std::map<double, std::vector<Triangle>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(D); it != cache.end()) return it->second;
  std::vector<BoundaryPoint> pts;
  for (const auto& o : lattice_offsets(D))
    if (o.m > 0 || (o.m == 0 && o.n > 0)) pts.push_back(o);
  std::vector<Triangle> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dx = static_cast<double>(pts[i].m - pts[j].m), dy = static_cast<double>(pts[i].n - pts[j].n);
      if (std::sqrt(dx * dx + dy * dy) <= D + kGeomEps) out.push_back({BoundaryPoint{0, 0}, pts[i], pts[j]});
    }
  }
  cache.emplace(D, out);
  return out;
}

BarycenterMap::BarycenterMap(const ModelSpace& space, double D) : space_(space), D_(D) {
  if (space.is_euclidean()) throw InvalidInput("the Euclidean plane has no boundary triangles");
  if (!(D > 0.0)) throw InvalidInput("D must be positive");
  K_ = ConstantsTable::for_space(space).K(D);
}

const BarycenterMap::Shape& BarycenterMap::shape(const Triangle& T, std::int64_t& dx, std::int64_t& dy) const {
  Triangle s = T;
  std::sort(s.begin(), s.end());
  std::array<std::int64_t, 6> key{};
  dx = dy = 0;
  if (space_.is_lattice()) {
    dx = s[0].m;
    dy = s[0].n;
    for (auto& p : s) p = {p.m - dx, p.n - dy};
  }
  for (int i = 0; i < 3; ++i) {
    key[static_cast<std::size_t>(2 * i)] = s[static_cast<std::size_t>(i)].m;
    key[static_cast<std::size_t>(2 * i + 1)] = s[static_cast<std::size_t>(i)].n;
  }
  {
    std::lock_guard lock(mutex_);
    if (auto it = shapes_.find(key); it != shapes_.end()) return *it->second;
  }
  const EKSet ek = ek_set(space_, s, K_);
  auto fresh = std::make_unique<Shape>(Shape{ek.ball.center, ek.diameter});
  std::lock_guard lock(mutex_);
  auto [it, inserted] = shapes_.try_emplace(key, std::move(fresh));
  return *it->second;
}

ModelPoint BarycenterMap::operator()(const Triangle& T) const {
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const auto& a = T[static_cast<std::size_t>(i)];
      const auto& b = T[static_cast<std::size_t>(j)];
      if (a == b) throw InvalidInput("degenerate triangle");
      if (pair_constant(space_, a, b) > D_ + kGeomEps)
        throw StratumFailure("triangle is not in the D-stratum of " + to_string(space_.kind()));
    }
  }
  std::int64_t dx = 0, dy = 0;
  const Shape& s = shape(T, dx, dy);
  return translate(s.barycenter, dx, dy);
}

double BarycenterMap::cloud_diameter(const Triangle& T) const {
  std::int64_t dx = 0, dy = 0;
  return shape(T, dx, dy).diameter;
}

std::shared_ptr<BarycenterMap> BarycenterMap::shared(const ModelSpace& space, double D) {
  static std::mutex mutex;
  static std::map<std::pair<std::string, double>, std::shared_ptr<BarycenterMap>> registry;
  const auto key = std::make_pair(space.key(), D);
  {
    std::lock_guard lock(mutex);
    if (auto it = registry.find(key); it != registry.end()) return it->second;
  }
  auto made = std::make_shared<BarycenterMap>(space, D);
  std::lock_guard lock(mutex);
  return registry.try_emplace(key, std::move(made)).first->second;
}

ModelPoint pi_triangle(const ModelSpace& space, const Triangle& T, double D) {
  return (*BarycenterMap::shared(space, D))(T);
}

FlipResult small_flip_select(const ModelSpace& space, const std::array<BoundaryPoint, 4>& t, double D) {
  const auto check = in_stratum(space, {t.begin(), t.end()}, D);
  if (!check.member) throw StratumFailure("4-tuple is not in the D-stratum");
  FlipResult r;
  r.magnitudes = {std::abs(cross_ratio_value(space, t[0], t[1], t[2], t[3])),
                  std::abs(cross_ratio_value(space, t[0], t[2], t[1], t[3])),
                  std::abs(cross_ratio_value(space, t[0], t[2], t[3], t[1]))};
  const auto it = std::min_element(r.magnitudes.begin(), r.magnitudes.end());
  r.which = static_cast<int>(it - r.magnitudes.begin());
  r.value = *it;
  r.bound = ConstantsTable::for_space(space).flip_C1(D);
  if (r.value > r.bound) throw InvariantViolation("no flipped cross-ratio below the C1 table entry");
  return r;
}

namespace {

std::vector<Triangle> tree_triangles(const ModelSpace& space, double D) {
  const auto& leaves = space.tree().ray_leaves();
  std::vector<Triangle> out;
  for (std::size_t i = 0; i < leaves.size(); ++i)
    for (std::size_t j = i + 1; j < leaves.size(); ++j)
      for (std::size_t k = j + 1; k < leaves.size(); ++k) {
        const Triangle T{BoundaryPoint{leaves[i], 0}, BoundaryPoint{leaves[j], 0}, BoundaryPoint{leaves[k], 0}};
        if (tuple_constant(space, {T.begin(), T.end()}) <= D + kGeomEps) out.push_back(T);
      }
  return out;
}

// Lattice translations g for which shape + g may have its barycenter within
// R of x, and the barycenter of the translate.
template <typename Visit>
void for_each_translate(const BarycenterMap& pi, const Triangle& shape, const detail::Lifted& x, double R,
                        Visit visit) {
  const ModelPoint b = pi(shape);
  const auto lb = detail::lift(pi.space(), b);
  const double ox = x.plane.x - lb.plane.x, oy = x.plane.y - lb.plane.y;
  const auto gx_lo = static_cast<std::int64_t>(std::ceil(ox - R)), gx_hi = static_cast<std::int64_t>(std::floor(ox + R));
  const auto gy_lo = static_cast<std::int64_t>(std::ceil(oy - R)), gy_hi = static_cast<std::int64_t>(std::floor(oy + R));
  for (auto gx = gx_lo; gx <= gx_hi; ++gx)
    for (auto gy = gy_lo; gy <= gy_hi; ++gy) visit(gx, gy, b);
}

}  // namespace

std::vector<PreimageEntry> preimage_triangles(const BarycenterMap& pi, const ModelPoint& x_in, double R) {
  const auto& space = pi.space();
  const ModelPoint x = space.canonical(x_in);
  std::vector<PreimageEntry> out;
  if (space.is_tree()) {
    for (const auto& T : tree_triangles(space, pi.D())) {
      const ModelPoint b = pi(T);
      if (distance(space, x, b) <= R) out.push_back({T, b});
    }
    return out;
  }
  const auto lx = detail::lift(space, x);
  for (const auto& shape : lattice_shapes(pi.D())) {
    for_each_translate(pi, shape, lx, R, [&](std::int64_t gx, std::int64_t gy, const ModelPoint& b) {
      ModelPoint bg = translate(b, gx, gy);
      if (distance(space, x, bg) > R) return;
      Triangle T = shape;
      for (auto& p : T) p = {p.m + gx, p.n + gy};
      out.push_back({T, std::move(bg)});
    });
  }
  return out;
}

double select_radius(const BarycenterMap& pi, std::span<const ModelPoint> queries) {
  const auto& space = pi.space();
  double needed = 0.0;
  for (const auto& q : queries) {
    const ModelPoint x = space.canonical(q);
    double best = kInf;
    if (space.is_tree()) {
      for (const auto& T : tree_triangles(space, pi.D())) best = std::min(best, distance(space, x, pi(T)));
    } else {
      const auto lx = detail::lift(space, x);
      for (const auto& shape : lattice_shapes(pi.D())) {
        const ModelPoint b = pi(shape);
        const auto lb = detail::lift(space, b);
        // The nearest translate is among the few around the rounded offset,
        // or the one that puts the barycenter's ray on x's ray.
        const auto gx0 = static_cast<std::int64_t>(std::llround(lx.plane.x - lb.plane.x));
        const auto gy0 = static_cast<std::int64_t>(std::llround(lx.plane.y - lb.plane.y));
        for (std::int64_t gx = gx0 - 1; gx <= gx0 + 1; ++gx)
          for (std::int64_t gy = gy0 - 1; gy <= gy0 + 1; ++gy)
            best = std::min(best, distance(space, x, translate(b, gx, gy)));
        if (lx.on_ray && lb.on_ray) best = std::min(best, distance(space, x, translate(b, lx.m - lb.m, lx.n - lb.n)));
      }
    }
    if (std::isinf(best)) throw StratumFailure("no D-triangles: D is below the smallest triangle constant");
    needed = std::max(needed, best);
  }
  double R = 1.0;
  while (R < needed) {
    R *= 2.0;
    if (R > 1e9) throw StratumFailure("no radius covers the queries");
  }
  return R;
}

namespace {

std::array<double, 4> point_key(const ModelPoint& p) {
  return std::visit(
      [](const auto& c) -> std::array<double, 4> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PlanePoint>) return {0.0, c.x, c.y, 0.0};
        else if constexpr (std::is_same_v<T, RayPoint>) return {1.0, static_cast<double>(c.m), static_cast<double>(c.n), c.h};
        else return {2.0, static_cast<double>(c.u), static_cast<double>(c.v), c.t};
      },
      p.chart());
}

Triangle map_triangle(const BoundaryMap& f, const Triangle& T) { return {f(T[0]), f(T[1]), f(T[2])}; }

}  // namespace

ExtendedMap::ExtendedMap(const ModelSpace& X, const ModelSpace& Y, const BoundaryMap& f,
                         const ExtendedMapConfig& config)
    : X_(X), Y_(Y), f_(f), config_(config) {
  f_.check_space(X_);
  f_.check_space(Y_);
  if (!(config_.R > 0.0)) throw InvalidInput("R must be positive");
  pi_x_ = BarycenterMap::shared(X_, config_.D);
  pi_y_ = BarycenterMap::shared(Y_, config_.D_prime);

  // Bounded expansion at scale L = 2R: triangle pairs with X-barycenters
  // within L, sampled around a few base points, and the full image clouds of
  // the R-balls at those points.
  const double L = 2.0 * config_.R;
  std::vector<ModelPoint> bases{X_.is_tree() ? ModelPoint::vertex(X_.tree().id(0)) : ModelPoint::plane(0.0, 0.0)};
  for (auto& q : random_queries(X_, {0.0, 0.0}, 4.0, 4, config_.seed)) bases.push_back(q);
  Rng rng(config_.seed ^ 0xc2c2c2c2ULL);
  for (const auto& base : bases) {
    const auto ball = preimage_triangles(*pi_x_, base, config_.R);
    std::vector<ModelPoint> images;
    images.reserve(ball.size());
    for (const auto& e : ball) images.push_back((*pi_y_)(map_triangle(f_, e.triangle)));
    C2_ = std::max(C2_, morselab::cloud_diameter(Y_, images));

    const auto pool = preimage_triangles(*pi_x_, base, L);
    if (pool.size() < 2) continue;
    const std::size_t n_pairs = config_.expansion_pairs / bases.size();
    for (std::size_t k = 0; k < n_pairs; ++k) {
      const auto& a = pool[rng.index(pool.size())];
      const auto& b = pool[rng.index(pool.size())];
      if (distance(X_, a.barycenter, b.barycenter) > L) continue;
      C2_ = std::max(C2_, distance(Y_, (*pi_y_)(map_triangle(f_, a.triangle)), (*pi_y_)(map_triangle(f_, b.triangle))));
    }
  }
  M_ = kSafetyFactor * C2_ + kTableFloor;
}

Evaluation ExtendedMap::evaluate(const ModelPoint& x_in) const {
  const ModelPoint x = X_.canonical(x_in);
  const auto key = point_key(x);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const auto pre = preimage_triangles(*pi_x_, x, config_.R);
  if (pre.empty()) throw StratumFailure("empty preimage: R is too small for this query");
  std::vector<ModelPoint> cloud;
  cloud.reserve(pre.size());
  for (const auto& e : pre) cloud.push_back((*pi_y_)(map_triangle(f_, e.triangle)));
  Evaluation ev;
  ev.x = x;
  ev.h = enclosing_ball(Y_, cloud).center;
  ev.pi_diameter = morselab::cloud_diameter(Y_, cloud);
  ev.triangle_count = pre.size();
  std::lock_guard lock(mutex_);
  return cache_.try_emplace(key, ev).first->second;
}

ExtendedMap ExtendedMap::quasi_inverse() const {
  ExtendedMapConfig c = config_;
  std::swap(c.D, c.D_prime);
  c.R = std::max(config_.R, M_);
  return ExtendedMap(Y_, X_, f_.inverse(), c);
}

namespace {

ModelPoint random_tree_point(const MetricTree& tree, Rng& rng) {
  double total = 0.0;
  for (const auto& e : tree.edges()) total += e.length;
  double pick = rng.uniform(0.0, total);
  for (const auto& e : tree.edges()) {
    if (pick <= e.length) return ModelPoint::edge(e.u, e.v, pick);
    pick -= e.length;
  }
  const auto& e = tree.edges().back();
  return ModelPoint::edge(e.u, e.v, e.length);
}

}  // namespace

std::vector<ModelPoint> grid_queries(const ModelSpace& space, PlanePoint center, double radius, int per_side) {
  std::vector<ModelPoint> out;
  if (space.is_tree()) {
    const auto& tree = space.tree();
    for (std::size_t v = 0; v < tree.vertex_count(); ++v) out.push_back(ModelPoint::vertex(tree.id(static_cast<int>(v))));
    for (const auto& e : tree.edges()) out.push_back(space.canonical(ModelPoint::edge(e.u, e.v, 0.5 * e.length)));
    return out;
  }
  if (per_side < 1) throw InvalidInput("grid needs at least one point per side");
  for (int i = 0; i < per_side; ++i) {
    for (int j = 0; j < per_side; ++j) {
      const double fx = per_side == 1 ? 0.5 : static_cast<double>(i) / (per_side - 1);
      const double fy = per_side == 1 ? 0.5 : static_cast<double>(j) / (per_side - 1);
      out.push_back(ModelPoint::plane(center.x - radius + 2.0 * radius * fx, center.y - radius + 2.0 * radius * fy));
    }
  }
  return out;
}

std::vector<ModelPoint> random_queries(const ModelSpace& space, PlanePoint center, double radius, std::size_t count,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ModelPoint> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (space.is_tree()) {
      out.push_back(space.canonical(random_tree_point(space.tree(), rng)));
    } else {
      const double x = rng.uniform(center.x - radius, center.x + radius);
      const double y = rng.uniform(center.y - radius, center.y + radius);
      out.push_back(ModelPoint::plane(x, y));
    }
  }
  return out;
}

std::vector<std::pair<ModelPoint, ModelPoint>> sample_pairs(const ModelSpace& space, PlanePoint center,
                                                           double radius, std::size_t count, std::uint64_t seed) {
  const auto pts = random_queries(space, center, radius, 2 * count, seed);
  std::vector<std::pair<ModelPoint, ModelPoint>> out;
  for (std::size_t i = 0; i < count; ++i) out.emplace_back(pts[2 * i], pts[2 * i + 1]);
  return out;
}

LinearBound fit_linear_upper(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("fit needs equally many x and y values");
  if (x.empty()) return {};
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i) pts.emplace_back(x[i], y[i]);
  std::sort(pts.begin(), pts.end());
  // Upper hull; its edge slopes are the breakpoints of eps(lambda).
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : pts) {
    while (!hull.empty() && hull.back().first == p.first) hull.pop_back();
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      if ((b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first) >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  std::vector<double> lambdas{0.0};
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    const double s = (hull[i + 1].second - hull[i].second) / (hull[i + 1].first - hull[i].first);
    if (s > 0.0) lambdas.push_back(s);
  }
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  auto eps_of = [&](double lambda) {
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, y[i] - lambda * x[i]);
    return e;
  };
  LinearBound best{0.0, eps_of(0.0)};
  double best_obj = best.eps;
  for (double l : lambdas) {
    const double e = eps_of(l);
    const double obj = l * mean + e;
    if (obj < best_obj) {
      best_obj = obj;
      best = {l, e};
    }
  }
  for (bool ok = false; !ok;) {
    ok = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (y[i] > best.lambda * x[i] + best.eps) {
        best.eps = std::nextafter(best.eps, kInf);
        ok = false;
        break;
      }
    }
  }
  return best;
}

QIResult qi_probe(const ExtendedMap& h, const std::vector<std::pair<ModelPoint, ModelPoint>>& pairs) {
  QIResult r;
  double worst = -kInf;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    const double din = distance(h.X(), h.X().canonical(x), h.X().canonical(y));
    const double dout = distance(h.Y(), h(x), h(y));
    r.d_in.push_back(din);
    r.d_out.push_back(dout);
    if (dout - din > worst) {
      worst = dout - din;
      r.worst_index = i;
    }
  }
  r.upper = fit_linear_upper(r.d_in, r.d_out);
  r.lower = fit_linear_upper(r.d_out, r.d_in);
  return r;
}

QuasiInverseResult quasi_inverse_probe(const ExtendedMap& hXY, const ExtendedMap& hYX,
                                       std::span<const ModelPoint> xs, std::span<const ModelPoint> ys) {
  QuasiInverseResult r;
  for (const auto& x : xs)
    r.max_displacement_XX = std::max(r.max_displacement_XX, distance(hXY.X(), hXY.X().canonical(x), hYX(hXY(x))));
  for (const auto& y : ys)
    r.max_displacement_YY = std::max(r.max_displacement_YY, distance(hYX.X(), hYX.X().canonical(y), hXY(hYX(y))));
  return r;
}

BoundaryAgreement boundary_agreement_probe(const ExtendedMap& h, const BoundaryPoint& p,
                                           const std::vector<double>& heights) {
  h.X().validate(p);
  if (heights.empty()) throw InvalidInput("boundary agreement needs at least one height");
  for (std::size_t i = 0; i + 1 < heights.size(); ++i)
    if (!(heights[i] < heights[i + 1])) throw InvalidInput("heights must be increasing");
  const ModelPoint x0 = h.X().canonical(h.X().attachment(p));
  const ModelPoint hx0 = h(x0);
  const auto target = geodesic(h.Y(), hx0, h.f()(p));
  BoundaryAgreement r;
  r.heights = heights;
  for (double t : heights) {
    if (t < 0.0) throw InvalidInput("heights must be non-negative");
    const ModelPoint xt = h.X().canonical(ModelPoint::ray(p.m, p.n, t));
    r.deviations.push_back(project_point(h.Y(), target, h(xt)).distance);
  }
  r.verdict = growth_verdict(r.deviations);
  return r;
}

double lipschitz_at_scale(const ExtendedMap& h, const std::vector<std::pair<ModelPoint, ModelPoint>>& pairs,
                          double L) {
  double best = 0.0;
  for (const auto& [x, y] : pairs) {
    if (distance(h.X(), h.X().canonical(x), h.X().canonical(y)) > L) continue;
    best = std::max(best, distance(h.Y(), h(x), h(y)));
  }
  return best;
}

}  // namespace morselab
