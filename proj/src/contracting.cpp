#include "morselab/contracting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <numbers>

#include "morselab/kernels.hpp"
#include "morselab/random.hpp"

namespace morselab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PieceHit {
  double dist = kInf;
  double param = 0.0;
};

detail::Lifted lifted_attachment(const ModelSpace& space, std::int64_t m, std::int64_t n) {
  return detail::lift(space, space.attachment(BoundaryPoint{m, n}));
}

// Nearest point on one ray piece with heights [lo, hi] (hi may be inf).
// low_param / param_of map a height to the piece parameter.
template <typename ParamOf>
PieceHit nearest_on_ray(const ModelSpace& space, const detail::Lifted& p, std::int64_t m, std::int64_t n, double lo,
                        double hi, ParamOf param_of) {
  if (p.on_ray && p.m == m && p.n == n) {
    const double c = std::clamp(p.h, lo, hi);
    return {std::abs(p.h - c), param_of(c)};
  }
  const auto base = lifted_attachment(space, m, n);
  return {p.h + detail::base_distance(space, p, base) + lo, param_of(lo)};
}

PieceHit nearest_on_piece(const ModelSpace& space, const Piece& piece, const detail::Lifted& p) {
  return std::visit(
      [&](const auto& s) -> PieceHit {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PlaneSegmentPiece>) {
          const kernels::Segment seg{s.a.x, s.a.y, s.b.x, s.b.y};
          double param = 0.0, dist = 0.0;
          kernels::active().project_onto_segment(&p.plane.x, &p.plane.y, 1, seg, &param, &dist);
          return {p.h + dist, std::min(piece.t0 + param, piece.t1)};
        } else if constexpr (std::is_same_v<T, EdgeSegmentPiece>) {
          const auto& tree = space.tree();
          const double len = tree.edges()[static_cast<std::size_t>(s.edge)].length;
          const double lo = std::min(s.from_t, s.to_t);
          const double hi = std::max(s.from_t, s.to_t);
          if (p.tree_loc.vertex < 0 && p.tree_loc.edge == s.edge) {
            const double c = std::clamp(p.tree_loc.t, lo, hi);
            return {std::abs(p.tree_loc.t - c), piece.t0 + std::abs(c - s.from_t)};
          }
          const double du = tree.loc_to_vertex(p.tree_loc, tree.edge_u(s.edge));
          const double dv = tree.loc_to_vertex(p.tree_loc, tree.edge_v(s.edge));
          if (du + lo <= dv + (len - hi)) return {p.h + du + lo, piece.t0 + std::abs(lo - s.from_t)};
          return {p.h + dv + (len - hi), piece.t0 + std::abs(hi - s.from_t)};
        } else if constexpr (std::is_same_v<T, RaySegmentPiece>) {
          const double lo = std::min(s.from_h, s.to_h);
          const double hi = std::max(s.from_h, s.to_h);
          return nearest_on_ray(space, p, s.m, s.n, lo, hi,
                                [&](double h) { return piece.t0 + std::abs(h - s.from_h); });
        } else if constexpr (std::is_same_v<T, RayAscentPiece>) {
          return nearest_on_ray(space, p, s.m, s.n, s.from_h, kInf,
                                [&](double h) { return piece.t0 + (h - s.from_h); });
        } else if constexpr (std::is_same_v<T, RayDescentPiece>) {
          return nearest_on_ray(space, p, s.m, s.n, s.to_h, kInf,
                                [&](double h) { return piece.t1 - (h - s.to_h); });
        } else {
          const double px = p.plane.x - s.origin.x;
          const double py = p.plane.y - s.origin.y;
          const double t = px * s.dx + py * s.dy;
          const double rx = px - t * s.dx;
          const double ry = py - t * s.dy;
          return {std::sqrt(rx * rx + ry * ry), t};
        }
      },
      piece.shape);
}

ModelPoint middle_of_base(const ModelSpace& space, const GeodesicPath& gamma) {
  double lo = kInf, hi = -kInf;
  for (const auto& p : gamma.pieces()) {
    if (std::holds_alternative<LinePiece>(p.shape)) return gamma.point_at(space, 0.0);
    if (std::holds_alternative<PlaneSegmentPiece>(p.shape) || std::holds_alternative<EdgeSegmentPiece>(p.shape)) {
      lo = std::min(lo, p.t0);
      hi = std::max(hi, p.t1);
    }
  }
  if (lo > hi) {
    const double t = std::clamp(0.0, gamma.t_min(), gamma.t_max());
    return gamma.point_at(space, t);
  }
  return gamma.point_at(space, 0.5 * (lo + hi));
}

bool is_plane_based(const ModelSpace& space) { return !space.is_tree(); }

// Draws a ball center in the window.
ModelPoint draw_center(const ModelSpace& space, const detail::Lifted& window, double radius, Rng& rng) {
  if (space.is_tree()) {
    const auto& tree = space.tree();
    if (!tree.ray_leaves().empty() && rng.uniform() < 0.2) {
      const auto leaf = tree.ray_leaves()[rng.index(tree.ray_leaves().size())];
      return space.canonical(ModelPoint::ray(leaf, 0, rng.uniform(0.0, radius)));
    }
    double total = 0.0;
    for (const auto& e : tree.edges()) total += e.length;
    double pick = rng.uniform(0.0, total);
    for (const auto& e : tree.edges()) {
      if (pick <= e.length) return space.canonical(ModelPoint::edge(e.u, e.v, pick));
      pick -= e.length;
    }
    const auto& e = tree.edges().back();
    return space.canonical(ModelPoint::edge(e.u, e.v, e.length));
  }
  const double cx = window.plane.x, cy = window.plane.y;
  if (space.is_lattice() && rng.uniform() < 0.2) {
    const auto m = rng.integer(static_cast<std::int64_t>(std::ceil(cx - radius)),
                               static_cast<std::int64_t>(std::floor(cx + radius)));
    const auto n = rng.integer(static_cast<std::int64_t>(std::ceil(cy - radius)),
                               static_cast<std::int64_t>(std::floor(cy + radius)));
    return space.canonical(ModelPoint::ray(m, n, rng.uniform(0.0, radius)));
  }
  return ModelPoint::plane(rng.uniform(cx - radius, cx + radius), rng.uniform(cy - radius, cy + radius));
}

struct BallSamples {
  std::vector<double> xs, ys;        // plane-chart samples
  std::vector<ModelPoint> others;    // ray / tree samples
};

void sample_ball(const ModelSpace& space, const ModelPoint& center, double r, std::size_t count, Rng& rng,
                 BallSamples& out) {
  out.xs.clear();
  out.ys.clear();
  out.others.clear();
  const auto c = detail::lift(space, center);
  if (c.on_ray) {
    const double lo = std::max(c.h - r, 0.0);
    const double hi = c.h + r;
    constexpr int kSteps = 8;
    for (int k = 0; k <= kSteps; ++k)
      out.others.push_back(space.canonical(ModelPoint::ray(c.m, c.n, lo + (hi - lo) * k / kSteps)));
  }
  const double rb = r - c.h;
  if (rb <= 0.0) return;

  if (is_plane_based(space)) {
    const std::size_t ring = std::max<std::size_t>(count / 2, 4);
    const std::size_t inner = count > ring ? count - ring : 0;
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < ring; ++k) {
      const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(ring);
      out.xs.push_back(c.plane.x + rb * std::cos(a));
      out.ys.push_back(c.plane.y + rb * std::sin(a));
    }
    for (std::size_t k = 0; k < inner; ++k) {
      const double rad = rb * std::sqrt(rng.uniform());
      const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
      out.xs.push_back(c.plane.x + rad * std::cos(a));
      out.ys.push_back(c.plane.y + rad * std::sin(a));
    }
    if (space.is_lattice()) {
      // A few other rays poking out of the disc.
      const auto m_lo = static_cast<std::int64_t>(std::ceil(c.plane.x - rb));
      const auto m_hi = static_cast<std::int64_t>(std::floor(c.plane.x + rb));
      const auto n_lo = static_cast<std::int64_t>(std::ceil(c.plane.y - rb));
      const auto n_hi = static_cast<std::int64_t>(std::floor(c.plane.y + rb));
      if (m_lo <= m_hi && n_lo <= n_hi) {
        for (int k = 0; k < 8; ++k) {
          const auto m = rng.integer(m_lo, m_hi);
          const auto n = rng.integer(n_lo, n_hi);
          if (c.on_ray && m == c.m && n == c.n) continue;
          const double d = std::hypot(c.plane.x - static_cast<double>(m), c.plane.y - static_cast<double>(n));
          if (d >= rb) continue;
          out.others.push_back(space.canonical(ModelPoint::ray(m, n, (rb - d) * rng.uniform())));
        }
      }
    }
    return;
  }

  const auto& tree = space.tree();
  for (std::size_t e = 0; e < tree.edges().size(); ++e) {
    const auto& edge = tree.edges()[e];
    const double len = edge.length;
    std::vector<std::pair<double, double>> intervals;
    if (c.tree_loc.vertex < 0 && c.tree_loc.edge == static_cast<int>(e)) {
      intervals.emplace_back(std::max(0.0, c.tree_loc.t - rb), std::min(len, c.tree_loc.t + rb));
    } else {
      const double du = tree.loc_to_vertex(c.tree_loc, tree.edge_u(static_cast<int>(e)));
      const double dv = tree.loc_to_vertex(c.tree_loc, tree.edge_v(static_cast<int>(e)));
      if (rb - du >= 0.0) intervals.emplace_back(0.0, std::min(len, rb - du));
      if (rb - dv >= 0.0) intervals.emplace_back(std::max(0.0, len - (rb - dv)), len);
    }
    for (auto [lo, hi] : intervals) {
      for (double t : {lo, hi, rng.uniform(lo, hi), rng.uniform(lo, hi)})
        out.others.push_back(space.canonical(ModelPoint::edge(edge.u, edge.v, t)));
    }
  }
  for (auto leaf : tree.ray_leaves()) {
    if (c.on_ray && c.m == leaf) continue;
    const double d = tree.loc_to_vertex(c.tree_loc, tree.index_of(leaf));
    if (d < rb) out.others.push_back(space.canonical(ModelPoint::ray(leaf, 0, (rb - d) * rng.uniform())));
  }
}

}  // namespace

Foot project_point(const ModelSpace& space, const GeodesicPath& gamma, const ModelPoint& p) {
  const ModelPoint q = space.canonical(p);
  const auto lp = detail::lift(space, q);
  std::vector<PieceHit> hits;
  hits.reserve(gamma.pieces().size());
  PieceHit best;
  for (const auto& piece : gamma.pieces()) {
    hits.push_back(nearest_on_piece(space, piece, lp));
    if (hits.back().dist < best.dist) best = hits.back();
  }
  const double tie = best.dist * (1.0 + 1e-13) + 1e-13;
  for (const auto& h : hits) {
    if (h.dist <= tie && std::abs(h.param - best.param) > kGeomEps * (1.0 + std::abs(best.param)))
      throw InvariantViolation("nearest-point projection is not single-valued");
  }
  return Foot{best.param, gamma.point_at(space, best.param), best.dist};
}

void project_plane_points(const ModelSpace& space, const GeodesicPath& gamma, std::span<const double> xs,
                          std::span<const double> ys, std::span<double> params, std::span<double> dists) {
  if (space.is_tree()) throw InvalidInput("plane-chart projection requested in a metric tree");
  const std::size_t n = xs.size();
  std::fill(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(n), kInf);
  std::vector<double> p(n), d(n);
  const auto& k = kernels::active();
  for (const auto& piece : gamma.pieces()) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, PlaneSegmentPiece>) {
            k.project_onto_segment(xs.data(), ys.data(), n, {s.a.x, s.a.y, s.b.x, s.b.y}, p.data(), d.data());
            for (std::size_t i = 0; i < n; ++i) p[i] = std::min(p[i] + piece.t0, piece.t1);
          } else if constexpr (std::is_same_v<T, LinePiece>) {
            for (std::size_t i = 0; i < n; ++i) {
              const double px = xs[i] - s.origin.x, py = ys[i] - s.origin.y;
              const double t = px * s.dx + py * s.dy;
              const double rx = px - t * s.dx, ry = py - t * s.dy;
              p[i] = t;
              d[i] = std::sqrt(rx * rx + ry * ry);
            }
          } else if constexpr (std::is_same_v<T, EdgeSegmentPiece>) {
            throw InvalidInput("tree piece in a plane-based space");
          } else {
            double lo = 0.0, at = 0.0;
            if constexpr (std::is_same_v<T, RaySegmentPiece>) {
              lo = std::min(s.from_h, s.to_h);
              at = piece.t0 + std::abs(lo - s.from_h);
            } else if constexpr (std::is_same_v<T, RayAscentPiece>) {
              lo = s.from_h;
              at = piece.t0;
            } else {
              lo = s.to_h;
              at = piece.t1;
            }
            const double ax = static_cast<double>(s.m), ay = static_cast<double>(s.n);
            k.distance_to_segment(xs.data(), ys.data(), n, {ax, ay, ax, ay}, d.data(), false);
            for (std::size_t i = 0; i < n; ++i) {
              d[i] += lo;
              p[i] = at;
            }
          }
        },
        piece.shape);
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i] < dists[i]) {
        dists[i] = d[i];
        params[i] = p[i];
      }
    }
  }
}

double ProjectionSet::diameter() const {
  if (limit_points.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(limit_points.begin(), limit_points.end());
  return *hi - *lo;
}

namespace {

void reject_endpoint(const GeodesicPath& gamma, const BoundaryPoint& b) {
  for (const Endpoint* e : {&gamma.start(), &gamma.end()}) {
    if (const auto* eb = std::get_if<BoundaryPoint>(e); eb && *eb == b)
      throw InvalidInput("boundary point is an endpoint of the geodesic; its projection is not defined");
  }
}

ProjectionSet single(const BoundaryPoint& b, const Foot& f) {
  ProjectionSet s;
  s.source = b;
  s.limit_points = {f.param};
  s.barycenter_param = f.param;
  s.barycenter = f.point;
  return s;
}

}  // namespace

ProjectionSet project_boundary(const ModelSpace& space, const GeodesicPath& gamma, const BoundaryPoint& b) {
  space.validate(b);
  reject_endpoint(gamma, b);
  double top = 0.0;
  for (const auto& piece : gamma.pieces()) {
    if (const auto* s = std::get_if<RaySegmentPiece>(&piece.shape); s && s->m == b.m && s->n == b.n)
      top = std::max({top, s->from_h, s->to_h});
  }
  return single(b, project_point(space, gamma, ModelPoint::ray(b.m, b.n, top + 1.0)));
}

ProjectionSet project_boundary_sweep(const ModelSpace& space, const GeodesicPath& gamma, const BoundaryPoint& b) {
  space.validate(b);
  reject_endpoint(gamma, b);
  double h = 1.0;
  Foot prev = project_point(space, gamma, ModelPoint::ray(b.m, b.n, h));
  int stable = 0;
  for (int i = 0; i < 64 && stable < 2; ++i) {
    h *= 2.0;
    Foot next = project_point(space, gamma, ModelPoint::ray(b.m, b.n, h));
    stable = std::abs(next.param - prev.param) <= kGeomEps ? stable + 1 : 0;
    prev = next;
  }
  if (stable < 2) throw InvariantViolation("boundary projection did not stabilize");
  return single(b, prev);
}

Foot project_endpoint(const ModelSpace& space, const GeodesicPath& gamma, const Endpoint& e) {
  if (const auto* b = std::get_if<BoundaryPoint>(&e)) {
    const auto set = project_boundary(space, gamma, *b);
    return Foot{set.barycenter_param, set.barycenter, 0.0};
  }
  return project_point(space, gamma, std::get<ModelPoint>(e));
}

ContractingCertificate contracting_constant_exact(const ModelSpace& space, const GeodesicPath& gamma) {
  if (!space.is_lattice()) throw InvalidInput("exact contracting constants are available in the lattice-ray plane only");
  const auto ends = gamma.boundary_ends();
  if (!ends || !gamma.is_bi_infinite()) throw InvalidInput("exact contracting constant needs a bi-infinite geodesic");
  const auto [a, b] = *ends;
  const double dx = static_cast<double>(b.m - a.m);
  const double dy = static_cast<double>(b.n - a.n);
  const double D = std::sqrt(dx * dx + dy * dy);

  ContractingCertificate cert;
  cert.D = D;
  cert.mode = CertificateMode::Exact;
  // Disc beside the middle of the segment, radius just under its distance.
  const double ux = dx / D, uy = dy / D;
  const double r = 0.5 * D + 1.0;
  const double cx = static_cast<double>(a.m) + 0.5 * dx - r * uy;
  const double cy = static_cast<double>(a.n) + 0.5 * dy + r * ux;
  const double radius = r - kGeomEps;
  const std::array<double, 4> xs{cx + radius * ux, cx - radius * ux, cx + radius * uy, cx - radius * uy};
  const std::array<double, 4> ys{cy + radius * uy, cy - radius * uy, cy - radius * ux, cy + radius * ux};
  std::array<double, 4> params{}, dists{};
  project_plane_points(space, gamma, xs, ys, params, dists);
  cert.witness.center = ModelPoint::plane(cx, cy);
  cert.witness.radius = radius;
  cert.witness.param_lo = *std::min_element(params.begin(), params.end());
  cert.witness.param_hi = *std::max_element(params.begin(), params.end());
  cert.pair_constant = cert.witness.diameter();
  return cert;
}

ContractingCertificate contracting_constant_sampled(const ModelSpace& space, const GeodesicPath& gamma,
                                                    const SamplerConfig& config) {
  if (config.ball_count == 0 || config.samples_per_ball == 0 || !(config.window_radius > 0.0))
    throw InvalidInput("sampler needs a positive window, ball count and sample count");
  const ModelPoint wc = config.window_center ? space.canonical(*config.window_center) : middle_of_base(space, gamma);
  const auto window = detail::lift(space, wc);
  Rng rng(config.seed);

  ContractingCertificate cert;
  cert.mode = CertificateMode::Sampled;
  cert.sampler = config;
  cert.D = -1.0;
  BallSamples samples;
  std::vector<double> params, dists;
  for (std::size_t i = 0; i < config.ball_count; ++i) {
    const ModelPoint center = draw_center(space, window, config.window_radius, rng);
    const Foot cf = project_point(space, gamma, center);
    const double radius = cf.distance - kGeomEps;
    if (radius <= kGeomEps) continue;
    sample_ball(space, center, radius, config.samples_per_ball, rng, samples);

    double lo = cf.param, hi = cf.param, pair = 0.0;
    auto account = [&](double t) {
      lo = std::min(lo, t);
      hi = std::max(hi, t);
      pair = std::max(pair, std::abs(t - cf.param));
    };
    if (!samples.xs.empty()) {
      params.resize(samples.xs.size());
      dists.resize(samples.xs.size());
      project_plane_points(space, gamma, samples.xs, samples.ys, params, dists);
      const auto mm = kernels::min_max(params);
      account(mm.lo);
      account(mm.hi);
    }
    for (const auto& q : samples.others) account(project_point(space, gamma, q).param);

    ++cert.balls_used;
    cert.pair_constant = std::max(cert.pair_constant, pair);
    if (hi - lo > cert.D) {
      cert.D = hi - lo;
      cert.witness = BallWitness{center, radius, lo, hi};
    }
  }
  if (cert.balls_used == 0) throw InvalidInput("window too small to contain any ball disjoint from the geodesic");
  return cert;
}

ContractingCertificate certify_pair(const ModelSpace& space, const BoundaryPoint& a, const BoundaryPoint& b) {
  const auto g = geodesic(space, a, b);
  if (space.is_lattice()) return contracting_constant_exact(space, g);
  SamplerConfig cfg;
  double total = 0.0;
  for (const auto& e : space.tree().edges()) total += e.length;
  cfg.window_radius = total;
  cfg.ball_count = 256;
  cfg.samples_per_ball = 16;
  cfg.seed = 0x5eed;
  return contracting_constant_sampled(space, g, cfg);
}

double pair_constant(const ModelSpace& space, const BoundaryPoint& a, const BoundaryPoint& b) {
  if (space.is_lattice()) {
    const double dx = static_cast<double>(b.m - a.m);
    const double dy = static_cast<double>(b.n - a.n);
    return std::sqrt(dx * dx + dy * dy);
  }
  static std::mutex mutex;
  static std::map<std::tuple<std::string, BoundaryPoint, BoundaryPoint>, double> cache;
  auto key = std::make_tuple(space.key(), std::min(a, b), std::max(a, b));
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double D = certify_pair(space, std::get<1>(key), std::get<2>(key)).D;
  std::lock_guard lock(mutex);
  cache.emplace(std::move(key), D);
  return D;
}

std::vector<std::pair<double, ModelPoint>> sample_geodesic(const ModelSpace& space, const GeodesicPath& gamma,
                                                           std::size_t per_piece, double tail) {
  std::vector<std::pair<double, ModelPoint>> out;
  per_piece = std::max<std::size_t>(per_piece, 2);
  for (const auto& piece : gamma.pieces()) {
    double lo = piece.t0, hi = piece.t1;
    if (std::isinf(lo) && std::isinf(hi)) {
      lo = -tail;
      hi = tail;
    } else if (std::isinf(lo)) {
      lo = hi - tail;
    } else if (std::isinf(hi)) {
      hi = lo + tail;
    }
    for (std::size_t k = 0; k < per_piece; ++k) {
      const double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(per_piece - 1);
      out.emplace_back(t, gamma.point_at(space, std::clamp(t, piece.t0, piece.t1)));
    }
  }
  return out;
}

namespace {

bool endpoint_equal(const ModelSpace& space, const Endpoint& a, const Endpoint& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ba = std::get_if<BoundaryPoint>(&a)) return *ba == std::get<BoundaryPoint>(b);
  return same_point(space, std::get<ModelPoint>(a), std::get<ModelPoint>(b));
}

double finite_length(const GeodesicPath& g) {
  double total = 0.0;
  for (const auto& p : g.pieces())
    if (std::isfinite(p.length())) total += p.length();
  return total;
}

}  // namespace

SlimTriangleResult verify_slim_triangle(const ModelSpace& space, const Endpoint& a, const Endpoint& b,
                                        const Endpoint& c, double delta_candidate) {
  if (endpoint_equal(space, a, b) || endpoint_equal(space, b, c) || endpoint_equal(space, a, c))
    throw InvalidInput("degenerate triple: vertices must be distinct");
  const auto alpha = geodesic(space, a, c);
  const ModelPoint p = project_endpoint(space, alpha, b).point;
  const auto beta = geodesic(space, a, b);

  std::vector<GeodesicPath> sides;
  if (!endpoint_equal(space, a, Endpoint{p})) sides.push_back(geodesic(space, a, p));
  if (!endpoint_equal(space, b, Endpoint{p})) sides.push_back(geodesic(space, p, b));

  double extent = finite_length(beta) + finite_length(alpha);
  for (const auto& s : sides) extent += finite_length(s);
  SlimTriangleResult result;
  result.worst_point = p;
  for (const auto& [t, q] : sample_geodesic(space, beta, 257, 2.0 * extent + 4.0)) {
    double d = kInf;
    for (const auto& s : sides) d = std::min(d, project_point(space, s, q).distance);
    if (d > result.worst_violation) {
      result.worst_violation = d;
      result.worst_point = q;
    }
  }
  result.holds = result.worst_violation <= delta_candidate;
  return result;
}

BoundedImageResult verify_bounded_geodesic_image(const ModelSpace& space, const GeodesicPath& gamma,
                                                 const GeodesicPath& beta, double B_candidate) {
  const double tail = 2.0 * (finite_length(beta) + finite_length(gamma)) + 4.0 + std::max(B_candidate, 0.0);
  const auto samples = sample_geodesic(space, beta, 513, tail);
  double lo = kInf, hi = -kInf, best = kInf;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Foot f = project_point(space, gamma, samples[i].second);
    lo = std::min(lo, f.param);
    hi = std::max(hi, f.param);
    if (f.distance < best) {
      best = f.distance;
      best_i = i;
    }
  }
  // d(beta(t), gamma) is convex in t; refine around the best sample.
  const double t_lo = std::max(samples[best_i > 0 ? best_i - 1 : 0].first, beta.t_min());
  const double t_hi = std::min(samples[std::min(best_i + 1, samples.size() - 1)].first, beta.t_max());
  double x0 = std::min(t_lo, t_hi), x1 = std::max(t_lo, t_hi);
  auto f = [&](double t) { return project_point(space, gamma, beta.point_at(space, t)).distance; };
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100 && x1 - x0 > 1e-12; ++it) {
    const double m1 = x1 - g * (x1 - x0), m2 = x0 + g * (x1 - x0);
    if (f(m1) <= f(m2)) x1 = m2; else x0 = m1;
  }
  best = std::min(best, f(0.5 * (x0 + x1)));

  BoundedImageResult r;
  r.projection_diameter = hi - lo;
  r.min_distance = best;
  r.holds = r.projection_diameter <= B_candidate || r.min_distance < B_candidate;
  return r;
}

ContractingCertificate verify_contracting_triangles(const ModelSpace& space, const Endpoint& a, const Endpoint& b,
                                                    const Endpoint& c, double D_two_sides,
                                                    const SamplerConfig& config) {
  auto side_constant = [&](const Endpoint& x, const Endpoint& y) {
    const auto g = geodesic(space, x, y);
    if (space.is_lattice() && g.boundary_ends()) return contracting_constant_exact(space, g).D;
    SamplerConfig cfg = config;
    cfg.window_center.reset();
    return contracting_constant_sampled(space, g, cfg).D;
  };
  const double ab = side_constant(a, b);
  const double bc = side_constant(b, c);
  if (ab > D_two_sides + kGeomEps || bc > D_two_sides + kGeomEps)
    throw StratumFailure("triangle sides are not certified at the requested constant");
  SamplerConfig cfg = config;
  cfg.window_center.reset();
  return contracting_constant_sampled(space, geodesic(space, a, c), cfg);
}

}  // namespace morselab
