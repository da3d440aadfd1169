#include "morselab/enclosing_ball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "morselab/kernels.hpp"
#include "morselab/random.hpp"

namespace morselab::geom {
namespace {

double cross(const PlanePoint& o, const PlanePoint& a, const PlanePoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool inside(const Circle& c, const PlanePoint& p) {
  return std::hypot(p.x - c.x, p.y - c.y) <= c.r * (1.0 + 1e-12) + 1e-12;
}

Circle from2(const PlanePoint& a, const PlanePoint& b) {
  const double x = 0.5 * (a.x + b.x), y = 0.5 * (a.y + b.y);
  return {x, y, 0.5 * std::hypot(a.x - b.x, a.y - b.y)};
}

Circle from3(const PlanePoint& a, const PlanePoint& b, const PlanePoint& c) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  if (d == 0.0) {
    // Collinear: the two farthest points span the circle.
    Circle best = from2(a, b);
    for (const Circle& k : {from2(a, c), from2(b, c)})
      if (k.r > best.r) best = k;
    return best;
  }
  const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const double ux = (cy * b2 - by * c2) / d;
  const double uy = (bx * c2 - cx * b2) / d;
  return {a.x + ux, a.y + uy, std::hypot(ux, uy)};
}

}  // namespace

std::vector<PlanePoint> convex_hull(std::vector<PlanePoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const PlanePoint& a, const PlanePoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<PlanePoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

Circle min_enclosing_circle(std::span<const PlanePoint> input) {
  if (input.empty()) throw InvalidInput("enclosing ball of an empty cloud");
  std::vector<PlanePoint> p = convex_hull({input.begin(), input.end()});
  Rng rng(0x9e3779b97f4a7c15ULL);
  for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[rng.index(i)]);

  Circle c{p[0].x, p[0].y, 0.0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (inside(c, p[i])) continue;
    c = {p[i].x, p[i].y, 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (inside(c, p[j])) continue;
      c = from2(p[i], p[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (!inside(c, p[k])) c = from3(p[i], p[j], p[k]);
    }
  }
  return c;
}

WeightedCenter min_weighted_center(std::span<const double> xs, std::span<const double> ys,
                                   std::span<const double> weights) {
  if (xs.empty()) throw InvalidInput("enclosing ball of an empty cloud");
  double x_lo = *std::min_element(xs.begin(), xs.end()), x_hi = *std::max_element(xs.begin(), xs.end());
  double y_lo = *std::min_element(ys.begin(), ys.end()), y_hi = *std::max_element(ys.begin(), ys.end());
  const auto& k = kernels::active();
  const double* w = weights.empty() ? nullptr : weights.data();
  auto F = [&](double x, double y) { return k.max_weighted_distance(xs.data(), ys.data(), w, xs.size(), x, y); };

  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  const double tol = 1e-11 * (1.0 + std::max({std::abs(x_lo), std::abs(x_hi), std::abs(y_lo), std::abs(y_hi)}));
  auto inner = [&](double x, double& best_y) {
    double a = y_lo, b = y_hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = F(x, c), fd = F(x, d);
    while (b - a > tol) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = F(x, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = F(x, d);
      }
    }
    best_y = 0.5 * (a + b);
    return F(x, best_y);
  };
  double a = x_lo, b = x_hi, yc = 0.0, yd = 0.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = inner(c, yc), fd = inner(d, yd);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      yd = yc;
      c = b - g * (b - a);
      fc = inner(c, yc);
    } else {
      a = c;
      c = d;
      fc = fd;
      yc = yd;
      d = a + g * (b - a);
      fd = inner(d, yd);
    }
  }
  WeightedCenter out;
  out.x = 0.5 * (a + b);
  out.value = inner(out.x, out.y);
  return out;
}

}  // namespace morselab::geom
