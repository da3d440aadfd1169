#include "morselab/kernels.hpp"
#include "kernels_impl.hpp"

#include <cmath>
#include <limits>

namespace morselab::kernels {
namespace {

void project_scalar(const double* xs, const double* ys, std::size_t n, const Segment& seg, double* params,
                    double* dists) {
  const SegmentFrame f = make_frame(seg);
  for (std::size_t i = 0; i < n; ++i) {
    const double px = xs[i] - seg.ax;
    const double py = ys[i] - seg.ay;
    double s = (px * f.ux + py * f.uy) * f.inv_len2;
    s = s < 0.0 ? 0.0 : s;
    s = s > 1.0 ? 1.0 : s;
    const double rx = px - s * f.ux;
    const double ry = py - s * f.uy;
    params[i] = s * f.len;
    dists[i] = std::sqrt(rx * rx + ry * ry);
  }
}

void distance_scalar(const double* xs, const double* ys, std::size_t n, const Segment& seg, double* dists,
                     bool accumulate) {
  const SegmentFrame f = make_frame(seg);
  for (std::size_t i = 0; i < n; ++i) {
    const double px = xs[i] - seg.ax;
    const double py = ys[i] - seg.ay;
    double s = (px * f.ux + py * f.uy) * f.inv_len2;
    s = s < 0.0 ? 0.0 : s;
    s = s > 1.0 ? 1.0 : s;
    const double rx = px - s * f.ux;
    const double ry = py - s * f.uy;
    const double d = std::sqrt(rx * rx + ry * ry);
    dists[i] = accumulate ? (d < dists[i] ? d : dists[i]) : d;
  }
}

double max_weighted_scalar(const double* xs, const double* ys, const double* weights, std::size_t n, double cx,
                           double cy) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    double d = std::sqrt(dx * dx + dy * dy);
    if (weights != nullptr) d = d + weights[i];
    best = d > best ? d : best;
  }
  return best;
}

MinMax min_max_scalar(const double* v, std::size_t n) {
  MinMax r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    r.lo = v[i] < r.lo ? v[i] : r.lo;
    r.hi = v[i] > r.hi ? v[i] : r.hi;
  }
  return r;
}

}  // namespace

namespace detail {

void project_tail(const double* xs, const double* ys, std::size_t n, const Segment& seg, double* params,
                  double* dists) {
  project_scalar(xs, ys, n, seg, params, dists);
}

void distance_tail(const double* xs, const double* ys, std::size_t n, const Segment& seg, double* dists,
                   bool accumulate) {
  distance_scalar(xs, ys, n, seg, dists, accumulate);
}

double max_weighted_tail(const double* xs, const double* ys, const double* weights, std::size_t n, double cx,
                         double cy) {
  return max_weighted_scalar(xs, ys, weights, n, cx, cy);
}

MinMax min_max_tail(const double* v, std::size_t n) { return min_max_scalar(v, n); }

}  // namespace detail

const KernelTable& scalar() {
  static const KernelTable table{"scalar", &project_scalar, &distance_scalar, &max_weighted_scalar,
                                 &min_max_scalar};
  return table;
}

}  // namespace morselab::kernels
