#pragma once

#include "morselab/kernels.hpp"

#include <cmath>

namespace morselab::kernels {

struct SegmentFrame {
  double ux, uy;      // b - a
  double inv_len2;    // 1 / |b - a|^2, or 0 for a degenerate segment
  double len;
};

inline SegmentFrame make_frame(const Segment& seg) {
  SegmentFrame f{};
  f.ux = seg.bx - seg.ax;
  f.uy = seg.by - seg.ay;
  const double len2 = f.ux * f.ux + f.uy * f.uy;
  f.inv_len2 = len2 > 0.0 ? 1.0 / len2 : 0.0;
  f.len = std::sqrt(len2);
  return f;
}

namespace detail {
// Scalar loops reused by the vector variants for their remainders.
void project_tail(const double* xs, const double* ys, std::size_t n, const Segment& seg, double* params,
                  double* dists);
void distance_tail(const double* xs, const double* ys, std::size_t n, const Segment& seg, double* dists,
                   bool accumulate);
double max_weighted_tail(const double* xs, const double* ys, const double* weights, std::size_t n, double cx,
                         double cy);
MinMax min_max_tail(const double* v, std::size_t n);
}  // namespace detail

#if defined(__x86_64__) && defined(MORSELAB_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace morselab::kernels
