// Compiled with -mavx2. Only reached after a runtime CPU check.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>
#include <limits>

namespace morselab::kernels {
namespace {

inline __m256d clamp01(__m256d s) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  s = _mm256_blendv_pd(s, zero, _mm256_cmp_pd(s, zero, _CMP_LT_OQ));
  s = _mm256_blendv_pd(s, one, _mm256_cmp_pd(s, one, _CMP_GT_OQ));
  return s;
}

// Shared body: returns clamped s and the residual length for 4 lanes.
inline void project4(const double* xs, const double* ys, const Segment& seg, const SegmentFrame& f, __m256d& s,
                     __m256d& d) {
  const __m256d px = _mm256_sub_pd(_mm256_loadu_pd(xs), _mm256_set1_pd(seg.ax));
  const __m256d py = _mm256_sub_pd(_mm256_loadu_pd(ys), _mm256_set1_pd(seg.ay));
  const __m256d ux = _mm256_set1_pd(f.ux);
  const __m256d uy = _mm256_set1_pd(f.uy);
  const __m256d dot = _mm256_add_pd(_mm256_mul_pd(px, ux), _mm256_mul_pd(py, uy));
  s = clamp01(_mm256_mul_pd(dot, _mm256_set1_pd(f.inv_len2)));
  const __m256d rx = _mm256_sub_pd(px, _mm256_mul_pd(s, ux));
  const __m256d ry = _mm256_sub_pd(py, _mm256_mul_pd(s, uy));
  d = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(rx, rx), _mm256_mul_pd(ry, ry)));
}

void project_avx2(const double* xs, const double* ys, std::size_t n, const Segment& seg, double* params,
                  double* dists) {
  const SegmentFrame f = make_frame(seg);
  const __m256d len = _mm256_set1_pd(f.len);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s, d;
    project4(xs + i, ys + i, seg, f, s, d);
    _mm256_storeu_pd(params + i, _mm256_mul_pd(s, len));
    _mm256_storeu_pd(dists + i, d);
  }
  detail::project_tail(xs + i, ys + i, n - i, seg, params + i, dists + i);
}

void distance_avx2(const double* xs, const double* ys, std::size_t n, const Segment& seg, double* dists,
                   bool accumulate) {
  const SegmentFrame f = make_frame(seg);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s, d;
    project4(xs + i, ys + i, seg, f, s, d);
    if (accumulate) {
      const __m256d old = _mm256_loadu_pd(dists + i);
      d = _mm256_blendv_pd(old, d, _mm256_cmp_pd(d, old, _CMP_LT_OQ));
    }
    _mm256_storeu_pd(dists + i, d);
  }
  detail::distance_tail(xs + i, ys + i, n - i, seg, dists + i, accumulate);
}

double max_weighted_avx2(const double* xs, const double* ys, const double* weights, std::size_t n, double cx,
                         double cy) {
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  __m256d best = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vcy);
    __m256d d = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
    if (weights != nullptr) d = _mm256_add_pd(d, _mm256_loadu_pd(weights + i));
    best = _mm256_blendv_pd(best, d, _mm256_cmp_pd(d, best, _CMP_GT_OQ));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double r = detail::max_weighted_tail(xs + i, ys + i, weights ? weights + i : nullptr, n - i, cx, cy);
  for (double v : lanes) r = v > r ? v : r;
  return r;
}

MinMax min_max_avx2(const double* v, std::size_t n) {
  __m256d lo = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d hi = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    lo = _mm256_blendv_pd(lo, x, _mm256_cmp_pd(x, lo, _CMP_LT_OQ));
    hi = _mm256_blendv_pd(hi, x, _mm256_cmp_pd(x, hi, _CMP_GT_OQ));
  }
  alignas(32) double l[4], h[4];
  _mm256_store_pd(l, lo);
  _mm256_store_pd(h, hi);
  MinMax r = detail::min_max_tail(v + i, n - i);
  for (int k = 0; k < 4; ++k) {
    r.lo = l[k] < r.lo ? l[k] : r.lo;
    r.hi = h[k] > r.hi ? h[k] : r.hi;
  }
  return r;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", &project_avx2, &distance_avx2, &max_weighted_avx2, &min_max_avx2};
  return table;
}

}  // namespace morselab::kernels
