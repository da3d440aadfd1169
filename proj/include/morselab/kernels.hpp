#pragma once

// Batched plane-chart arithmetic. Every kernel has a scalar reference
// implementation and, on x86-64, an AVX2 variant chosen at runtime. Both
// variants evaluate the same expression tree without contraction, so their
// outputs are bitwise identical.

#include <cstddef>
#include <span>
#include <string_view>

namespace morselab::kernels {

struct Segment {
  double ax, ay, bx, by;
};

struct MinMax {
  double lo, hi;
};

struct KernelTable {
  std::string_view name;

  // params[i] = arc-length parameter (from a) of the Euclidean foot of
  // (xs[i], ys[i]) on the segment; dists[i] = distance to that foot.
  void (*project_onto_segment)(const double* xs, const double* ys, std::size_t n, const Segment& seg,
                               double* params, double* dists);

  // dists[i] = min(dists[i], distance from point i to seg) when accumulate,
  // otherwise plain assignment.
  void (*distance_to_segment)(const double* xs, const double* ys, std::size_t n, const Segment& seg,
                              double* dists, bool accumulate);

  // max_i (|p_i - c| + w_i); weights may be null.
  double (*max_weighted_distance)(const double* xs, const double* ys, const double* weights,
                                  std::size_t n, double cx, double cy);

  MinMax (*min_max)(const double* values, std::size_t n);
};

const KernelTable& scalar();

// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2();

// The table used by the library: AVX2 when available unless overridden.
const KernelTable& active();

// Forces the scalar path (used by equivalence tests and MORSELAB_SCALAR=1).
void force_scalar(bool on);

// Convenience span wrappers over active().
void project_onto_segment(std::span<const double> xs, std::span<const double> ys, const Segment& seg,
                          std::span<double> params, std::span<double> dists);
void distance_to_segment(std::span<const double> xs, std::span<const double> ys, const Segment& seg,
                         std::span<double> dists, bool accumulate = false);
double max_weighted_distance(std::span<const double> xs, std::span<const double> ys,
                             std::span<const double> weights, double cx, double cy);
MinMax min_max(std::span<const double> values);

}  // namespace morselab::kernels
