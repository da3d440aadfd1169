#include "morselab/kernels.hpp"
#include "kernels_impl.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <cstring>

namespace morselab::kernels {
namespace {

bool env_forces_scalar() {
  const char* v = std::getenv("MORSELAB_SCALAR");
  return v != nullptr && std::strcmp(v, "0") != 0 && v[0] != '\0';
}

std::atomic<bool>& scalar_override() {
  static std::atomic<bool> flag{env_forces_scalar()};
  return flag;
}

}  // namespace

const KernelTable* avx2() {
#if defined(__x86_64__) && defined(MORSELAB_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  if (!scalar_override().load(std::memory_order_relaxed)) {
    if (const KernelTable* t = avx2()) return *t;
  }
  return scalar();
}

void force_scalar(bool on) { scalar_override().store(on, std::memory_order_relaxed); }

void project_onto_segment(std::span<const double> xs, std::span<const double> ys, const Segment& seg,
                          std::span<double> params, std::span<double> dists) {
  assert(xs.size() == ys.size() && params.size() >= xs.size() && dists.size() >= xs.size());
  active().project_onto_segment(xs.data(), ys.data(), xs.size(), seg, params.data(), dists.data());
}

void distance_to_segment(std::span<const double> xs, std::span<const double> ys, const Segment& seg,
                         std::span<double> dists, bool accumulate) {
  assert(xs.size() == ys.size() && dists.size() >= xs.size());
  active().distance_to_segment(xs.data(), ys.data(), xs.size(), seg, dists.data(), accumulate);
}

double max_weighted_distance(std::span<const double> xs, std::span<const double> ys,
                             std::span<const double> weights, double cx, double cy) {
  assert(xs.size() == ys.size() && (weights.empty() || weights.size() == xs.size()));
  return active().max_weighted_distance(xs.data(), ys.data(), weights.empty() ? nullptr : weights.data(),
                                        xs.size(), cx, cy);
}

MinMax min_max(std::span<const double> values) { return active().min_max(values.data(), values.size()); }

}  // namespace morselab::kernels
