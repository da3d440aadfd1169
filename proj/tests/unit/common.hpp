#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "morselab/boundary.hpp"
#include "morselab/model_space.hpp"
#include "morselab/random.hpp"

namespace morselab::testing {

inline const ModelSpace& lattice() {
  static const ModelSpace s = ModelSpace::lattice_ray_plane();
  return s;
}

// Spine 0-1-2-3 with leaves 10..15; rays at every leaf.
inline const ModelSpace& tree() {
  static const ModelSpace s = ModelSpace::metric_tree({{0, 1, 1.0},
                                                       {1, 2, 2.0},
                                                       {2, 3, 1.5},
                                                       {0, 10, 1.0},
                                                       {0, 11, 0.5},
                                                       {1, 12, 1.25},
                                                       {2, 13, 0.75},
                                                       {3, 14, 1.0},
                                                       {3, 15, 2.0}});
  return s;
}

inline const ModelSpace& euclidean() {
  static const ModelSpace s = ModelSpace::euclidean_plane();
  return s;
}

inline ModelPoint random_lattice_point(Rng& rng, double w) {
  if (rng.uniform() < 0.3)
    return ModelPoint::ray(rng.integer(-static_cast<std::int64_t>(w), static_cast<std::int64_t>(w)),
                           rng.integer(-static_cast<std::int64_t>(w), static_cast<std::int64_t>(w)),
                           rng.uniform(0.0, w));
  return ModelPoint::plane(rng.uniform(-w, w), rng.uniform(-w, w));
}

inline ModelPoint random_tree_point(Rng& rng) {
  const auto& t = tree().tree();
  if (rng.uniform() < 0.3) {
    const auto& leaves = t.ray_leaves();
    return ModelPoint::ray(leaves[rng.index(leaves.size())], 0, rng.uniform(0.0, 5.0));
  }
  const auto& e = t.edges()[rng.index(t.edges().size())];
  return tree().canonical(ModelPoint::edge(e.u, e.v, rng.uniform(0.0, e.length)));
}

// Distinct lattice rays with every pairwise constant <= D.
template <std::size_t N>
std::array<BoundaryPoint, N> random_tuple(Rng& rng, double D) {
  const auto offsets = lattice_offsets(D);
  for (;;) {
    std::array<BoundaryPoint, N> t;
    t[0] = {rng.integer(-30, 30), rng.integer(-30, 30)};
    for (std::size_t i = 1; i < N; ++i) {
      const auto& o = offsets[rng.index(offsets.size())];
      t[i] = {t[0].m + o.m, t[0].n + o.n};
    }
    bool ok = true;
    for (std::size_t i = 0; i < N && ok; ++i)
      for (std::size_t j = i + 1; j < N && ok; ++j) {
        const double dx = static_cast<double>(t[i].m - t[j].m), dy = static_cast<double>(t[i].n - t[j].n);
        ok = t[i] != t[j] && std::sqrt(dx * dx + dy * dy) <= D;
      }
    if (ok) return t;
  }
}

inline double plane_dist(double ax, double ay, double bx, double by) { return std::hypot(ax - bx, ay - by); }

}  // namespace morselab::testing
