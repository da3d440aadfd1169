#pragma once

// Minimum enclosing balls. Plane clouds get the exact Welzl circle; clouds in
// the lattice-ray plane with points up the rays reduce to a weighted problem
// on the plane (a ray point at height w over q is at distance |c - q| + w from
// any plane point c).

#include <span>
#include <vector>

#include "morselab/model_space.hpp"

namespace morselab::geom {

struct Circle {
  double x = 0.0, y = 0.0, r = 0.0;
};

// Andrew's monotone chain; counter-clockwise, no collinear points.
std::vector<PlanePoint> convex_hull(std::vector<PlanePoint> pts);

// Exact smallest enclosing circle. Deterministic: the input order is fixed
// by a seeded shuffle of the hull vertices.
Circle min_enclosing_circle(std::span<const PlanePoint> pts);

struct WeightedCenter {
  double x = 0.0, y = 0.0;
  double value = 0.0;  // max_i |c - p_i| + w_i
};

// argmin over plane points c of max_i (|c - p_i| + w_i), by nested
// golden-section search (the objective is convex).
WeightedCenter min_weighted_center(std::span<const double> xs, std::span<const double> ys,
                                   std::span<const double> weights);

}  // namespace morselab::geom
