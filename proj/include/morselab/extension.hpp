#pragma once

// Extending a boundary map to the spaces: E_K sets of boundary triangles,
// their barycenters, preimages of balls under the barycenter map, and the
// extension h(x) = barycenter of { pi_Y(f(T)) : pi_X(T) in B(x, R) }, with
// the probes that check h against the expected coarse behaviour.

#include <array>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "morselab/boundary.hpp"
#include "morselab/model_space.hpp"

namespace morselab {

using Triangle = std::array<BoundaryPoint, 3>;

struct Ball {
  ModelPoint center;
  double radius = 0.0;
};

// Minimum enclosing ball in the space metric. Throws InvalidInput on an
// empty cloud.
Ball enclosing_ball(const ModelSpace& space, std::span<const ModelPoint> cloud);
inline ModelPoint barycenter(const ModelSpace& space, std::span<const ModelPoint> cloud) {
  return enclosing_ball(space, cloud).center;
}
double cloud_diameter(const ModelSpace& space, std::span<const ModelPoint> cloud);

ModelPoint translate(const ModelPoint& p, std::int64_t dx, std::int64_t dy);

struct EKSet {
  Triangle triangle;
  double K = 0.0;
  double pitch = 0.0;
  std::vector<ModelPoint> samples;
  Ball ball;  // minimum enclosing ball of the samples
  double diameter = 0.0;
};

// Points within K of all three sides of the triangle, sampled on a grid.
// grid_pitch = 0 picks K/16 and re-checks at K/32 (the barycenter must move
// by less than K/8; the finer cloud is returned). Throws InvariantViolation
// when a side projection of the opposite vertex is not a member.
EKSet ek_set(const ModelSpace& space, const Triangle& triangle, double K, double grid_pitch = 0.0);

// Canonical D-triangles of the lattice-ray plane up to translation: sorted
// vertices, the first one at the origin.
std::vector<Triangle> lattice_shapes(double D);

// pi(T) = barycenter of E_K(T) with K = B_D + delta_D from the tables (D is
// rounded up to the table grid). Translation-equivariant by construction:
// one E_K set per triangle shape. Safe for concurrent use.
class BarycenterMap {
 public:
  BarycenterMap(const ModelSpace& space, double D);

  const ModelSpace& space() const { return space_; }
  double D() const { return D_; }
  double K() const { return K_; }

  // Throws StratumFailure when T is not a D-triangle.
  ModelPoint operator()(const Triangle& T) const;
  // Diameter of the E_K cloud behind pi(T).
  double cloud_diameter(const Triangle& T) const;

  // Shared instance per (space, grid value of D).
  static std::shared_ptr<BarycenterMap> shared(const ModelSpace& space, double D);

 private:
  struct Shape {
    ModelPoint barycenter;
    double diameter = 0.0;
  };
  const Shape& shape(const Triangle& T, std::int64_t& dx, std::int64_t& dy) const;

  ModelSpace space_;
  double D_ = 0.0;
  double K_ = 0.0;
  mutable std::mutex mutex_;
  mutable std::map<std::array<std::int64_t, 6>, std::unique_ptr<Shape>> shapes_;
};

ModelPoint pi_triangle(const ModelSpace& space, const Triangle& T, double D);

struct FlipResult {
  int which = 0;  // 0: [a,b,c,d], 1: [a,c,b,d], 2: [a,c,d,b]
  double value = 0.0;
  std::array<double, 3> magnitudes{};
  double bound = 0.0;  // C1 table entry
};

// Throws StratumFailure when the tuple is not in the D-stratum and
// InvariantViolation when the smallest magnitude exceeds C1.
FlipResult small_flip_select(const ModelSpace& space, const std::array<BoundaryPoint, 4>& tuple, double D);

struct PreimageEntry {
  Triangle triangle;
  ModelPoint barycenter;
};

// D-triangles T with pi(T) in B(x, R): every lattice translate of every
// shape in the lattice-ray plane, every leaf triangle in a tree.
std::vector<PreimageEntry> preimage_triangles(const BarycenterMap& pi, const ModelPoint& x, double R);

// Smallest R = 2^k (k >= 0) for which every query has a nonempty preimage.
double select_radius(const BarycenterMap& pi, std::span<const ModelPoint> queries);

struct Evaluation {
  ModelPoint x;
  ModelPoint h;
  double pi_diameter = 0.0;
  std::size_t triangle_count = 0;
};

struct ExtendedMapConfig {
  double D = 2.0;
  double D_prime = 2.0;
  double R = 1.0;
  std::uint64_t seed = 1;
  std::size_t expansion_pairs = 20000;  // sampled triangle pairs for M
};

class ExtendedMap {
 public:
  ExtendedMap(const ModelSpace& X, const ModelSpace& Y, const BoundaryMap& f, const ExtendedMapConfig& config);

  Evaluation evaluate(const ModelPoint& x) const;
  ModelPoint operator()(const ModelPoint& x) const { return evaluate(x).h; }

  const ModelSpace& X() const { return X_; }
  const ModelSpace& Y() const { return Y_; }
  const BoundaryMap& f() const { return f_; }
  const ExtendedMapConfig& config() const { return config_; }
  double R() const { return config_.R; }
  // 1.1 x the largest sampled d(pi_Y f T, pi_Y f T') over triangle pairs
  // with d(pi_X T, pi_X T') <= 2R.
  double M() const { return M_; }
  double C2_observed() const { return C2_; }

  // The extension of f^-1 with R' = max(R, M).
  ExtendedMap quasi_inverse() const;

 private:
  ModelSpace X_, Y_;
  BoundaryMap f_;
  ExtendedMapConfig config_;
  std::shared_ptr<BarycenterMap> pi_x_, pi_y_;
  double M_ = 0.0, C2_ = 0.0;
  mutable std::mutex mutex_;
  mutable std::map<std::array<double, 4>, Evaluation> cache_;
};

// Plane (or tree) query points: a per_side x per_side grid over the square of
// half-width `radius` around `center` in the plane; for trees, vertices and
// edge midpoints.
std::vector<ModelPoint> grid_queries(const ModelSpace& space, PlanePoint center, double radius, int per_side);

// Seeded random plane points in the square of half-width radius around center
// (uniform by length over edges for trees).
std::vector<ModelPoint> random_queries(const ModelSpace& space, PlanePoint center, double radius, std::size_t count,
                                       std::uint64_t seed);

struct LinearBound {
  double lambda = 0.0;
  double eps = 0.0;
};

// Least (lambda, eps) >= 0 with y_i <= lambda x_i + eps for every i,
// minimizing lambda * mean(x) + eps. The bound is re-checked in floating
// point and eps nudged up until it holds exactly.
LinearBound fit_linear_upper(std::span<const double> x, std::span<const double> y);

struct QIResult {
  LinearBound upper;  // d_Y(h x, h y) <= lambda d_X(x, y) + eps
  LinearBound lower;  // d_X(x, y) <= lambda d_Y(h x, h y) + eps
  std::size_t worst_index = 0;  // pair with the largest d_Y - d_X
  std::vector<double> d_in, d_out;
};

QIResult qi_probe(const ExtendedMap& h, const std::vector<std::pair<ModelPoint, ModelPoint>>& pairs);
std::vector<std::pair<ModelPoint, ModelPoint>> sample_pairs(const ModelSpace& space, PlanePoint center,
                                                           double radius, std::size_t count, std::uint64_t seed);

struct QuasiInverseResult {
  double max_displacement_XX = 0.0;  // max d(x, hYX(hXY(x)))
  double max_displacement_YY = 0.0;  // max d(y, hXY(hYX(y)))
};

QuasiInverseResult quasi_inverse_probe(const ExtendedMap& hXY, const ExtendedMap& hYX,
                                       std::span<const ModelPoint> xs, std::span<const ModelPoint> ys);

struct BoundaryAgreement {
  std::vector<double> heights;
  std::vector<double> deviations;
  Verdict verdict = Verdict::Inconclusive;
};

// x_t = point at height t on the ray of p; deviation = distance from h(x_t)
// to the geodesic from h(x_0) to f(p).
BoundaryAgreement boundary_agreement_probe(const ExtendedMap& h, const BoundaryPoint& p,
                                           const std::vector<double>& heights);

// max d(h x, h y) over pairs with d(x, y) <= L.
double lipschitz_at_scale(const ExtendedMap& h, const std::vector<std::pair<ModelPoint, ModelPoint>>& pairs,
                          double L);

}  // namespace morselab
