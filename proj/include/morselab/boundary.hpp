#pragma once

// Boundary maps, strata of boundary tuples, the signed cross-ratio and the
// window probes for 2-stability and the quasi-mobius property.

#include <array>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "morselab/contracting.hpp"
#include "morselab/model_space.hpp"

namespace morselab {

class BoundaryMap {
 public:
  static BoundaryMap identity();
  static BoundaryMap translation(std::int64_t dx, std::int64_t dy);
  // r_{m,0} <-> r_{-m,0}, every other ray fixed.
  static BoundaryMap paper_swap();
  // Listed sources go to listed targets, everything else is fixed. The
  // sources must be distinct and form the same set as the targets.
  static BoundaryMap table(const std::vector<std::pair<BoundaryPoint, BoundaryPoint>>& pairs);
  static BoundaryMap from_json(const nlohmann::json& j);

  nlohmann::json to_json() const;
  const std::string& label() const { return label_; }

  BoundaryPoint operator()(const BoundaryPoint& b) const;
  BoundaryPoint inverse_of(const BoundaryPoint& b) const;
  BoundaryMap inverse() const;

  // Throws InvalidInput when the map is not defined on the space
  // (translations and the swap live on the lattice-ray plane).
  void check_space(const ModelSpace& space) const;

  bool is_translation() const { return kind_ == Kind::Translation || kind_ == Kind::Identity; }
  std::int64_t dx() const { return dx_; }
  std::int64_t dy() const { return dy_; }

 private:
  enum class Kind { Identity, Translation, Swap, Table };
  Kind kind_ = Kind::Identity;
  std::int64_t dx_ = 0, dy_ = 0;
  std::map<BoundaryPoint, BoundaryPoint> forward_, backward_;
  std::string label_ = "identity";
};

// Largest pairwise contracting constant of a tuple of boundary points.
double tuple_constant(const ModelSpace& space, const std::vector<BoundaryPoint>& points);

struct StratumTuple {
  std::vector<BoundaryPoint> points;
  double D = 0.0;
  std::vector<double> constants;  // pairs (0,1), (0,2), ..., (n-2,n-1)
};

struct StratumCheck {
  bool member = false;
  std::optional<StratumTuple> tuple;
  // First pair whose constant exceeds D.
  std::optional<std::pair<BoundaryPoint, BoundaryPoint>> counterexample;
  double counterexample_constant = 0.0;
};

// D = +inf is accepted as "no restriction". Throws InvalidInput on
// duplicate points.
StratumCheck in_stratum(const ModelSpace& space, const std::vector<BoundaryPoint>& points, double D);

struct CrossRatio {
  double value = 0.0;
  std::array<BoundaryPoint, 4> points;
  double D = 0.0;      // tuple constant
  double slack = 0.0;  // 6 * delta(D); +inf when D is beyond the tables
};

// [a,b,c,d] = t(d) - t(b) with t the projection parameter on the geodesic
// (a,c): positive when (pi(b), pi(d)) runs along (a,c).
CrossRatio cross_ratio(const ModelSpace& space, const BoundaryPoint& a, const BoundaryPoint& b,
                       const BoundaryPoint& c, const BoundaryPoint& d);
// Value only, without the slack lookup.
double cross_ratio_value(const ModelSpace& space, const BoundaryPoint& a, const BoundaryPoint& b,
                         const BoundaryPoint& c, const BoundaryPoint& d);

enum class Verdict { CertifiedBounded, Violation, Inconclusive };
std::string to_string(Verdict v);

// Ratio test on per-window maxima at windows W, 2W, 4W, ...: growth above
// 1.5x at every doubling is a violation, at none is certified-bounded.
Verdict growth_verdict(const std::vector<double>& maxima);

struct ProbeConfig {
  double D = 2.0;
  double window = 8.0;  // half-width of the first lattice box / tree depth
  int doublings = 2;
  std::size_t sample_count = 100000;
  std::uint64_t seed = 1;
};

struct PairRecord {
  double window = 0.0;
  BoundaryPoint a, b;
  double constant_in = 0.0;
  double constant_out = 0.0;
};

struct TwoStableResult {
  std::vector<double> windows;
  std::vector<double> window_max;  // largest image constant per window
  std::vector<PairRecord> witnesses;  // worst pair per window
  std::vector<PairRecord> scatter;
  double D_prime_estimate = 0.0;
  PairRecord worst_pair;
  Verdict verdict = Verdict::Inconclusive;
};

TwoStableResult two_stable_probe(const ModelSpace& X, const ModelSpace& Y, const BoundaryMap& f,
                                 const ProbeConfig& config);

struct CrossRatioSample {
  double window = 0.0;
  std::size_t index = 0;
  std::array<BoundaryPoint, 4> tuple;
  double cr_in = 0.0;   // |[a,b,c,d]|
  double cr_out = 0.0;  // |[f a, f b, f c, f d]|
  double slack = 0.0;   // slack of the input cross-ratio
};

struct QuasiMobiusResult {
  std::vector<CrossRatioSample> scatter;
  std::vector<std::pair<double, double>> envelope;  // (t, psi(t)) steps
  std::vector<double> windows;
  std::vector<double> window_max;
  bool identity = false;  // every output equals its input within 1e-9
  Verdict verdict = Verdict::Inconclusive;
  std::vector<CrossRatioSample> witnesses;  // worst sample per window
};

QuasiMobiusResult quasi_mobius_probe(const ModelSpace& X, const ModelSpace& Y, const BoundaryMap& f,
                                     const ProbeConfig& config);

// Least non-decreasing step function above the scatter: sorted by cr_in,
// running maximum of cr_out.
std::vector<std::pair<double, double>> monotone_envelope(const std::vector<CrossRatioSample>& scatter);

// Lattice points o != 0 with |o| <= D.
std::vector<BoundaryPoint> lattice_offsets(double D);

}  // namespace morselab
