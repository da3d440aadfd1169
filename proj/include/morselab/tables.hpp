#pragma once

// Constants that the construction only asserts to exist, estimated per model
// space by exhaustive sweeps over a grid of D values. Every stored value is
// 1.1 x the observed maximum plus 1e-9, so that exact zeros (trees) still give
// usable strict bounds. Entries are computed on first use; when
// MORSELAB_TABLES names a directory they are persisted there as JSON and
// reused across runs.

#include <array>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "morselab/model_space.hpp"

namespace morselab {

inline constexpr std::array<double, 9> kDGrid{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0};
inline constexpr double kSafetyFactor = 1.1;
inline constexpr double kTableFloor = 1e-9;

enum class Constant {
  Delta,         // slim triangles
  BoundedImage,  // bounded geodesic image
  Triangle,      // third side of a triangle with two D-contracting sides
  EKDiameter,    // diameter of E_K clouds, K = B + delta
  CentersC,      // |d(pi(a,b,c), pi(a,c,d)) - |[a,b,c,d]||
  FlipC1,        // smallest of the three flipped cross-ratios
};
std::string to_string(Constant c);

struct TableEntry {
  double value = 0.0;
  double observed = 0.0;
  double grid_D = 0.0;
  std::size_t configurations = 0;
  std::string method;
};

class ConstantsTable {
 public:
  // One table per space (keyed by ModelSpace::key()). Throws InvalidInput for
  // the Euclidean plane, which has no boundary.
  static ConstantsTable& for_space(const ModelSpace& space);

  // Smallest grid value >= D; throws InvalidInput beyond the grid.
  static double grid_value(double D);
  static bool in_range(double D) { return D <= kDGrid.back(); }

  const TableEntry& entry(Constant c, double D);
  double value(Constant c, double D) { return entry(c, D).value; }
  double delta(double D) { return value(Constant::Delta, D); }
  double bounded_image(double D) { return value(Constant::BoundedImage, D); }
  double triangle(double D) { return value(Constant::Triangle, D); }
  double K(double D) { return bounded_image(D) + delta(D); }
  double ek_diameter(double D) { return value(Constant::EKDiameter, D); }
  double centers_C(double D) { return value(Constant::CentersC, D); }
  double flip_C1(double D) { return value(Constant::FlipC1, D); }

  nlohmann::json to_json() const;
  const std::optional<std::filesystem::path>& path() const { return path_; }

  explicit ConstantsTable(const ModelSpace& space);

 private:
  TableEntry compute(Constant c, double grid_D);
  void load();
  void save() const;

  ModelSpace space_;
  std::optional<std::filesystem::path> path_;
  mutable std::recursive_mutex mutex_;
  std::map<std::pair<Constant, double>, TableEntry> entries_;
};

}  // namespace morselab
