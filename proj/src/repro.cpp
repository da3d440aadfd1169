#include "morselab/repro.hpp"

#include <cmath>

#include "morselab/boundary.hpp"
#include "morselab/contracting.hpp"

namespace morselab {

std::vector<ReproRow> repro_example(int n_max) {
  if (n_max < 1) throw InvalidInput("n_max must be at least 1");
  const auto X = ModelSpace::lattice_ray_plane();
  const auto f = BoundaryMap::paper_swap();
  std::vector<ReproRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    const BoundaryPoint a{n, 0}, b{n + 1, 0}, c{n, 1}, d{n + 1, 1};
    ReproRow row;
    row.n = n;
    row.D_alpha = contracting_constant_exact(X, geodesic(X, a, c)).D;
    row.D_f_alpha = contracting_constant_exact(X, geodesic(X, f(a), f(c))).D;
    row.cr_before = std::abs(cross_ratio_value(X, a, b, c, d));
    row.cr_after = std::abs(cross_ratio_value(X, f(a), f(b), f(c), f(d)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace morselab
