#pragma once

// The swap example in the lattice-ray plane: alpha_n joins r_{n,0} to
// r_{n,1}; the swap f exchanges r_{n,0} and r_{-n,0}.

#include <vector>

namespace morselab {

struct ReproRow {
  int n = 0;
  double D_alpha = 0.0;       // exact constant of alpha_n
  double D_f_alpha = 0.0;     // exact constant of the geodesic between the images
  double cr_before = 0.0;     // |[r_{n,0}, r_{n+1,0}, r_{n,1}, r_{n+1,1}]|
  double cr_after = 0.0;      // the same tuple pushed through f
};

// Rows for n = 1..n_max. Throws InvalidInput for n_max < 1.
std::vector<ReproRow> repro_example(int n_max);

}  // namespace morselab
