// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "morselab/boundary.hpp"
#include "morselab/contracting.hpp"
#include "morselab/extension.hpp"
#include "morselab/random.hpp"
#include "morselab/repro.hpp"
#include "morselab/tables.hpp"

using namespace morselab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

const ModelSpace kLattice = ModelSpace::lattice_ray_plane();

// A small tree: spine 0-1-2-3 with leaves hanging off every spine vertex.
ModelSpace test_tree() {
  return ModelSpace::metric_tree({{0, 1, 1.0},
                                  {1, 2, 2.0},
                                  {2, 3, 1.5},
                                  {0, 10, 1.0},
                                  {0, 11, 0.5},
                                  {1, 12, 1.25},
                                  {2, 13, 0.75},
                                  {3, 14, 1.0},
                                  {3, 15, 2.0}});
}

BoundaryPoint random_point(Rng& rng, std::int64_t w) { return {rng.integer(-w, w), rng.integer(-w, w)}; }

// Random tuple of distinct lattice rays with every pairwise distance <= D.
template <std::size_t N>
std::array<BoundaryPoint, N> random_tuple(Rng& rng, double D) {
  const auto offsets = lattice_offsets(D);
  for (;;) {
    std::array<BoundaryPoint, N> t;
    t[0] = random_point(rng, 50);
    for (std::size_t i = 1; i < N; ++i) {
      const auto& o = offsets[rng.index(offsets.size())];
      t[i] = {t[0].m + o.m, t[0].n + o.n};
    }
    bool ok = true;
    for (std::size_t i = 0; i < N && ok; ++i)
      for (std::size_t j = i + 1; j < N && ok; ++j)
        ok = t[i] != t[j] && pair_constant(kLattice, t[i], t[j]) <= D;
    if (ok) return t;
  }
}

Outcome c1_example() {
  Outcome o;
  const auto rows = repro_example(10);
  for (const auto& r : rows) {
    const double want = std::sqrt(4.0 * r.n * r.n + 1.0);
    o.require(r.D_alpha == 1.0, "D(alpha_" + std::to_string(r.n) + ") != 1");
    o.require(std::abs(r.D_f_alpha - want) <= 1e-9, "D(f alpha_n) != sqrt(4n^2+1)");
    o.require(r.D_f_alpha > 2.0 * r.n, "D(f alpha_n) <= 2n");
  }
  o.detail << "n=1..10, D(f alpha_10)=" << rows.back().D_f_alpha;
  return o;
}

Outcome c2_cross_ratio() {
  Outcome o;
  const auto rows = repro_example(10);
  for (const auto& r : rows) {
    o.require(std::abs(r.cr_before - 1.0) <= 1e-9, "|cr| != 1 for n=" + std::to_string(r.n));
    o.require(r.cr_after > 2.0 * r.n - 1.0, "image |cr| <= 2n-1 for n=" + std::to_string(r.n));
  }
  o.detail << "image |cr| at n=10: " << rows.back().cr_after;
  return o;
}

Outcome c3_two_stable() {
  Outcome o;
  ProbeConfig cfg;
  cfg.D = 2.0;
  cfg.window = 8.0;
  cfg.doublings = 2;
  cfg.seed = 7;
  const auto r = two_stable_probe(kLattice, kLattice, BoundaryMap::paper_swap(), cfg);
  o.require(r.verdict == Verdict::Violation, "verdict is " + to_string(r.verdict));
  for (std::size_t k = 0; k + 1 < r.window_max.size(); ++k)
    o.require(r.window_max[k + 1] >= 1.5 * r.window_max[k], "growth below 1.5 at a doubling");
  o.detail << "image constants";
  for (std::size_t k = 0; k < r.windows.size(); ++k) o.detail << " W=" << r.windows[k] << ":" << r.window_max[k];
  return o;
}

Outcome c4_sampled_vs_exact() {
  Outcome o;
  Rng rng(404);
  double worst_ratio = 1.0;
  for (int i = 0; i < 20; ++i) {
    const BoundaryPoint a = random_point(rng, 20);
    BoundaryPoint b;
    do {
      b = {a.m + rng.integer(-8, 8), a.n + rng.integer(-8, 8)};
    } while (b == a || pair_constant(kLattice, a, b) > 8.0);
    const auto g = geodesic(kLattice, a, b);
    const double exact = contracting_constant_exact(kLattice, g).D;
    SamplerConfig cfg;
    cfg.ball_count = 10000;
    cfg.window_radius = 4.0 * exact;
    cfg.seed = 1000 + static_cast<std::uint64_t>(i);
    const double sampled = contracting_constant_sampled(kLattice, g, cfg).D;
    o.require(sampled >= 0.95 * exact && sampled <= exact + 1e-6, "sampled " + std::to_string(sampled) +
                                                                       " vs exact " + std::to_string(exact));
    worst_ratio = std::min(worst_ratio, sampled / exact);
  }
  o.detail << "worst sampled/exact = " << worst_ratio;
  return o;
}

Outcome c5_slim() {
  Outcome o;
  Rng rng(505);
  auto& tables = ConstantsTable::for_space(kLattice);
  double worst_margin = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto t = random_tuple<3>(rng, 4.0);
    const double D = tuple_constant(kLattice, {t.begin(), t.end()});
    const double delta = tables.delta(D);
    const auto r = verify_slim_triangle(kLattice, t[0], t[1], t[2], delta);
    o.require(r.holds, "slim triangle fails");
    worst_margin = std::max(worst_margin, r.worst_violation / delta);
  }
  const auto tree = test_tree();
  const auto& leaves = tree.tree().ray_leaves();
  std::size_t triples = 0;
  for (auto a : leaves)
    for (auto b : leaves)
      for (auto c : leaves) {
        if (a == b || b == c || a == c) continue;
        const auto r = verify_slim_triangle(tree, BoundaryPoint{a, 0}, BoundaryPoint{b, 0}, BoundaryPoint{c, 0}, 0.0);
        o.require(r.worst_violation == 0.0, "tree triple with nonzero violation");
        ++triples;
      }
  o.detail << "lattice worst violation / delta = " << worst_margin << "; " << triples << " tree triples at 0";
  return o;
}

Outcome c6_flips() {
  Outcome o;
  Rng rng(606);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto t = random_tuple<4>(rng, 4.0);
    const double D = tuple_constant(kLattice, {t.begin(), t.end()});
    try {
      const auto r = small_flip_select(kLattice, t, D);
      o.require(r.value <= r.bound, "flip above C1");
      worst = std::max(worst, r.value / r.bound);
    } catch (const Error& e) {
      o.require(false, e.what());
    }
  }
  o.detail << "worst flip / C1 = " << worst;
  return o;
}

Outcome c7_quasi_mobius() {
  Outcome o;
  ProbeConfig cfg;
  cfg.D = 3.0;
  cfg.window = 8.0;
  cfg.doublings = 2;
  cfg.sample_count = 2000;
  cfg.seed = 77;
  double excess = -1e300;
  for (const auto& f : {BoundaryMap::translation(3, -2), BoundaryMap::translation(-5, 1)}) {
    const auto r = quasi_mobius_probe(kLattice, kLattice, f, cfg);
    const auto& env = r.envelope;
    for (const auto& s : r.scatter) {
      auto it = std::upper_bound(env.begin(), env.end(), std::make_pair(s.cr_in, 1e300));
      const double psi = std::prev(it)->second;
      o.require(psi <= s.cr_in + s.slack, "envelope above t + slack");
      excess = std::max(excess, psi - s.cr_in);
    }
  }
  o.detail << "max envelope(t) - t = " << excess;
  return o;
}

Outcome c8_extension() {
  Outcome o;
  const double D = 1.5;
  const auto queries = grid_queries(kLattice, {0.0, 0.0}, 4.0, 32);
  const double R = select_radius(*BarycenterMap::shared(kLattice, D), queries);
  ExtendedMapConfig cfg{D, D, R, 8, 20000};

  const ExtendedMap id(kLattice, kLattice, BoundaryMap::identity(), cfg);
  double worst_id = 0.0, worst_tr = 0.0;
  for (const auto& x : queries) {
    const auto ev = id.evaluate(x);
    worst_id = std::max(worst_id, distance(kLattice, ev.h, x));
  }
  o.require(worst_id <= R + id.M(), "identity: d(h(x), x) > R + M");

  const std::int64_t gx = 2, gy = -1;
  const ExtendedMap tr(kLattice, kLattice, BoundaryMap::translation(gx, gy), cfg);
  for (const auto& x : queries) worst_tr = std::max(worst_tr, distance(kLattice, tr(x), translate(x, gx, gy)));
  o.require(worst_tr <= R + tr.M(), "translation: d(h(x), g x) > R + M");

  const ExtendedMap inv = tr.quasi_inverse();
  // Windows are nested balls: the sample for each window extends the
  // previous one, so the per-window maxima are a running supremum.
  std::vector<double> disp;
  std::vector<ModelPoint> xs;
  for (int k = 0; k < 4; ++k) {
    const double W = 2.0 * std::ldexp(1.0, k);
    const auto fresh = random_queries(kLattice, {0.0, 0.0}, W, 40, 80 + static_cast<std::uint64_t>(k));
    xs.insert(xs.end(), fresh.begin(), fresh.end());
    const auto r = quasi_inverse_probe(tr, inv, xs, xs);
    disp.push_back(std::max(r.max_displacement_XX, r.max_displacement_YY));
  }
  for (std::size_t k = 0; k + 1 < disp.size(); ++k)
    o.require(std::max(disp[k + 1], kGeomEps) / std::max(disp[k], kGeomEps) < 1.2, "quasi-inverse displacement grows");
  o.detail << "R=" << R << " M=" << id.M() << " max d(h x, x)=" << worst_id << " max d(h x, g x)=" << worst_tr
           << " displacements";
  for (double d : disp) o.detail << " " << d;
  return o;
}

Outcome c9_qi() {
  Outcome o;
  const double D = 1.5;
  const auto queries = grid_queries(kLattice, {0.0, 0.0}, 8.0, 8);
  const double R = select_radius(*BarycenterMap::shared(kLattice, D), queries);
  const ExtendedMap id(kLattice, kLattice, BoundaryMap::identity(), {D, D, R, 9, 20000});
  const auto pairs = sample_pairs(kLattice, {0.0, 0.0}, 8.0, 500, 99);
  const auto r = qi_probe(id, pairs);
  o.require(r.upper.lambda <= 1.2, "lambda above 1.2");
  for (std::size_t i = 0; i < r.d_in.size(); ++i) {
    o.require(r.d_out[i] <= r.upper.lambda * r.d_in[i] + r.upper.eps, "upper bound violated by a sample");
    o.require(r.d_in[i] <= r.lower.lambda * r.d_out[i] + r.lower.eps, "lower bound violated by a sample");
  }
  o.detail << "lambda=" << r.upper.lambda << " eps=" << r.upper.eps << " (inverse: " << r.lower.lambda << ", "
           << r.lower.eps << ")";
  return o;
}

Outcome c10_boundary_agreement() {
  Outcome o;
  const double D = 1.5;
  const std::vector<double> heights{4.0, 8.0, 16.0, 32.0};
  struct Case {
    BoundaryMap f;
    BoundaryPoint p;
  };
  for (const auto& c : {Case{BoundaryMap::identity(), {0, 0}}, Case{BoundaryMap::translation(2, -1), {3, 1}}}) {
    std::vector<ModelPoint> probe_points;
    for (double h : {0.0, 4.0, 8.0, 16.0, 32.0}) probe_points.push_back(kLattice.canonical(ModelPoint::ray(c.p.m, c.p.n, h)));
    const double R = select_radius(*BarycenterMap::shared(kLattice, D), probe_points);
    const ExtendedMap h(kLattice, kLattice, c.f, {D, D, R, 10, 20000});
    const auto r = boundary_agreement_probe(h, c.p, heights);
    double worst = 0.0;
    for (double d : r.deviations) worst = std::max(worst, d);
    o.require(worst <= R + h.M(), c.f.label() + ": deviation above R + M");
    o.detail << c.f.label() << ": R=" << R << " M=" << h.M() << " max deviation=" << worst << "; ";
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "example reproduction (exact)", 1.0, c1_example},
      {2, "cross-ratio blow-up (exact)", 1.0, c2_cross_ratio},
      {3, "non-2-stability verdict", 10.0, c3_two_stable},
      {4, "sampled vs exact contracting constants", 60.0, c4_sampled_vs_exact},
      {5, "slim triangles", 60.0, c5_slim},
      {6, "flip lemma", 120.0, c6_flips},
      {7, "isometry => quasi-mobius with lambda = 1", 60.0, c7_quasi_mobius},
      {8, "extension round trip", 600.0, c8_extension},
      {9, "quasi-isometry bound", 120.0, c9_qi},
      {10, "boundary agreement", 120.0, c10_boundary_agreement},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool ok = o.pass && in_time;
    failures += ok ? 0 : 1;
    std::printf("%s  [%2d] %-42s %8.3f s (limit %g s)%s  %s\n", ok ? "PASS" : "FAIL", c.id, c.name, secs, c.limit_s,
                in_time ? "" : " TIMEOUT", o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
