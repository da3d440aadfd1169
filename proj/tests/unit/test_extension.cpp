#include <gtest/gtest.h>

#include "common.hpp"
#include "morselab/contracting.hpp"
#include "morselab/enclosing_ball.hpp"
#include "morselab/extension.hpp"
#include "morselab/tables.hpp"

using namespace morselab;
using namespace morselab::testing;

namespace {

bool cloud_contains(const ModelSpace& space, const std::vector<ModelPoint>& cloud, const ModelPoint& p, double tol) {
  for (const auto& q : cloud)
    if (distance(space, p, q) <= tol) return true;
  return false;
}

double K_for(double D) { return ConstantsTable::for_space(lattice()).K(D); }

TEST(EKSet, ContainsSideProjections) {
  const Triangle T{BoundaryPoint{0, 0}, BoundaryPoint{1, 0}, BoundaryPoint{0, 1}};
  const auto ek = ek_set(lattice(), T, K_for(std::sqrt(2.0)));
  EXPECT_TRUE(cloud_contains(lattice(), ek.samples, ModelPoint::plane(0, 0), 1e-12));
}

TEST(EKSet, EverySampleIsWithinKOfAllSides) {
  Rng rng(51);
  for (int i = 0; i < 20; ++i) {
    const auto t = random_tuple<3>(rng, 3.0);
    const Triangle T{t[0], t[1], t[2]};
    const double K = K_for(tuple_constant(lattice(), {t.begin(), t.end()}));
    const auto ek = ek_set(lattice(), T, K);
    const GeodesicPath sides[] = {geodesic(lattice(), t[0], t[1]), geodesic(lattice(), t[1], t[2]),
                                  geodesic(lattice(), t[0], t[2])};
    for (const auto& q : ek.samples)
      for (const auto& s : sides) ASSERT_LE(project_point(lattice(), s, q).distance, K + 1e-9);
    // Containment of every side's projection of the opposite vertex.
    for (int k = 0; k < 3; ++k) {
      const auto& side = sides[k];
      const BoundaryPoint opposite = k == 0 ? t[2] : k == 1 ? t[0] : t[1];
      const auto foot = project_boundary(lattice(), side, opposite).barycenter;
      ASSERT_TRUE(cloud_contains(lattice(), ek.samples, foot, 1e-9));
    }
  }
}

TEST(EKSet, DiameterWithinTable) {
  Rng rng(53);
  auto& tables = ConstantsTable::for_space(lattice());
  for (int i = 0; i < 100; ++i) {
    const auto t = random_tuple<3>(rng, 3.0);
    const double D = tuple_constant(lattice(), {t.begin(), t.end()});
    ASSERT_LE(BarycenterMap::shared(lattice(), D)->cloud_diameter({t[0], t[1], t[2]}), tables.ek_diameter(D));
  }
}

TEST(EKSet, CollinearTriangleConcentratesNearMiddle) {
  const Triangle T{BoundaryPoint{0, 0}, BoundaryPoint{2, 0}, BoundaryPoint{1, 0}};
  const double K = K_for(2.0);
  const auto ek = ek_set(lattice(), T, K);
  // Brute-force grid: membership of plane points near the segment.
  for (double x = -1.0; x <= 3.0; x += 0.125)
    for (double y = -1.0; y <= 1.0; y += 0.125) {
      const auto p = ModelPoint::plane(x, y);
      double worst = 0.0;
      for (const auto& s : {geodesic(lattice(), T[0], T[1]), geodesic(lattice(), T[1], T[2]),
                            geodesic(lattice(), T[0], T[2])})
        worst = std::max(worst, project_point(lattice(), s, p).distance);
      if (worst < K - ek.pitch) {
        ASSERT_LE(distance(lattice(), p, ek.ball.center), ek.ball.radius + 1e-9);
      }
    }
  EXPECT_LE(distance(lattice(), ek.ball.center, ModelPoint::plane(1, 0)), ek.diameter);
}

TEST(EKSet, TreeCloudIsTheMedian) {
  const Triangle T{BoundaryPoint{10, 0}, BoundaryPoint{13, 0}, BoundaryPoint{15, 0}};
  const auto ek = ek_set(tree(), T, ConstantsTable::for_space(tree()).K(1.0));
  EXPECT_LE(ek.diameter, 1e-9);
  EXPECT_TRUE(same_point(tree(), ek.ball.center, ModelPoint::vertex(2)));
}

// All circles through 2 or 3 points, smallest one containing everything.
geom::Circle brute_force_circle(const std::vector<PlanePoint>& p) {
  geom::Circle best{0, 0, 1e300};
  auto consider = [&](double cx, double cy) {
    double r = 0.0;
    for (const auto& q : p) r = std::max(r, std::hypot(q.x - cx, q.y - cy));
    if (r < best.r) best = {cx, cy, r};
  };
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      consider(0.5 * (p[i].x + p[j].x), 0.5 * (p[i].y + p[j].y));
      for (std::size_t k = j + 1; k < p.size(); ++k) {
        const double ax = p[i].x, ay = p[i].y, bx = p[j].x, by = p[j].y, cx = p[k].x, cy = p[k].y;
        const double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
        if (std::abs(d) < 1e-12) continue;
        const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
        consider((a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d,
                 (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d);
      }
    }
  return best;
}

TEST(Barycenter, MatchesBruteForceOnRandomClouds) {
  Rng rng(57);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<PlanePoint> pts;
    std::vector<ModelPoint> cloud;
    for (int i = 0; i < 50; ++i) {
      pts.push_back({rng.uniform(-3, 3), rng.uniform(-2, 2)});
      cloud.push_back(ModelPoint::plane(pts.back().x, pts.back().y));
    }
    const auto want = brute_force_circle(pts);
    const auto got = enclosing_ball(lattice(), cloud);
    EXPECT_NEAR(got.radius, want.r, 1e-9);
    EXPECT_NEAR(got.center.as_plane().x, want.x, 1e-9);
    EXPECT_NEAR(got.center.as_plane().y, want.y, 1e-9);
    // Grid oracle: no grid centre beats the radius.
    const double pitch = 0.02;
    double grid_best = 1e300;
    for (double x = -3; x <= 3; x += pitch)
      for (double y = -2; y <= 2; y += pitch) {
        double r = 0.0;
        for (const auto& q : pts) r = std::max(r, std::hypot(q.x - x, q.y - y));
        grid_best = std::min(grid_best, r);
      }
    EXPECT_LE(got.radius, grid_best + 1e-12);
    EXPECT_GE(got.radius, grid_best - 2 * pitch);
  }
}

TEST(Barycenter, TwoPointsGiveTheMidpoint) {
  const std::vector<ModelPoint> plane{ModelPoint::plane(0, 0), ModelPoint::plane(4, 2)};
  EXPECT_TRUE(same_point(lattice(), barycenter(lattice(), plane), ModelPoint::plane(2, 1)));
  const std::vector<ModelPoint> rays{ModelPoint::ray(0, 0, 3), ModelPoint::ray(0, 0, 1)};
  EXPECT_TRUE(same_point(lattice(), barycenter(lattice(), rays), ModelPoint::ray(0, 0, 2)));
  const std::vector<ModelPoint> mixed{ModelPoint::ray(0, 0, 2), ModelPoint::plane(3, 0)};
  const auto c = barycenter(lattice(), mixed);
  EXPECT_NEAR(distance(lattice(), c, mixed[0]), 2.5, 1e-9);
  EXPECT_NEAR(distance(lattice(), c, mixed[1]), 2.5, 1e-9);
  const std::vector<ModelPoint> leaves{ModelPoint::vertex(10), ModelPoint::vertex(15)};
  const auto t = barycenter(tree(), leaves);
  EXPECT_NEAR(distance(tree(), t, leaves[0]), distance(tree(), t, leaves[1]), 1e-12);
}

TEST(Barycenter, SymmetricCloudCentreOnTheMirror) {
  Rng rng(59);
  std::vector<ModelPoint> cloud;
  for (int i = 0; i < 20; ++i) {
    const double x = rng.uniform(0.1, 3), y = rng.uniform(-2, 2);
    cloud.push_back(ModelPoint::plane(x, y));
    cloud.push_back(ModelPoint::plane(-x, y));
  }
  EXPECT_NEAR(barycenter(lattice(), cloud).as_plane().x, 0.0, 1e-9);
}

TEST(Pi, UnitTriangleBarycenterLiesInItsCloud) {
  const Triangle T{BoundaryPoint{0, 0}, BoundaryPoint{1, 0}, BoundaryPoint{0, 1}};
  const double D = std::sqrt(2.0);
  const auto pi = pi_triangle(lattice(), T, D);
  const auto ek = ek_set(lattice(), T, K_for(D));
  EXPECT_LE(distance(lattice(), pi, ek.ball.center), 1e-12);
  EXPECT_LE(ek.ball.radius, ek.diameter + 1e-12);
  for (const auto& q : ek.samples) ASSERT_LE(distance(lattice(), pi, q), ek.ball.radius + 1e-9);
}

TEST(Pi, TranslationEquivariant) {
  Rng rng(61);
  const auto& pi = *BarycenterMap::shared(lattice(), 3.0);
  for (int i = 0; i < 50; ++i) {
    const auto t = random_tuple<3>(rng, 3.0);
    const std::int64_t gx = rng.integer(-9, 9), gy = rng.integer(-9, 9);
    const Triangle T{t[0], t[1], t[2]};
    const Triangle gT{BoundaryPoint{t[0].m + gx, t[0].n + gy}, BoundaryPoint{t[1].m + gx, t[1].n + gy},
                      BoundaryPoint{t[2].m + gx, t[2].n + gy}};
    ASSERT_LE(distance(lattice(), pi(gT), translate(pi(T), gx, gy)), kGeomEps);
    // Independent of the vertex order.
    const Triangle P{t[2], t[0], t[1]};
    ASSERT_LE(distance(lattice(), pi(P), pi(T)), kGeomEps);
  }
}

TEST(Pi, OutsideTheStratumIsAFailure) {
  const auto& pi = *BarycenterMap::shared(lattice(), 1.5);
  EXPECT_THROW(pi({BoundaryPoint{0, 0}, BoundaryPoint{3, 0}, BoundaryPoint{0, 1}}), StratumFailure);
}

TEST(Pi, CrossRatioLinkWithinTable) {
  Rng rng(67);
  auto& tables = ConstantsTable::for_space(lattice());
  for (int i = 0; i < 200; ++i) {
    const auto t = random_tuple<4>(rng, 3.0);
    const double D = tuple_constant(lattice(), {t.begin(), t.end()});
    const auto& pi = *BarycenterMap::shared(lattice(), D);
    const double gap = distance(lattice(), pi({t[0], t[1], t[2]}), pi({t[0], t[2], t[3]}));
    const double cr = std::abs(cross_ratio_value(lattice(), t[0], t[1], t[2], t[3]));
    ASSERT_LE(std::abs(gap - cr), tables.centers_C(D));
  }
}

// Ordered so that a-c is the long horizontal side: b and d then project to
// its two ends and |[a,b,c,d]| = 5.
TEST(Flip, FarSquareHasASmallFlip) {
  const std::array<BoundaryPoint, 4> t{BoundaryPoint{0, 0}, BoundaryPoint{0, 1}, BoundaryPoint{5, 0},
                                       BoundaryPoint{5, 1}};
  const double D = tuple_constant(lattice(), {t.begin(), t.end()});
  EXPECT_NEAR(std::abs(cross_ratio_value(lattice(), t[0], t[1], t[2], t[3])), 5.0, 1e-12);
  const auto r = small_flip_select(lattice(), t, D);
  EXPECT_LE(r.value, r.bound);
  EXPECT_LT(r.value, r.magnitudes[0]);
}

TEST(Flip, UnitSquare) {
  const std::array<BoundaryPoint, 4> t{BoundaryPoint{0, 0}, BoundaryPoint{1, 0}, BoundaryPoint{1, 1},
                                       BoundaryPoint{0, 1}};
  const auto r = small_flip_select(lattice(), t, 2.0);
  for (double m : r.magnitudes) EXPECT_TRUE(std::isfinite(m));
  EXPECT_LE(r.value, r.bound);
}

TEST(Flip, EqualProjectionsGiveZero) {
  // b = r[1,0] and d = r[2,0] both project onto the a-c side at (0,0).
  const std::array<BoundaryPoint, 4> t{BoundaryPoint{0, 0}, BoundaryPoint{1, 0}, BoundaryPoint{0, 2},
                                       BoundaryPoint{2, 0}};
  EXPECT_EQ(small_flip_select(lattice(), t, 3.0).value, 0.0);
}

TEST(Flip, OutsideTheStratum) {
  const std::array<BoundaryPoint, 4> t{BoundaryPoint{0, 0}, BoundaryPoint{9, 0}, BoundaryPoint{0, 1},
                                       BoundaryPoint{9, 1}};
  EXPECT_THROW(small_flip_select(lattice(), t, 2.0), StratumFailure);
}

TEST(Preimage, BarycentersWithinRadius) {
  const auto& pi = *BarycenterMap::shared(lattice(), 3.0);
  const auto x = ModelPoint::plane(0, 0);
  const auto pre = preimage_triangles(pi, x, 2.0);
  ASSERT_FALSE(pre.empty());
  for (const auto& e : pre) {
    ASSERT_LE(distance(lattice(), e.barycenter, x), 2.0);
    ASSERT_LE(distance(lattice(), pi(e.triangle), e.barycenter), kGeomEps);
  }
}

TEST(Preimage, HighUpARayIsEmpty) {
  const auto& pi = *BarycenterMap::shared(lattice(), 3.0);
  EXPECT_TRUE(preimage_triangles(pi, ModelPoint::ray(0, 0, 50.0), 2.0).empty());
}

TEST(Preimage, TranslationEquivariant) {
  const auto& pi = *BarycenterMap::shared(lattice(), 2.0);
  const auto x = ModelPoint::plane(0.3, -0.2);
  auto key = [](const Triangle& T, std::int64_t gx, std::int64_t gy) {
    std::array<BoundaryPoint, 3> s{BoundaryPoint{T[0].m + gx, T[0].n + gy}, BoundaryPoint{T[1].m + gx, T[1].n + gy},
                                   BoundaryPoint{T[2].m + gx, T[2].n + gy}};
    std::sort(s.begin(), s.end());
    return s;
  };
  std::vector<std::array<BoundaryPoint, 3>> a, b;
  for (const auto& e : preimage_triangles(pi, x, 1.5)) a.push_back(key(e.triangle, 4, -3));
  for (const auto& e : preimage_triangles(pi, translate(x, 4, -3), 1.5)) b.push_back(key(e.triangle, 0, 0));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

class Extension : public ::testing::Test {
 protected:
  static constexpr double kD = 1.5;
  static std::vector<ModelPoint> queries() { return grid_queries(lattice(), {0.0, 0.0}, 3.0, 10); }
  static double R() { return select_radius(*BarycenterMap::shared(lattice(), kD), queries()); }
  static ExtendedMap make(const BoundaryMap& f) { return ExtendedMap(lattice(), lattice(), f, {kD, kD, R(), 5, 5000}); }
};

TEST_F(Extension, IdentityStaysWithinRPlusM) {
  const auto h = make(BoundaryMap::identity());
  for (const auto& x : queries()) {
    const auto e = h.evaluate(x);
    ASSERT_LE(distance(lattice(), e.h, x), h.R() + h.M());
    ASSERT_LE(e.pi_diameter, h.M());
    ASSERT_GT(e.triangle_count, 0u);
  }
}

TEST_F(Extension, TranslationTracksTheIsometry) {
  const auto h = make(BoundaryMap::translation(3, 1));
  for (const auto& x : queries()) ASSERT_LE(distance(lattice(), h(x), translate(x, 3, 1)), h.R() + h.M());
}

TEST_F(Extension, EquivariantUnderLatticeTranslations) {
  const auto h = make(BoundaryMap::identity());
  Rng rng(71);
  for (int i = 0; i < 30; ++i) {
    const auto x = ModelPoint::plane(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const std::int64_t gx = rng.integer(-5, 5), gy = rng.integer(-5, 5);
    ASSERT_LE(distance(lattice(), h(translate(x, gx, gy)), translate(h(x), gx, gy)), kGeomEps);
  }
}

TEST_F(Extension, BoundedExpansionOfBarycenters) {
  const auto h = make(BoundaryMap::translation(1, 2));
  const auto& pi = *BarycenterMap::shared(lattice(), kD);
  const auto f = BoundaryMap::translation(1, 2);
  Rng rng(73);
  int checked = 0;
  while (checked < 100) {
    const auto s = random_tuple<3>(rng, kD);
    const auto t = random_tuple<3>(rng, kD);
    const Triangle T{s[0], s[1], s[2]};
    Triangle U{t[0], t[1], t[2]};
    // Move U next to T.
    const std::int64_t gx = s[0].m - t[0].m + rng.integer(-2, 2), gy = s[0].n - t[0].n + rng.integer(-2, 2);
    for (auto& p : U) p = {p.m + gx, p.n + gy};
    if (distance(lattice(), pi(T), pi(U)) > 3.0) continue;
    const Triangle fT{f(T[0]), f(T[1]), f(T[2])}, fU{f(U[0]), f(U[1]), f(U[2])};
    ASSERT_LE(distance(lattice(), pi(fT), pi(fU)), std::max(h.M(), 3.0 + kGeomEps));
    ++checked;
  }
}

TEST_F(Extension, LipschitzAtScale) {
  const auto h = make(BoundaryMap::identity());
  const auto pairs = sample_pairs(lattice(), {0.0, 0.0}, 3.0, 1000, 9);
  // d(h x, x) <= R + M on both ends bounds the image of a 1-close pair.
  EXPECT_LE(lipschitz_at_scale(h, pairs, 1.0), 1.0 + 2.0 * (h.R() + h.M()));
}

TEST_F(Extension, QuasiIsometryFit) {
  const auto pairs = sample_pairs(lattice(), {0.0, 0.0}, 3.0, 300, 11);
  for (const auto& f : {BoundaryMap::identity(), BoundaryMap::translation(-2, 2)}) {
    const auto h = make(f);
    const auto r = qi_probe(h, pairs);
    EXPECT_NEAR(r.upper.lambda, 1.0, 0.2);
    EXPECT_LE(r.upper.eps, 2.0 * (h.R() + h.M()));
    for (std::size_t i = 0; i < r.d_in.size(); ++i)
      ASSERT_LE(r.d_out[i], r.upper.lambda * r.d_in[i] + r.upper.eps);
  }
}

TEST_F(Extension, DegeneratePairsContributeZero) {
  const auto h = make(BoundaryMap::identity());
  const auto x = ModelPoint::plane(0.4, 0.1);
  const auto r = qi_probe(h, {{x, x}, {x, ModelPoint::plane(1.4, 0.1)}});
  EXPECT_EQ(r.d_in[0], 0.0);
  EXPECT_EQ(r.d_out[0], 0.0);
  EXPECT_GE(r.upper.eps, 0.0);
}

TEST(LinearFit, HoldsExactlyAndPrefersSmallSlope) {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{0.5, 1.4, 2.6, 3.5, 4.4};
  const auto b = fit_linear_upper(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LE(y[i], b.lambda * x[i] + b.eps);
  EXPECT_NEAR(b.lambda, 1.0, 0.2);
}

TEST_F(Extension, QuasiInverseDisplacements) {
  const auto h = make(BoundaryMap::identity());
  const auto inv = h.quasi_inverse();
  const auto xs = random_queries(lattice(), {0.0, 0.0}, 3.0, 40, 13);
  const auto r = quasi_inverse_probe(h, inv, xs, xs);
  EXPECT_LE(r.max_displacement_XX, inv.R() + inv.M());
  EXPECT_LE(r.max_displacement_YY, h.R() + h.M());
  const std::vector<ModelPoint> same(5, xs[0]);
  const auto s = quasi_inverse_probe(h, inv, same, same);
  const auto s2 = quasi_inverse_probe(h, inv, same, same);
  EXPECT_EQ(s.max_displacement_XX, s2.max_displacement_XX);
}

TEST(BoundaryAgreement, AtHeightZeroIsFinite) {
  const auto h = ExtendedMap(lattice(), lattice(), BoundaryMap::identity(), {1.5, 1.5, 2.0, 5, 2000});
  const auto r = boundary_agreement_probe(h, {0, 0}, {0.0});
  ASSERT_EQ(r.deviations.size(), 1u);
  EXPECT_TRUE(std::isfinite(r.deviations[0]));
  EXPECT_THROW(boundary_agreement_probe(h, {0, 0}, {4.0, 2.0}), InvalidInput);
}

TEST(RadiusSelection, CoversEveryQuery) {
  const auto& pi = *BarycenterMap::shared(lattice(), 1.5);
  const std::vector<ModelPoint> qs{ModelPoint::plane(0.5, 0.5), ModelPoint::ray(0, 0, 10.0)};
  const double R = select_radius(pi, qs);
  EXPECT_EQ(R, std::exp2(std::round(std::log2(R))));
  for (const auto& q : qs) EXPECT_FALSE(preimage_triangles(pi, q, R).empty());
}

}  // namespace
