#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cekit/bounds.hpp"
#include "cekit/game.hpp"

using namespace cekit;
using namespace cekit::bounds;
using game::ResourceKind;

namespace {

SeesawOptions fast_opts() {
  SeesawOptions o;
  o.multistarts = 8;
  o.polish_top = 2;
  return o;
}

GuessingOptions fast_guess() {
  GuessingOptions o;
  o.seesaw = fast_opts();
  o.golden_iters = 8;
  return o;
}

// Exhaustive oracle for the diagonal (non-coherent) family: both forwarded
// branches commute with diagonal measurements, so deterministic diagonal
// POVMs (16 pairs) exhaust the vertices of the bilinear problem.
double mixed_family_enumeration(double d_eps) {
  DensityMatrix rho = game::resource_state({ResourceKind::mixed_non_coherent, d_eps});
  double best = 0.0;
  for (int u0 = 0; u0 < 2; ++u0)
    for (int u1 = 0; u1 < 2; ++u1)
      for (int v0 = 0; v0 < 2; ++v0)
        for (int v1 = 0; v1 < 2; ++v1) {
          ComplexMatrix a0(2, 2), b0(2, 2);
          a0(0, 0) = u0;
          a0(1, 1) = u1;
          b0(0, 0) = v0;
          b0(1, 1) = v1;
          Povm pa(2, {a0, ComplexMatrix::identity(2) - a0});
          Povm pb(2, {b0, ComplexMatrix::identity(2) - b0});
          best = std::max(best, game::pwin({rho, pa, pb}));
        }
  return best;
}

// Closed form for the separable coherent family: only the diagonal of B's
// POVM and two quadratic forms of A's enter, and maximizing the resulting
// affine expression gives (1 + sqrt(d_eps)) / 2.
double separable_closed_form(double d_eps) { return 0.5 * (1.0 + std::sqrt(d_eps)); }

}  // namespace

TEST_CASE("reduced-family optimum at the endpoints") {
  ParamOptimum p0 = optimize_param_family(0.0);
  // hand reduction at d_eps = 0: (1/8)(4 + n^2 (1 - c00^2)), max 5/8
  CHECK(p0.value == doctest::Approx(0.625).epsilon(1e-9));
  CHECK(std::abs(p0.c00) < 1e-4);
  CHECK(std::abs(std::abs(p0.n_x) - 1.0) < 1e-4);

  ParamOptimum p1 = optimize_param_family(1.0);
  CHECK(p1.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("optimize_pwin endpoints and known families") {
  SeesawOptions opts = fast_opts();

  BoundPoint e1 = optimize_pwin(ResourceKind::entangled_coherent, 1.0, opts);
  CHECK(e1.value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(e1.saturated);

  BoundPoint e0 = optimize_pwin(ResourceKind::entangled_coherent, 0.0, opts);
  CHECK(e0.value == doctest::Approx(0.625).epsilon(1e-7));
  CHECK(game::single_detection_prob(e0.argmax.rho, 1) < 1e-6);

  BoundPoint m0 = optimize_pwin(ResourceKind::mixed_non_coherent, 0.0, opts);
  CHECK(m0.value == doctest::Approx(mixed_family_enumeration(0.0)).epsilon(1e-7));
  CHECK(m0.value == doctest::Approx(0.5).epsilon(1e-7));

  for (double d : {0.3, 0.7}) {
    BoundPoint m = optimize_pwin(ResourceKind::mixed_non_coherent, d, opts);
    CHECK(m.value == doctest::Approx(mixed_family_enumeration(d)).epsilon(1e-7));
    CHECK(m.value == doctest::Approx((1.0 + d) / 2.0).epsilon(1e-7));

    BoundPoint s = optimize_pwin(ResourceKind::separable_coherent, d, opts);
    CHECK(s.value == doctest::Approx(separable_closed_form(d)).epsilon(1e-7));
  }
}

TEST_CASE("resource hierarchy at spot values") {
  SeesawOptions opts = fast_opts();
  for (double d : {0.1, 0.5, 0.9}) {
    double e = optimize_pwin(ResourceKind::entangled_coherent, d, opts).value;
    double s = optimize_pwin(ResourceKind::separable_coherent, d, opts).value;
    double m = optimize_pwin(ResourceKind::mixed_non_coherent, d, opts).value;
    CHECK(e >= s - 1e-7);
    CHECK(s >= m - 1e-7);
    CHECK(e > s + 1e-5);  // strict separation away from the endpoints
    CHECK(s > m + 1e-5);
  }
}

TEST_CASE("grid oracle stays below the see-saw optimum") {
  SeesawOptions opts = fast_opts();
  for (double d : {0.0, 0.2}) {
    GridOracleResult oracle = grid_oracle(d, 0.02);
    double seesaw = optimize_pwin(ResourceKind::entangled_coherent, d, opts).value;
    CHECK(oracle.value <= seesaw + 1e-3);
    CHECK(oracle.value >= seesaw - 2e-3);  // the grid should also come close
  }
}

TEST_CASE("printed stationarity system") {
  AppendixAResult r0 = analytic_appendix_a(0.0);
  CHECK(r0.no_interior_solution());

  AppendixAResult r1 = analytic_appendix_a(1.0);
  REQUIRE(!r1.no_interior_solution());
  bool found = false;
  for (const auto& s : r1.solutions)
    if (std::abs(s.n_x) < 1e-10) {
      found = true;
      CHECK(std::abs(s.c00) < 1e-10);
      CHECK(std::abs(s.c01) < 1e-10);
      CHECK(s.pwin == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(s.x_of_deps == doctest::Approx(0.0).epsilon(1e-12));
    }
  CHECK(found);

  // sweep: interior solutions, where they exist, must match the see-saw
  SeesawOptions opts = fast_opts();
  for (double d : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    AppendixAResult r = analytic_appendix_a(d);
    for (const auto& s : r.solutions) {
      double seesaw = optimize_pwin(ResourceKind::entangled_coherent, d, opts).value;
      CHECK(std::abs(s.pwin - seesaw) < 1e-6);
    }
  }
}

TEST_CASE("entanglement entropy endpoints and monotonicity") {
  SeesawOptions opts = fast_opts();
  auto curve = entanglement_entropy_curve({0.0, 0.25, 0.5, 0.75, 1.0}, opts);
  REQUIRE(curve.size() == 5);
  CHECK(curve.front().second == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(curve.back().second == doctest::Approx(0.0).epsilon(1e-6));
  for (size_t i = 0; i + 1 < curve.size(); ++i)
    CHECK(curve[i + 1].second <= curve[i].second + 1e-7);
}

TEST_CASE("guessing probability against the separable threshold") {
  GuessingOptions opts = fast_guess();
  double d = 0.04;
  double sep = separable_closed_form(d);  // 0.6

  GuessingPoint below = guessing_probability(sep - 0.02, d, opts);
  CHECK(below.p_guess == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(below.h_min <= 1e-9);

  GuessingPoint at = guessing_probability(sep, d, opts);
  CHECK(at.p_guess == doctest::Approx(1.0).epsilon(1e-6));

  double bound = optimize_pwin(ResourceKind::entangled_coherent, d, fast_opts()).value;
  GuessingPoint top = guessing_probability(bound, d, opts);
  CHECK(top.p_guess < 1.0 - 1e-3);
  CHECK(top.h_min > 1e-3);

  CHECK_THROWS_AS((void)guessing_probability(bound + 0.01, d, opts), std::invalid_argument);
}

TEST_CASE("guessing curve is monotone in the target") {
  GuessingOptions opts = fast_guess();
  double d = 0.0;
  double bound = optimize_pwin(ResourceKind::entangled_coherent, d, fast_opts()).value;
  std::vector<double> targets;
  for (int i = 0; i <= 6; ++i) targets.push_back(0.5 + (bound - 0.5) * i / 6.0);
  auto curve = guessing_curve(d, targets, opts, bound);
  REQUIRE(curve.size() == targets.size());
  for (size_t i = 0; i + 1 < curve.size(); ++i) CHECK(curve[i + 1].p_guess <= curve[i].p_guess + 1e-12);
  CHECK(curve.front().p_guess == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(curve.back().h_min > 1e-3);
}

TEST_CASE("hmin surface hull properties") {
  // synthetic grid: h(p, d) = max(0, 4(p - 0.5) - d) is convex, increasing in
  // p, decreasing in d, so the minorant must reproduce it at the nodes.
  std::vector<double> ps = {0.50, 0.55, 0.60, 0.65, 0.70};
  std::vector<double> ds = {0.0, 0.1, 0.2, 0.3, 0.4};
  std::vector<GuessingPoint> pts;
  for (double d : ds)
    for (double p : ps) {
      GuessingPoint g;
      g.d_eps = d;
      g.pwin_target = p;
      g.h_min = std::max(0.0, 4.0 * (p - 0.5) - d);
      g.p_guess = std::pow(2.0, -g.h_min);
      pts.push_back(g);
    }
  HminSurface surf(ps, ds, pts);

  // at nodes: minorant <= node value (and here it is exact by convexity)
  for (const auto& g : pts) {
    double v = surf.eval(g.pwin_target, g.d_eps);
    CHECK(v <= g.h_min + 1e-10);
    CHECK(v == doctest::Approx(g.h_min).epsilon(1e-9));
  }

  // zero below the threshold region
  CHECK(surf.eval(0.52, 0.4) == doctest::Approx(0.0).epsilon(1e-12));

  // midpoint convexity
  double a = surf.eval(0.55, 0.1), b = surf.eval(0.65, 0.3);
  double mid = surf.eval(0.60, 0.2);
  CHECK(mid <= 0.5 * (a + b) + 1e-10);

  // monotonicity in both arguments
  CHECK(surf.eval(0.66, 0.1) >= surf.eval(0.62, 0.1) - 1e-12);
  CHECK(surf.eval(0.62, 0.05) >= surf.eval(0.62, 0.25) - 1e-12);

  // outside the certified domain
  CHECK_THROWS_AS((void)surf.eval(0.75, 0.1), std::domain_error);

  // queries below the pwin range and above the d range stay defined
  CHECK(surf.eval(0.45, 0.2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(surf.eval(0.55, 0.9) == doctest::Approx(0.0).epsilon(1e-12));

  // sparse grids are rejected
  CHECK_THROWS_AS((void)HminSurface({0.5, 0.6}, ds, {}), std::invalid_argument);

  // scatter loader reproduces the same surface
  HminSurface again = HminSurface::from_points(pts);
  CHECK(again.eval(0.60, 0.2) == doctest::Approx(mid).epsilon(1e-12));
}
