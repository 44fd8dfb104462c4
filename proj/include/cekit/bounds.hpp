#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cekit/game.hpp"
#include "cekit/qmat.hpp"

namespace cekit::bounds {

struct SeesawOptions {
  int multistarts = 32;      // random restarts screened at coarse tolerance
  int polish_top = 3;        // best starts iterated to the full tolerance
  double coarse_tol = 1e-6;
  double tol = 1e-9;         // stop when the objective improves by less
  int max_iters = 400;
  uint64_t seed = 2024;
};

struct BoundPoint {
  double d_eps = 0.0;
  double value = 0.0;
  game::Strategy argmax;
  std::string method;    // seesaw | grid | analytic
  bool saturated = false;  // single-detection weight equals d_eps at the optimum
  // Reduced-family parameters of the best point of the c00/c01/n_x form;
  // meaningful for the entangled coherent family only.
  bool has_params = false;
  double c00 = 0.0, c01 = 0.0, n_x = 0.0;
};

// Optimal winning probability for a resource class at fixed d_eps. The
// entangled family alternates a state SDP (trace one, constrained
// single-detection weight) with closed-form measurement updates; the other
// two families keep their state fixed and optimize measurements only.
BoundPoint optimize_pwin(game::ResourceKind family, double d_eps, const SeesawOptions& opts = {});

// Deterministic optimum of the reduced two-parameter objective at fixed
// d_eps: coarse (c00, n_x) grid followed by coordinate golden-section polish.
struct ParamOptimum {
  double c00 = 0.0, c01 = 0.0, n_x = 0.0;
  double value = 0.0;
};
ParamOptimum optimize_param_family(double d_eps);

// One common real root of the printed stationarity system, with the
// back-substituted amplitudes and the four amplitude-sign variants of the
// reduced objective evaluated at that root.
struct AppendixASolution {
  double n_x = 0.0;
  double c00 = 0.0, c01 = 0.0;
  double x_of_deps = 0.0;  // c00^2
  double pwin = 0.0;       // printed signs
  double variant_pwin[4] = {0, 0, 0, 0};  // (+c00,+c01), (+,-), (-,+), (-,-)
};

struct AppendixAResult {
  double d_eps = 0.0;
  std::vector<AppendixASolution> solutions;
  bool no_interior_solution() const { return solutions.empty(); }
};

// Scans both printed polynomials for sign changes on a 1e-4 grid, bisects
// each bracket to 1e-12 and keeps the common real roots in [-1, 1].
AppendixAResult analytic_appendix_a(double d_eps);

// (d_eps, entanglement entropy in bits) of the reduced-family optimizer.
std::vector<std::pair<double, double>> entanglement_entropy_curve(
    const std::vector<double>& d_eps_grid, const SeesawOptions& opts = {});

struct GuessingPoint {
  double d_eps = 0.0;
  double pwin_target = 0.0;
  double p_guess = 1.0;
  double h_min = 0.0;
};

struct GuessingOptions {
  SeesawOptions seesaw;
  int golden_iters = 10;    // per multiplier axis
  double lambda_max = 64.0; // search box for both multipliers
  int warm_starts = 2;      // see-saw starts per multiplier evaluation
};

// Best feasible guess of Alice's detection outcome under the two game
// constraints, found by a two-multiplier Lagrangian see-saw (nested
// golden-section over the multipliers, state steps solved as SDPs). The
// returned value is a certified lower bound on the adversary's optimum:
// every reported strategy is feasible and evaluated exactly.
GuessingPoint guessing_probability(double pwin_target, double d_eps,
                                   const GuessingOptions& opts = {},
                                   std::optional<double> known_bound = std::nullopt);

// Sweep over targets at fixed d_eps. Targets are processed in descending
// order with a shared candidate pool, so p_guess is non-increasing in the
// target by construction; results are returned in the input order.
std::vector<GuessingPoint> guessing_curve(double d_eps, const std::vector<double>& targets,
                                          const GuessingOptions& opts = {},
                                          std::optional<double> known_bound = std::nullopt);

// Greatest jointly-convex minorant of the h_min grid that is non-decreasing
// in pwin and non-increasing in d_eps. Evaluation solves the tiny dual
// program exactly: the lowest average grid value over convex weights whose
// mean point dominates the query.
class HminSurface {
 public:
  HminSurface(std::vector<double> pwin_nodes, std::vector<double> deps_nodes,
              std::vector<GuessingPoint> points);

  // Reconstructs the axes from a point scatter (used when loading a surface
  // from file); still requires at least 5 distinct values per axis.
  static HminSurface from_points(std::vector<GuessingPoint> points);

  double eval(double pwin, double d_eps) const;  // throws std::domain_error outside
  const std::vector<GuessingPoint>& points() const { return points_; }
  const std::vector<double>& pwin_nodes() const { return pwin_nodes_; }
  const std::vector<double>& deps_nodes() const { return deps_nodes_; }

 private:
  HminSurface() = default;

  std::vector<double> pwin_nodes_, deps_nodes_;
  std::vector<GuessingPoint> points_;
};

HminSurface build_hmin_surface(const std::vector<double>& pwin_nodes,
                               const std::vector<double>& deps_nodes,
                               const GuessingOptions& opts = {});

// Brute-force lower bound: reduced states at 1e-2 resolution in c00 with
// independent server measurement directions (both hemisphere signs) at the
// same resolution. Must never exceed the see-saw optimum by more than 1e-3.
struct GridOracleResult {
  double value = 0.0;
  double c00 = 0.0, c01 = 0.0;
  double n_xa = 0.0, n_xb = 0.0;
};
GridOracleResult grid_oracle(double d_eps, double resolution = 0.01);

}  // namespace cekit::bounds
