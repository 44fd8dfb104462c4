#include "cekit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>

#include "cekit/rng.hpp"
#include "cekit/sdp.hpp"

namespace cekit::bounds {

using game::ResourceKind;
using game::Strategy;

namespace {

constexpr double kSeesawMonotoneSlack = 1e-7;

ComplexMatrix e44() {
  ComplexMatrix m(4, 4);
  m(3, 3) = 1.0;
  return m;
}

Povm random_real_projective(Rng& rng) {
  double th = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  double c = std::cos(th), s = std::sin(th);
  ComplexMatrix p = ComplexMatrix::from_rows({{c * c, c * s}, {c * s, s * s}});
  return Povm(2, {p, ComplexMatrix::identity(2) - p});
}

// Best two-outcome POVM for a linear objective Tr[A_0 F0] + Tr[A_1 F1]:
// project onto the positive eigenspace of F0 - F1.
Povm best_povm(const ComplexMatrix& f0, const ComplexMatrix& f1) {
  ComplexMatrix diff = (f0 - f1).hermitized();
  EigResult e = eig_hermitian(diff);
  int n = diff.rows();
  ComplexMatrix p(n, n);
  for (int k = 0; k < n; ++k) {
    if (e.values[k] <= 0.0) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        p(i, j) += e.vectors(i, k) * std::conj(e.vectors(j, k));
  }
  p = p.hermitized();
  return Povm(n, {p, ComplexMatrix::identity(n) - p});
}

// Effective server operators of the winning functional for fixed state and
// fixed other-side measurement: pwin = sum_a Tr[A_a F_a].
std::pair<ComplexMatrix, ComplexMatrix> effective_ops(const DensityMatrix& rho, const Povm& other,
                                                      bool update_a) {
  ComplexMatrix f0(2, 2), f1(2, 2);
  ComplexMatrix id = ComplexMatrix::identity(2);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      DensityMatrix rho_xy = game::transform_state(rho, {x, y}, 1);
      for (int o = 0; o < 2; ++o) {
        ComplexMatrix contracted =
            update_a ? partial_trace(rho_xy.mat() * kron(id, other.element(o)), 2, 2, Keep::A)
                     : partial_trace(rho_xy.mat() * kron(other.element(o), id), 2, 2, Keep::B);
        // outcome of the updated side that wins given the other side's o
        int winning = (o ^ x ^ y) & 1;
        if (winning == 0)
          f0 += contracted;
        else
          f1 += contracted;
      }
    }
  f0 *= cplx(0.25, 0.0);
  f1 *= cplx(0.25, 0.0);
  return {f0.hermitized(), f1.hermitized()};
}

// State step of the entangled-family see-saw: maximize Tr(C rho) over
// trace-one PSD states with the single-detection weight capped at d_eps.
// d_eps = 0 pins the |11> row/column to zero, so the problem is solved on
// the 3-dimensional face to keep it strictly feasible.
DensityMatrix state_step(const ComplexMatrix& c, double d_eps) {
  if (d_eps < 1e-9) {
    ComplexMatrix c3(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c3(i, j) = c(i, j);
    sdp::SdpProblem p;
    p.objective = c3;
    p.equalities.push_back({ComplexMatrix::identity(3), 1.0});
    sdp::SdpSolution s = sdp::solve(p);
    if (s.status != sdp::SdpStatus::optimal)
      throw std::runtime_error("state_step: SDP did not converge (" + to_string(s.status) + ")");
    ComplexMatrix full(4, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) full(i, j) = s.x(i, j);
    cplx tr = full.trace();
    full *= cplx(1.0, 0.0) / tr;
    return DensityMatrix(full.hermitized());
  }
  sdp::SdpProblem p;
  p.objective = c;
  p.equalities.push_back({ComplexMatrix::identity(4), 1.0});
  p.inequalities.push_back({e44(), d_eps});
  sdp::SdpSolution s = sdp::solve(p);
  if (s.status != sdp::SdpStatus::optimal)
    throw std::runtime_error("state_step: SDP did not converge (" + to_string(s.status) + ")");
  ComplexMatrix x = s.x;
  cplx tr = x.trace();
  x *= cplx(1.0, 0.0) / tr;
  return DensityMatrix(x.hermitized());
}

struct SeesawRun {
  Strategy strategy;
  double value = 0.0;
};

// Alternating optimization from one random start. update_state = false keeps
// the state fixed (separable / mixed families).
SeesawRun seesaw_once(const DensityMatrix& initial_state, bool update_state, double d_eps,
                      Rng& rng, double tolerance, int max_iters) {
  Strategy s{initial_state, random_real_projective(rng), random_real_projective(rng)};
  double value = game::pwin(s);
  for (int it = 0; it < max_iters; ++it) {
    double before = value;
    if (update_state) {
      ComplexMatrix c = game::pwin_objective(s.povm_a, s.povm_b);
      s.rho = state_step(c, d_eps);
      double v = game::pwin(s);
      if (v < value - kSeesawMonotoneSlack)
        throw std::logic_error("seesaw: objective decreased after state step");
      value = v;
    }
    auto [fa0, fa1] = effective_ops(s.rho, s.povm_b, true);
    s.povm_a = best_povm(fa0, fa1);
    auto [fb0, fb1] = effective_ops(s.rho, s.povm_a, false);
    s.povm_b = best_povm(fb0, fb1);
    double v = game::pwin(s);
    if (v < value - kSeesawMonotoneSlack)
      throw std::logic_error("seesaw: objective decreased after measurement step");
    value = v;
    if (value - before < tolerance) break;
  }
  return {s, value};
}

SeesawRun multistart_seesaw(const std::function<DensityMatrix(Rng&)>& state_factory,
                            bool update_state, double d_eps, const SeesawOptions& opts) {
  Rng master(opts.seed);
  std::vector<SeesawRun> runs;
  runs.reserve(opts.multistarts);
  for (int k = 0; k < opts.multistarts; ++k) {
    Rng r = master.derive(k);
    DensityMatrix init = state_factory(r);
    runs.push_back(seesaw_once(init, update_state, d_eps, r, opts.coarse_tol, opts.max_iters));
  }
  std::sort(runs.begin(), runs.end(),
            [](const SeesawRun& a, const SeesawRun& b) { return a.value > b.value; });
  int polish = std::min<int>(opts.polish_top, static_cast<int>(runs.size()));
  SeesawRun best = runs.front();
  for (int k = 0; k < polish; ++k) {
    Rng r = master.derive(10000 + k);
    SeesawRun refined = runs[k];
    // continue the alternation from the screened point at full tolerance
    for (int it = 0; it < opts.max_iters; ++it) {
      double before = refined.value;
      if (update_state) {
        ComplexMatrix c = game::pwin_objective(refined.strategy.povm_a, refined.strategy.povm_b);
        refined.strategy.rho = state_step(c, d_eps);
      }
      auto [fa0, fa1] = effective_ops(refined.strategy.rho, refined.strategy.povm_b, true);
      refined.strategy.povm_a = best_povm(fa0, fa1);
      auto [fb0, fb1] = effective_ops(refined.strategy.rho, refined.strategy.povm_a, false);
      refined.strategy.povm_b = best_povm(fb0, fb1);
      double v = game::pwin(refined.strategy);
      if (v < refined.value - kSeesawMonotoneSlack)
        throw std::logic_error("seesaw: objective decreased during polish");
      refined.value = v;
      if (refined.value - before < opts.tol) break;
    }
    if (refined.value > best.value) best = refined;
  }
  return best;
}

DensityMatrix random_state(Rng& rng, double d_eps) {
  // random reduced-family pure state saturating the constraint
  double cmax = std::sqrt(std::max(0.0, 1.0 - d_eps));
  double c00 = rng.uniform(-cmax, cmax);
  double c01 = std::sqrt(std::max(0.0, (1.0 - d_eps - c00 * c00) / 2.0));
  if (rng.bernoulli(0.5)) c01 = -c01;
  return game::resource_state({ResourceKind::entangled_coherent, d_eps, c00, c01});
}

}  // namespace

ParamOptimum optimize_param_family(double d_eps) {
  double cmax = std::sqrt(std::max(0.0, 1.0 - d_eps));
  // c01 >= 0 without loss: flipping its sign is the same as flipping n_x.
  auto eval = [&](double c00, double n_x) {
    double c01 = std::sqrt(std::max(0.0, (1.0 - d_eps - c00 * c00) / 2.0));
    return game::pwin_param(c00, c01, d_eps, n_x);
  };

  ParamOptimum best;
  best.value = -1.0;
  const int steps = 120;
  for (int i = 0; i <= steps; ++i) {
    double c00 = cmax < 1e-15 ? 0.0 : -cmax + 2.0 * cmax * i / steps;
    for (int j = 0; j <= steps; ++j) {
      double n_x = -1.0 + 2.0 * j / steps;
      double v = eval(c00, n_x);
      if (v > best.value) {
        best.value = v;
        best.c00 = c00;
        best.n_x = n_x;
      }
    }
    if (cmax < 1e-15) break;
  }

  // coordinate golden-section polish
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double span_c = cmax / steps * 4.0 + 1e-12;
  double span_n = 2.0 / steps * 4.0 + 1e-12;
  for (int round = 0; round < 60; ++round) {
    for (int coord = 0; coord < 2; ++coord) {
      double span = coord == 0 ? span_c : span_n;
      double lim = coord == 0 ? cmax : 1.0;
      double center = coord == 0 ? best.c00 : best.n_x;
      double lo = std::max(-lim, center - span);
      double hi = std::min(lim, center + span);
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = coord == 0 ? eval(x1, best.n_x) : eval(best.c00, x1);
      double f2 = coord == 0 ? eval(x2, best.n_x) : eval(best.c00, x2);
      for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = coord == 0 ? eval(x2, best.n_x) : eval(best.c00, x2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = coord == 0 ? eval(x1, best.n_x) : eval(best.c00, x1);
        }
      }
      double xm = 0.5 * (lo + hi);
      double fm = coord == 0 ? eval(xm, best.n_x) : eval(best.c00, xm);
      if (fm > best.value) {
        best.value = fm;
        (coord == 0 ? best.c00 : best.n_x) = xm;
      }
    }
    span_c *= 0.5;
    span_n *= 0.5;
  }
  best.c01 = std::sqrt(std::max(0.0, (1.0 - d_eps - best.c00 * best.c00) / 2.0));
  return best;
}

BoundPoint optimize_pwin(ResourceKind family, double d_eps, const SeesawOptions& opts) {
  if (d_eps < 0.0 || d_eps > 1.0) throw std::invalid_argument("optimize_pwin: d_eps out of [0,1]");

  BoundPoint point;
  point.d_eps = d_eps;

  if (family == ResourceKind::entangled_coherent) {
    SeesawRun run = multistart_seesaw([&](Rng& r) { return random_state(r, d_eps); }, true, d_eps,
                                      opts);
    ParamOptimum param = optimize_param_family(d_eps);
    point.has_params = true;
    point.c00 = param.c00;
    point.c01 = param.c01;
    point.n_x = param.n_x;
    if (param.value > run.value) {
      point.value = param.value;
      point.argmax = game::param_strategy(param.c00, param.c01, d_eps, param.n_x);
      point.method = "grid";
    } else {
      point.value = run.value;
      point.argmax = run.strategy;
      point.method = "seesaw";
    }
    double sd = game::single_detection_prob(point.argmax.rho, 1);
    point.saturated = std::abs(sd - d_eps) <= 1e-4;
    if (!point.saturated)
      throw std::logic_error("optimize_pwin: optimizer does not saturate the detection cap");
    return point;
  }

  // fixed-state families: optimize the measurements only
  DensityMatrix state = game::resource_state({family, d_eps});
  SeesawRun run = multistart_seesaw([&](Rng&) { return state; }, false, d_eps, opts);
  point.value = run.value;
  point.argmax = run.strategy;
  point.method = "seesaw";
  point.saturated = std::abs(game::single_detection_prob(state, 1) - d_eps) <= 1e-9;
  return point;
}

// ---- printed stationarity system -------------------------------------------

namespace {

double poly_a3(double n, double d) {
  double n2 = n * n;
  double bracket = 4.0 + 28.0 * d + (12.0 + 24.0 * d) * n2 + (13.0 + 4.0 * d) * n2 * n2 +
                   6.0 * n2 * n2 * n2 + n2 * n2 * n2 * n2;
  return n * bracket;
}

double poly_a4(double n, double d) {
  double n2 = n * n;
  return 4.0 - 4.0 * d + (12.0 - 20.0 * d) * n2 + (13.0 - 14.0 * d) * n2 * n2 +
         (6.0 - 2.0 * d) * n2 * n2 * n2 + n2 * n2 * n2 * n2;
}

std::vector<double> scan_roots(const std::function<double(double)>& f) {
  std::vector<double> roots;
  const int steps = 20000;  // 1e-4 grid over [-1, 1]
  double prev_x = -1.0, prev_f = f(prev_x);
  for (int i = 1; i <= steps; ++i) {
    double x = -1.0 + 2.0 * i / steps;
    double fx = f(x);
    if (prev_f == 0.0) roots.push_back(prev_x);
    if (prev_f * fx < 0.0) {
      double lo = prev_x, hi = x, flo = prev_f;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (flo * fm < 0.0)
          hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_f = fx;
  }
  if (prev_f == 0.0) roots.push_back(prev_x);
  // dedupe
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-10; }),
              roots.end());
  return roots;
}

}  // namespace

AppendixAResult analytic_appendix_a(double d_eps) {
  if (d_eps < 0.0 || d_eps > 1.0)
    throw std::invalid_argument("analytic_appendix_a: d_eps out of [0,1]");
  AppendixAResult res;
  res.d_eps = d_eps;

  auto f3 = [&](double n) { return poly_a3(n, d_eps); };
  auto f4 = [&](double n) { return poly_a4(n, d_eps); };
  std::vector<double> roots3 = scan_roots(f3);
  std::vector<double> roots4 = scan_roots(f4);

  std::vector<double> common;
  for (double r : roots4)
    if (std::abs(poly_a3(r, d_eps)) <= 1e-8) common.push_back(r);
  for (double r : roots3)
    if (std::abs(poly_a4(r, d_eps)) <= 1e-8) common.push_back(r);
  std::sort(common.begin(), common.end());
  common.erase(std::unique(common.begin(), common.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               common.end());

  double rd = std::sqrt(d_eps);
  for (double n : common) {
    AppendixASolution sol;
    sol.n_x = n;
    double n2 = n * n;
    sol.c00 = -rd * n2 / (2.0 + n2);
    sol.c01 = rd * n * std::sqrt(std::max(0.0, 1.0 - n2)) / (1.0 + n2);
    sol.x_of_deps = sol.c00 * sol.c00;
    sol.pwin = game::pwin_param(sol.c00, sol.c01, d_eps, n);
    int k = 0;
    for (int s0 : {+1, -1})
      for (int s1 : {+1, -1})
        sol.variant_pwin[k++] = game::pwin_param(s0 * sol.c00, s1 * sol.c01, d_eps, n);
    res.solutions.push_back(sol);
  }
  return res;
}

std::vector<std::pair<double, double>> entanglement_entropy_curve(
    const std::vector<double>& d_eps_grid, const SeesawOptions& opts) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(d_eps_grid.size());
  for (double d : d_eps_grid) {
    BoundPoint p = optimize_pwin(ResourceKind::entangled_coherent, d, opts);
    DensityMatrix pure =
        game::resource_state({ResourceKind::entangled_coherent, d, p.c00, p.c01});
    DensityMatrix marginal = partial_trace(pure, 2, 2, Keep::A);
    curve.emplace_back(d, von_neumann_entropy(marginal));
  }
  return curve;
}

// ---- guessing probability ---------------------------------------------------

namespace {

struct GuessContext {
  double d_eps;
  ComplexMatrix guess_op;           // D_{alpha'|1} (x) I
  std::vector<Strategy> pool;       // accumulated candidate strategies
  double best_feasible = -1.0;      // guessing value of the best feasible one
};

double lagrangian_value(const Strategy& s, const GuessContext& ctx, double l1, double l2) {
  return real_inner(ctx.guess_op, s.rho.mat()) + l1 * game::pwin(s) -
         l2 * game::single_detection_prob(s.rho, 1);
}

// See-saw on the Lagrangian from a given start; the state step is an SDP
// with the trace constraint only.
Strategy lagrangian_seesaw(Strategy s, const GuessContext& ctx, double l1, double l2,
                           double tolerance, int max_iters) {
  double value = lagrangian_value(s, ctx, l1, l2);
  for (int it = 0; it < max_iters; ++it) {
    double before = value;
    ComplexMatrix c = ctx.guess_op;
    if (l1 > 0.0) {
      ComplexMatrix cw = game::pwin_objective(s.povm_a, s.povm_b);
      cw *= cplx(l1, 0.0);
      c += cw;
    }
    ComplexMatrix cap = e44();
    cap *= cplx(-l2, 0.0);
    c += cap;
    sdp::SdpProblem p;
    p.objective = c.hermitized();
    p.equalities.push_back({ComplexMatrix::identity(4), 1.0});
    sdp::SdpSolution sol = sdp::solve(p);
    if (sol.status != sdp::SdpStatus::optimal)
      throw std::runtime_error("guessing: SDP did not converge");
    ComplexMatrix x = sol.x;
    x *= cplx(1.0, 0.0) / x.trace();
    s.rho = DensityMatrix(x.hermitized());
    if (l1 > 0.0) {
      auto [fa0, fa1] = effective_ops(s.rho, s.povm_b, true);
      s.povm_a = best_povm(fa0, fa1);
      auto [fb0, fb1] = effective_ops(s.rho, s.povm_a, false);
      s.povm_b = best_povm(fb0, fb1);
    }
    value = lagrangian_value(s, ctx, l1, l2);
    if (value < before - kSeesawMonotoneSlack * (1.0 + l1 + l2))
      throw std::logic_error("guessing: Lagrangian decreased");
    if (value - before < tolerance) break;
  }
  return s;
}

// Evaluates the dual function at (l1, l2): maximize the Lagrangian over
// strategies (warm starts plus a fresh random one) and record any feasible
// strategy found along the way.
double dual_value(GuessContext& ctx, double target, double l1, double l2,
                  const GuessingOptions& opts, Rng& rng) {
  std::vector<Strategy> starts;
  // strongest pool members first
  std::vector<std::pair<double, size_t>> ranked;
  for (size_t i = 0; i < ctx.pool.size(); ++i)
    ranked.emplace_back(lagrangian_value(ctx.pool[i], ctx, l1, l2), i);
  std::sort(ranked.rbegin(), ranked.rend());
  for (int k = 0; k < opts.warm_starts && k < static_cast<int>(ranked.size()); ++k)
    starts.push_back(ctx.pool[ranked[k].second]);
  Rng r = rng.derive(static_cast<uint64_t>(l1 * 4096.0) * 65537 +
                     static_cast<uint64_t>(l2 * 4096.0));
  starts.push_back(Strategy{random_state(r, ctx.d_eps), random_real_projective(r),
                            random_real_projective(r)});

  double best = -1e100;
  for (auto& s0 : starts) {
    Strategy s = lagrangian_seesaw(s0, ctx, l1, l2, 1e-9, 200);
    double lv = lagrangian_value(s, ctx, l1, l2);
    if (lv > best) best = lv;
    double pw = game::pwin(s);
    double sd = game::single_detection_prob(s.rho, 1);
    if (pw >= target - 1e-9 && sd <= ctx.d_eps + 1e-9) {
      double g = std::clamp(real_inner(ctx.guess_op, s.rho.mat()), 0.0, 1.0);
      ctx.best_feasible = std::max(ctx.best_feasible, g);
      if (ctx.pool.size() < 96) ctx.pool.push_back(s);
    } else if (ctx.pool.size() < 64) {
      ctx.pool.push_back(s);
    }
  }
  return best - l1 * target + l2 * ctx.d_eps;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  double best = std::min(f1, f2);
  for (int it = 0; it < iters; ++it) {
    if (f1 > f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    }
    best = std::min({best, f1, f2});
  }
  return best;
}

// Deterministic feasible seeds: the reduced-family optimum, the
// mirror-separable state (Alice always holds the photon), and the diagonal
// mixture. Their measurements are refined by the exact alternating update.
void seed_candidates(GuessContext& ctx, double target, const ParamOptimum& param) {
  auto polish_measurements = [&](DensityMatrix state) {
    Strategy s{state, game::equatorial_measurement(0.0), game::equatorial_measurement(0.0)};
    double v = game::pwin(s);
    for (int it = 0; it < 200; ++it) {
      auto [fa0, fa1] = effective_ops(s.rho, s.povm_b, true);
      s.povm_a = best_povm(fa0, fa1);
      auto [fb0, fb1] = effective_ops(s.rho, s.povm_a, false);
      s.povm_b = best_povm(fb0, fb1);
      double v2 = game::pwin(s);
      if (v2 - v < 1e-12) break;
      v = v2;
    }
    return s;
  };

  std::vector<Strategy> seeds;
  seeds.push_back(game::param_strategy(param.c00, param.c01, ctx.d_eps, param.n_x));
  double a1 = std::sqrt(std::max(0.0, 1.0 - ctx.d_eps));
  DensityMatrix mirror = DensityMatrix::from_pure({0.0, 0.0, a1, std::sqrt(ctx.d_eps)});
  seeds.push_back(polish_measurements(mirror));
  seeds.push_back(polish_measurements(
      game::resource_state({ResourceKind::mixed_non_coherent, ctx.d_eps})));

  for (auto& s : seeds) {
    double pw = game::pwin(s);
    double sd = game::single_detection_prob(s.rho, 1);
    if (pw >= target - 1e-9 && sd <= ctx.d_eps + 1e-9) {
      double g = std::clamp(real_inner(ctx.guess_op, s.rho.mat()), 0.0, 1.0);
      ctx.best_feasible = std::max(ctx.best_feasible, g);
    }
    ctx.pool.push_back(s);
  }
}

double guess_one_outcome(int alpha, double pwin_target, double d_eps,
                         const GuessingOptions& opts, const ParamOptimum& param,
                         std::vector<Strategy>* shared_pool) {
  GuessContext ctx;
  ctx.d_eps = d_eps;
  ctx.guess_op = game::guessing_objective(alpha);
  if (shared_pool) ctx.pool = *shared_pool;
  seed_candidates(ctx, pwin_target, param);
  // re-evaluate inherited pool members against this target
  for (const Strategy& s : ctx.pool) {
    double pw = game::pwin(s);
    double sd = game::single_detection_prob(s.rho, 1);
    if (pw >= pwin_target - 1e-9 && sd <= d_eps + 1e-9)
      ctx.best_feasible =
          std::max(ctx.best_feasible, std::clamp(real_inner(ctx.guess_op, s.rho.mat()), 0.0, 1.0));
  }

  Rng rng(opts.seesaw.seed);
  Rng stream = rng.derive(alpha ? "guess1" : "guess0");
  auto inner = [&](double l1) {
    return golden_min([&](double l2) { return dual_value(ctx, pwin_target, l1, l2, opts, stream); },
                      0.0, opts.lambda_max, opts.golden_iters);
  };
  golden_min(inner, 0.0, opts.lambda_max, opts.golden_iters);

  if (shared_pool) {
    *shared_pool = ctx.pool;
    if (shared_pool->size() > 48) shared_pool->resize(48);
  }
  return ctx.best_feasible;
}

}  // namespace

GuessingPoint guessing_probability(double pwin_target, double d_eps, const GuessingOptions& opts,
                                   std::optional<double> known_bound) {
  if (d_eps < 0.0 || d_eps > 1.0)
    throw std::invalid_argument("guessing_probability: d_eps out of [0,1]");
  double bound = known_bound
                     ? *known_bound
                     : optimize_pwin(ResourceKind::entangled_coherent, d_eps, opts.seesaw).value;
  if (pwin_target > bound + 1e-9)
    throw std::invalid_argument("guessing_probability: target exceeds the optimal value");

  ParamOptimum param = optimize_param_family(d_eps);
  double g1 = guess_one_outcome(1, pwin_target, d_eps, opts, param, nullptr);
  double g0 = guess_one_outcome(0, pwin_target, d_eps, opts, param, nullptr);
  GuessingPoint pt;
  pt.d_eps = d_eps;
  pt.pwin_target = pwin_target;
  pt.p_guess = std::clamp(std::max(g0, g1), 0.5, 1.0);
  pt.h_min = -std::log2(pt.p_guess);
  if (pt.h_min < 0.0) pt.h_min = 0.0;
  return pt;
}

std::vector<GuessingPoint> guessing_curve(double d_eps, const std::vector<double>& targets,
                                          const GuessingOptions& opts,
                                          std::optional<double> known_bound) {
  double bound = known_bound
                     ? *known_bound
                     : optimize_pwin(ResourceKind::entangled_coherent, d_eps, opts.seesaw).value;
  ParamOptimum param = optimize_param_family(d_eps);

  std::vector<size_t> order(targets.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return targets[a] > targets[b]; });

  std::vector<GuessingPoint> out(targets.size());
  std::vector<Strategy> pool1, pool0;
  double floor1 = -1.0, floor0 = -1.0;  // feasible sets only grow as targets drop
  for (size_t idx : order) {
    double target = targets[idx];
    if (target > bound + 1e-9)
      throw std::invalid_argument("guessing_curve: target exceeds the optimal value");
    double g1 = guess_one_outcome(1, target, d_eps, opts, param, &pool1);
    double g0 = guess_one_outcome(0, target, d_eps, opts, param, &pool0);
    floor1 = std::max(floor1, g1);
    floor0 = std::max(floor0, g0);
    GuessingPoint pt;
    pt.d_eps = d_eps;
    pt.pwin_target = target;
    pt.p_guess = std::clamp(std::max(floor0, floor1), 0.5, 1.0);
    pt.h_min = std::max(0.0, -std::log2(pt.p_guess));
    out[idx] = pt;
  }
  return out;
}

// ---- h_min surface ----------------------------------------------------------

HminSurface::HminSurface(std::vector<double> pwin_nodes, std::vector<double> deps_nodes,
                         std::vector<GuessingPoint> points)
    : pwin_nodes_(std::move(pwin_nodes)),
      deps_nodes_(std::move(deps_nodes)),
      points_(std::move(points)) {
  if (pwin_nodes_.size() < 5 || deps_nodes_.size() < 5)
    throw std::invalid_argument("HminSurface: grid too sparse (need >= 5 points per axis)");
  if (points_.size() != pwin_nodes_.size() * deps_nodes_.size())
    throw std::invalid_argument("HminSurface: node/point count mismatch");
}

HminSurface HminSurface::from_points(std::vector<GuessingPoint> points) {
  auto axis = [](std::vector<double> vals) {
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               vals.end());
    return vals;
  };
  std::vector<double> ps, ds;
  ps.reserve(points.size());
  ds.reserve(points.size());
  for (const auto& p : points) {
    ps.push_back(p.pwin_target);
    ds.push_back(p.d_eps);
  }
  HminSurface s;
  s.pwin_nodes_ = axis(ps);
  s.deps_nodes_ = axis(ds);
  if (s.pwin_nodes_.size() < 5 || s.deps_nodes_.size() < 5)
    throw std::invalid_argument("HminSurface: grid too sparse (need >= 5 points per axis)");
  s.points_ = std::move(points);
  return s;
}

double HminSurface::eval(double pwin, double d_eps) const {
  // Dual form of the greatest monotone convex minorant: minimize the average
  // value over convex combinations whose mean dominates the query (>= in
  // pwin, <= in d_eps). A basic solution touches at most three nodes.
  const size_t n = points_.size();
  double best = std::numeric_limits<double>::infinity();

  auto value = [&](size_t i) { return points_[i].h_min; };
  auto pw = [&](size_t i) { return points_[i].pwin_target; };
  auto de = [&](size_t i) { return points_[i].d_eps; };

  for (size_t i = 0; i < n; ++i)
    if (pw(i) >= pwin - 1e-12 && de(i) <= d_eps + 1e-12) best = std::min(best, value(i));

  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      // pwin constraint active
      double dp = pw(i) - pw(j);
      if (std::abs(dp) > 1e-14) {
        double w = (pwin - pw(j)) / dp;
        if (w >= -1e-12 && w <= 1.0 + 1e-12) {
          w = std::clamp(w, 0.0, 1.0);
          double dmix = w * de(i) + (1.0 - w) * de(j);
          if (dmix <= d_eps + 1e-12) best = std::min(best, w * value(i) + (1.0 - w) * value(j));
        }
      }
      // d_eps constraint active
      double dd = de(i) - de(j);
      if (std::abs(dd) > 1e-14) {
        double w = (d_eps - de(j)) / dd;
        if (w >= -1e-12 && w <= 1.0 + 1e-12) {
          w = std::clamp(w, 0.0, 1.0);
          double pmix = w * pw(i) + (1.0 - w) * pw(j);
          if (pmix >= pwin - 1e-12) best = std::min(best, w * value(i) + (1.0 - w) * value(j));
        }
      }
    }

  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      for (size_t k = j + 1; k < n; ++k) {
        // both constraints active: solve for barycentric weights
        double a11 = pw(i) - pw(k), a12 = pw(j) - pw(k);
        double a21 = de(i) - de(k), a22 = de(j) - de(k);
        double det = a11 * a22 - a12 * a21;
        if (std::abs(det) < 1e-12) continue;
        double r1 = pwin - pw(k), r2 = d_eps - de(k);
        double wi = (r1 * a22 - a12 * r2) / det;
        double wj = (a11 * r2 - r1 * a21) / det;
        double wk = 1.0 - wi - wj;
        if (wi < -1e-10 || wj < -1e-10 || wk < -1e-10) continue;
        best = std::min(best, std::max(0.0, wi) * value(i) + std::max(0.0, wj) * value(j) +
                                  std::max(0.0, wk) * value(k));
      }

  if (!std::isfinite(best)) throw std::domain_error("HminSurface: query outside certified domain");
  return std::max(0.0, best);
}

HminSurface build_hmin_surface(const std::vector<double>& pwin_nodes,
                               const std::vector<double>& deps_nodes,
                               const GuessingOptions& opts) {
  if (pwin_nodes.size() < 5 || deps_nodes.size() < 5)
    throw std::invalid_argument("build_hmin_surface: grid too sparse (need >= 5 per axis)");
  std::vector<GuessingPoint> pts(pwin_nodes.size() * deps_nodes.size());
  for (size_t dj = 0; dj < deps_nodes.size(); ++dj) {
    double d = deps_nodes[dj];
    double bound = optimize_pwin(ResourceKind::entangled_coherent, d, opts.seesaw).value;
    std::vector<double> targets = pwin_nodes;
    for (double& t : targets) t = std::min(t, bound);  // conservative clamp at the boundary
    std::vector<GuessingPoint> col = guessing_curve(d, targets, opts, bound);
    for (size_t pi = 0; pi < pwin_nodes.size(); ++pi) {
      GuessingPoint pt = col[pi];
      pt.pwin_target = pwin_nodes[pi];  // node coordinate; value is a lower bound there
      pts[dj * pwin_nodes.size() + pi] = pt;
    }
  }
  return HminSurface(pwin_nodes, deps_nodes, std::move(pts));
}

// ---- brute-force oracle -----------------------------------------------------

GridOracleResult grid_oracle(double d_eps, double resolution) {
  if (d_eps < 0.0 || d_eps > 1.0) throw std::invalid_argument("grid_oracle: d_eps out of [0,1]");
  double rd = std::sqrt(d_eps);
  double cmax = std::sqrt(std::max(0.0, 1.0 - d_eps));

  // measurement directions (n_x, n_z) at both hemisphere signs
  std::vector<std::pair<double, double>> dirs;
  int msteps = static_cast<int>(std::round(2.0 / resolution));
  dirs.reserve(2 * (msteps + 1));
  for (int i = 0; i <= msteps; ++i) {
    double nx = -1.0 + 2.0 * i / msteps;
    double nz = std::sqrt(std::max(0.0, 1.0 - nx * nx));
    dirs.emplace_back(nx, nz);
    if (nz > 1e-12) dirs.emplace_back(nx, -nz);
  }

  GridOracleResult best;
  best.value = -1.0;
  int csteps = std::max(1, static_cast<int>(std::round(2.0 * cmax / resolution)));
  std::vector<double> alpha(dirs.size()), beta(dirs.size());
  for (int ci = 0; ci <= csteps; ++ci) {
    double c00 = cmax < 1e-15 ? 0.0 : -cmax + 2.0 * cmax * ci / csteps;
    for (int sign = 0; sign < 2; ++sign) {
      double c01 = std::sqrt(std::max(0.0, (1.0 - d_eps - c00 * c00) / 2.0));
      if (sign == 1) {
        if (c01 < 1e-15) break;
        c01 = -c01;
      }
      // winning value = 1/2 + (nA . K nB)/8 with correlation coefficients K
      double k_xx = 2.0 * (c00 * rd + c01 * c01);
      double k_xz = -4.0 * c01 * rd;
      double k_zz = 4.0 * d_eps;
      for (size_t j = 0; j < dirs.size(); ++j) {
        alpha[j] = dirs[j].first * k_xx + dirs[j].second * k_xz;
        beta[j] = dirs[j].first * k_xz + dirs[j].second * k_zz;
      }
      for (size_t i = 0; i < dirs.size(); ++i) {
        double nax = dirs[i].first, naz = dirs[i].second;
        double q = -1e100;
        size_t arg = 0;
        for (size_t j = 0; j < dirs.size(); ++j) {
          double v = nax * alpha[j] + naz * beta[j];
          if (v > q) {
            q = v;
            arg = j;
          }
        }
        double p = 0.5 + q / 8.0;
        if (p > best.value) {
          best.value = p;
          best.c00 = c00;
          best.c01 = c01;
          best.n_xa = nax;
          best.n_xb = dirs[arg].first;
        }
      }
    }
    if (cmax < 1e-15) break;
  }
  return best;
}

}  // namespace cekit::bounds
