#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cekit/qmat.hpp"

namespace cekit::game {

// Detection inputs: 0 = pass the system through, 1 = block and detect.
struct DetectionSetting {
  int x = 0;
  int y = 0;
};

// Vacuum / non-vacuum discrimination for a lab holding up to d photons
// (a d+1 dimensional occupation space). Outcome 0 is the vacuum projector,
// outcome 1 collects every occupied level.
Povm detection_povm(int d);

// The no-detection action: identity normalized over the d+1 levels.
ComplexMatrix pass_operator(int d);

struct Strategy {
  // Trivial placeholder: vacuum state with the {I, 0} measurement.
  Strategy();
  Strategy(DensityMatrix rho_, Povm povm_a_, Povm povm_b_)
      : rho(std::move(rho_)), povm_a(std::move(povm_a_)), povm_b(std::move(povm_b_)) {}

  DensityMatrix rho;  // (d+1)^2-dimensional bipartite state
  Povm povm_a;        // two outcomes, labels {0, 1}
  Povm povm_b;
};

// State forwarded to the servers for setting (x, y): blocked arms are
// replaced by the vacuum, passed arms keep their marginal.
//   rho_00 = rho
//   rho_01 = Tr_B(rho) (x) |0><0|
//   rho_10 = |0><0| (x) Tr_A(rho)
//   rho_11 = |0><0| (x) |0><0|
DensityMatrix transform_state(const DensityMatrix& rho, DetectionSetting s, int d);

// Winning probability (1/4) sum_{x,y} sum_{a xor b = x xor y} Tr[rho_xy A_a (x) B_b].
double pwin(const Strategy& s, int d = 1);

// Hermitian C with pwin(rho; A, B) = Tr(rho C) for the fixed measurements.
ComplexMatrix pwin_objective(const Povm& povm_a, const Povm& povm_b, int d = 1);

// Closed-form winning probability for the reduced two-qubit family: state
// c00|00> + c01(|01> + |10>) + sqrt(d_eps)|11> with both servers measuring
// along the Bloch vector (n_x, 0, sqrt(1 - n_x^2)). Requires
// c00^2 + 2 c01^2 = 1 - d_eps.
double pwin_param(double c00, double c01, double d_eps, double n_x);

// Probability that both labs would see a non-vacuum outcome when both block:
// Tr[rho D_{1|1} (x) D_{1|1}]. Computed both operationally and as the sum of
// the flagged diagonal entries; the two agree to 1e-12 by construction.
double single_detection_prob(const DensityMatrix& rho, int d);

// 1-indexed diagonal positions counted by the single-detection constraint:
// the union of [alpha(d+1)+2, (alpha+1)(d+1)] for alpha in 1..d. For d = 1
// this is just {4}, the |11><11| entry.
std::vector<int> single_detection_indices(int d);

enum class ResourceKind { entangled_coherent, separable_coherent, mixed_non_coherent };

std::string to_string(ResourceKind k);
ResourceKind resource_kind_from_string(const std::string& name);

struct ResourceFamily {
  ResourceKind kind;
  double d_eps = 0.0;
  // Free amplitudes of the entangled coherent family; must satisfy
  // c00^2 + 2 c01^2 = 1 - d_eps. Ignored by the other families.
  double c00 = 0.0;
  double c01 = 0.0;
};

// The two-qubit state of the family; single_detection_prob equals d_eps for
// all three kinds.
DensityMatrix resource_state(const ResourceFamily& f);

// Rank-1 projectors (1/2)(I +- (n_x X + sqrt(1-n_x^2) Z)); outcome 0 takes
// the + sign.
Povm equatorial_measurement(double n_x);

// Strategy assembled from the reduced family: resource state plus the shared
// equatorial measurement. pwin of this strategy equals pwin_param.
Strategy param_strategy(double c00, double c01, double d_eps, double n_x);

// D_{alpha|1} (x) I on the A side; the objective for guessing Alice's
// detection outcome.
ComplexMatrix guessing_objective(int alpha, int d = 1);

}  // namespace cekit::game
