#pragma once

#include <string>
#include <vector>

#include "cekit/qmat.hpp"

namespace cekit::sdp {

// One linear trace constraint Tr(a X) (= | <=) rhs; a must be Hermitian.
struct Constraint {
  ComplexMatrix a;
  double rhs;
};

// maximize Tr(C X)  s.t.  Tr(A_i X) = b_i,  Tr(G_j X) <= g_j,  X >= 0.
// The normalization constraint Tr X = 1 must be among the equalities and the
// problem must be strictly feasible.
struct SdpProblem {
  ComplexMatrix objective;
  std::vector<Constraint> equalities;
  std::vector<Constraint> inequalities;
};

enum class SdpStatus { optimal, max_iter, infeasible };

std::string to_string(SdpStatus s);

struct SdpSolution {
  ComplexMatrix x;                 // Hermitian, PSD within tol::psd
  double primal_value = 0.0;       // Tr(C x)
  double dual_value = 0.0;         // upper bound when optimal
  double gap = 0.0;                // |dual - primal| scaled complementarity
  SdpStatus status = SdpStatus::max_iter;
  std::vector<double> eq_duals;    // free multipliers y_i
  std::vector<double> ineq_duals;  // multipliers z_j >= 0
  int iterations = 0;
};

struct SdpOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
};

// Primal-dual interior point with Nesterov-Todd scaling. The complex n x n
// Hermitian variable is embedded as a real symmetric 2n x 2n matrix;
// inequalities are absorbed as diagonal slack coordinates of the same PSD
// variable, which keeps a single cone code path.
SdpSolution solve(const SdpProblem& p, const SdpOptions& opts = {});

struct KktReport {
  double primal_eq_residual = 0.0;     // max_i |Tr(A_i X) - b_i|
  double primal_ineq_violation = 0.0;  // max_j max(0, Tr(G_j X) - g_j)
  double x_min_eigenvalue = 0.0;
  double dual_psd_violation = 0.0;     // negative part of S = sum y A + sum z G - C
  double dual_sign_violation = 0.0;    // max_j max(0, -z_j)
  double complementary_slackness = 0.0;

  double max_residual() const;
};

// Recomputes all optimality residuals from (X, multipliers); never throws.
KktReport verify_kkt(const SdpProblem& p, const SdpSolution& s);

}  // namespace cekit::sdp
