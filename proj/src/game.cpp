#include "cekit/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cekit::game {

namespace {

ComplexMatrix basis_projector(int dim, int k) {
  ComplexMatrix m(dim, dim);
  m(k, k) = 1.0;
  return m;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Strategy::Strategy()
    : rho(DensityMatrix::from_pure({1.0, 0.0, 0.0, 0.0})),
      povm_a(2, {ComplexMatrix::identity(2), ComplexMatrix::zero(2, 2)}),
      povm_b(2, {ComplexMatrix::identity(2), ComplexMatrix::zero(2, 2)}) {}

Povm detection_povm(int d) {
  require(d >= 1, "detection_povm: d must be >= 1");
  int dim = d + 1;
  ComplexMatrix vac = basis_projector(dim, 0);
  ComplexMatrix occ(dim, dim);
  for (int i = 1; i <= d; ++i) occ(i, i) = 1.0;
  return Povm(dim, {vac, occ});
}

ComplexMatrix pass_operator(int d) {
  require(d >= 1, "pass_operator: d must be >= 1");
  ComplexMatrix m = ComplexMatrix::identity(d + 1);
  m *= cplx(1.0 / (d + 1), 0.0);
  return m;
}

DensityMatrix transform_state(const DensityMatrix& rho, DetectionSetting s, int d) {
  int dim = d + 1;
  require(rho.dim() == dim * dim, "transform_state: state dimension mismatch");
  ComplexMatrix vac = basis_projector(dim, 0);
  if (s.x == 0 && s.y == 0) return rho;
  if (s.x == 0 && s.y == 1)
    return DensityMatrix(kron(partial_trace(rho.mat(), dim, dim, Keep::A), vac));
  if (s.x == 1 && s.y == 0)
    return DensityMatrix(kron(vac, partial_trace(rho.mat(), dim, dim, Keep::B)));
  return DensityMatrix(kron(vac, vac));
}

double pwin(const Strategy& s, int d) {
  int dim = d + 1;
  require(s.rho.dim() == dim * dim && s.povm_a.dim() == dim && s.povm_b.dim() == dim,
          "pwin: dimension mismatch");
  double total = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      DensityMatrix rho_xy = transform_state(s.rho, {x, y}, d);
      auto table = born_probabilities(rho_xy, s.povm_a, s.povm_b);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (((a ^ b) & 1) == ((x ^ y) & 1)) total += table[a][b];
    }
  double p = total / 4.0;
  if (p < -1e-12 || p > 1.0 + 1e-12) throw std::logic_error("pwin: out of range");
  return std::clamp(p, 0.0, 1.0);
}

ComplexMatrix pwin_objective(const Povm& povm_a, const Povm& povm_b, int d) {
  int dim = d + 1;
  require(povm_a.dim() == dim && povm_b.dim() == dim, "pwin_objective: dimension mismatch");
  int big = dim * dim;

  // Kraus operators of the four forwarding channels; the adjoint channel
  // pulls the server operators back onto the source state.
  ComplexMatrix id = ComplexMatrix::identity(dim);
  auto ket_bra = [&](int i, int j) {
    ComplexMatrix m(dim, dim);
    m(i, j) = 1.0;
    return m;
  };

  ComplexMatrix c(big, big);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      ComplexMatrix win_op(big, big);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (((a ^ b) & 1) == ((x ^ y) & 1))
            win_op += kron(povm_a.element(a), povm_b.element(b));

      std::vector<ComplexMatrix> kraus;
      if (x == 0 && y == 0) {
        kraus.push_back(ComplexMatrix::identity(big));
      } else if (x == 0 && y == 1) {
        for (int k = 0; k < dim; ++k) kraus.push_back(kron(id, ket_bra(0, k)));
      } else if (x == 1 && y == 0) {
        for (int k = 0; k < dim; ++k) kraus.push_back(kron(ket_bra(0, k), id));
      } else {
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l) kraus.push_back(kron(ket_bra(0, k), ket_bra(0, l)));
      }
      for (const auto& kr : kraus) c += kr.adjoint() * win_op * kr;
    }
  c *= cplx(0.25, 0.0);
  return c.hermitized();
}

double pwin_param(double c00, double c01, double d_eps, double n_x) {
  require(d_eps >= 0.0 && d_eps <= 1.0, "pwin_param: d_eps out of [0,1]");
  require(std::abs(n_x) <= 1.0, "pwin_param: |n_x| must be <= 1");
  require(std::abs(c00 * c00 + 2.0 * c01 * c01 - (1.0 - d_eps)) <= 1e-9,
          "pwin_param: amplitudes violate c00^2 + 2 c01^2 = 1 - d_eps");
  double rd = std::sqrt(d_eps);
  double nz = std::sqrt(std::max(0.0, 1.0 - n_x * n_x));
  double n2 = n_x * n_x;
  return (2.0 * c00 * rd * n2 - 8.0 * c01 * rd * n_x * nz - (1.0 + 3.0 * d_eps) * (n2 - 2.0) +
          4.0 * c01 * c01 * (1.0 + n2) + c00 * c00 * (2.0 + n2)) /
         8.0;
}

std::vector<int> single_detection_indices(int d) {
  std::vector<int> idx;
  for (int alpha = 1; alpha <= d; ++alpha)
    for (int i = alpha * (d + 1) + 2; i <= (alpha + 1) * (d + 1); ++i) idx.push_back(i);
  return idx;
}

double single_detection_prob(const DensityMatrix& rho, int d) {
  int dim = d + 1;
  require(rho.dim() == dim * dim, "single_detection_prob: dimension mismatch");

  Povm det = detection_povm(d);
  double operational = real_inner(kron(det.element(1), det.element(1)), rho.mat());

  double state_form = 0.0;
  for (int i : single_detection_indices(d)) state_form += rho.mat()(i - 1, i - 1).real();

  if (std::abs(operational - state_form) > 1e-12)
    throw std::logic_error("single_detection_prob: operational and state forms disagree");
  return std::clamp(state_form, 0.0, 1.0);
}

std::string to_string(ResourceKind k) {
  switch (k) {
    case ResourceKind::entangled_coherent: return "entangled_coherent";
    case ResourceKind::separable_coherent: return "separable_coherent";
    case ResourceKind::mixed_non_coherent: return "mixed_non_coherent";
  }
  return "unknown";
}

ResourceKind resource_kind_from_string(const std::string& name) {
  if (name == "entangled_coherent" || name == "entangled") return ResourceKind::entangled_coherent;
  if (name == "separable_coherent" || name == "separable") return ResourceKind::separable_coherent;
  if (name == "mixed_non_coherent" || name == "mixed" || name == "non_coherent")
    return ResourceKind::mixed_non_coherent;
  throw std::invalid_argument("unknown resource family: " + name);
}

DensityMatrix resource_state(const ResourceFamily& f) {
  require(f.d_eps >= 0.0 && f.d_eps <= 1.0, "resource_state: d_eps out of [0,1]");
  double rd = std::sqrt(f.d_eps);
  switch (f.kind) {
    case ResourceKind::entangled_coherent: {
      require(std::abs(f.c00 * f.c00 + 2.0 * f.c01 * f.c01 - (1.0 - f.d_eps)) <= tol::trace,
              "resource_state: amplitudes violate c00^2 + 2 c01^2 = 1 - d_eps");
      return DensityMatrix::from_pure({f.c00, f.c01, f.c01, rd});
    }
    case ResourceKind::separable_coherent: {
      // (sqrt(1-d)|0> + sqrt(d)|1>) (x) |1>
      double a0 = std::sqrt(1.0 - f.d_eps);
      return DensityMatrix::from_pure({0.0, a0, 0.0, rd});
    }
    case ResourceKind::mixed_non_coherent: {
      ComplexMatrix m(4, 4);
      m(2, 2) = 1.0 - f.d_eps;
      m(3, 3) = f.d_eps;
      return DensityMatrix(m);
    }
  }
  throw std::invalid_argument("resource_state: unknown kind");
}

Povm equatorial_measurement(double n_x) {
  require(std::abs(n_x) <= 1.0, "equatorial_measurement: |n_x| must be <= 1");
  double nz = std::sqrt(std::max(0.0, 1.0 - n_x * n_x));
  ComplexMatrix plus = ComplexMatrix::from_rows(
      {{0.5 * (1.0 + nz), 0.5 * n_x}, {0.5 * n_x, 0.5 * (1.0 - nz)}});
  ComplexMatrix minus = ComplexMatrix::from_rows(
      {{0.5 * (1.0 - nz), -0.5 * n_x}, {-0.5 * n_x, 0.5 * (1.0 + nz)}});
  return Povm(2, {plus, minus});
}

Strategy param_strategy(double c00, double c01, double d_eps, double n_x) {
  ResourceFamily f{ResourceKind::entangled_coherent, d_eps, c00, c01};
  Povm m = equatorial_measurement(n_x);
  return Strategy{resource_state(f), m, m};
}

ComplexMatrix guessing_objective(int alpha, int d) {
  require(alpha == 0 || alpha == 1, "guessing_objective: alpha must be 0 or 1");
  Povm det = detection_povm(d);
  return kron(det.element(alpha), ComplexMatrix::identity(d + 1));
}

}  // namespace cekit::game
