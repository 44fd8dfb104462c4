#include "cekit/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cekit::sdp {

namespace {

// ---- dense real symmetric helpers (flat row-major storage) ----------------

using Vec = std::vector<double>;

struct Sym {
  int n = 0;
  Vec a;  // n*n, kept symmetric

  Sym() = default;
  explicit Sym(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}

  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  static Sym identity(int dim) {
    Sym s(dim);
    for (int i = 0; i < dim; ++i) s.at(i, i) = 1.0;
    return s;
  }

  void symmetrize() {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double v = 0.5 * (at(i, j) + at(j, i));
        at(i, j) = v;
        at(j, i) = v;
      }
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
};

double inner(const Sym& x, const Sym& y) {
  double s = 0.0;
  for (size_t k = 0; k < x.a.size(); ++k) s += x.a[k] * y.a[k];
  return s;
}

Sym mul(const Sym& x, const Sym& y) {
  Sym r(x.n);
  const int n = x.n;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double xik = x.at(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < n; ++j) r.at(i, j) += xik * y.at(k, j);
    }
  return r;
}

void axpy(Sym& y, double alpha, const Sym& x) {
  for (size_t k = 0; k < y.a.size(); ++k) y.a[k] += alpha * x.a[k];
}

struct SymEig {
  Vec values;      // ascending
  Sym vectors;     // columns
};

// Cyclic Jacobi for real symmetric matrices.
SymEig sym_eig(Sym m) {
  const int n = m.n;
  Sym v = Sym::identity(n);
  auto off = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += m.at(i, j) * m.at(i, j);
    return std::sqrt(2.0 * s);
  };
  double norm = 0.0;
  for (double x : m.a) norm += x * x;
  const double target = 1e-14 * std::max(1.0, std::sqrt(norm));
  for (int sweep = 0; sweep < 80 && off() > target; ++sweep) {
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        double apq = m.at(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        double tau = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
        double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double mkp = m.at(k, p), mkq = m.at(k, q);
          m.at(k, p) = c * mkp - s * mkq;
          m.at(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          double mpk = m.at(p, k), mqk = m.at(q, k);
          m.at(p, k) = c * mpk - s * mqk;
          m.at(q, k) = s * mpk + c * mqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v.at(k, p), vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
        m.at(p, q) = 0.0;
        m.at(q, p) = 0.0;
      }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return m.at(i, i) < m.at(j, j); });
  SymEig res;
  res.values.resize(n);
  res.vectors = Sym(n);
  for (int j = 0; j < n; ++j) {
    res.values[j] = m.at(order[j], order[j]);
    for (int i = 0; i < n; ++i) res.vectors.at(i, j) = v.at(i, order[j]);
  }
  return res;
}

// V f(diag) V^T from an eigendecomposition.
Sym eig_apply(const SymEig& e, double (*f)(double)) {
  const int n = e.vectors.n;
  Sym r(n);
  for (int k = 0; k < n; ++k) {
    double fk = f(e.values[k]);
    if (fk == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      double vik = fk * e.vectors.at(i, k);
      if (vik == 0.0) continue;
      for (int j = 0; j < n; ++j) r.at(i, j) += vik * e.vectors.at(j, k);
    }
  }
  r.symmetrize();
  return r;
}

double f_sqrt(double x) { return std::sqrt(std::max(x, 1e-300)); }
double f_invsqrt(double x) { return 1.0 / std::sqrt(std::max(x, 1e-300)); }
double f_inv(double x) { return 1.0 / std::max(x, 1e-300); }

// Largest step alpha (capped) keeping X + alpha D >= 0, given X = V L V^T.
double max_step(const SymEig& ex, const Sym& d, double cap) {
  Sym xinv_half = eig_apply(ex, f_invsqrt);
  Sym k = mul(mul(xinv_half, d), xinv_half);
  k.symmetrize();
  SymEig ek = sym_eig(k);
  double lambda_min = ek.values.front();
  if (lambda_min >= -1e-14) return cap;
  return std::min(cap, -1.0 / lambda_min);
}

// Gaussian elimination with partial pivoting; m is small (<= tens).
Vec solve_linear(std::vector<Vec> m, Vec rhs) {
  const int k = static_cast<int>(rhs.size());
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    std::swap(rhs[col], rhs[piv]);
    double d = m[col][col];
    if (std::abs(d) < 1e-300) throw std::runtime_error("sdp: singular Schur complement");
    for (int r = col + 1; r < k; ++r) {
      double f = m[r][col] / d;
      if (f == 0.0) continue;
      for (int c = col; c < k; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  Vec x(k, 0.0);
  for (int r = k - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < k; ++c) s -= m[r][c] * x[c];
    x[r] = s / m[r][r];
  }
  return x;
}

// ---- internal solver: min <C,Z> s.t. <A_i,Z> = b_i, Z >= 0 ----------------

struct Internal {
  int n = 0;
  Sym c;
  std::vector<Sym> a;
  Vec b;
};

struct InternalResult {
  Sym z, s;
  Vec y;
  SdpStatus status = SdpStatus::max_iter;
  int iterations = 0;
};

InternalResult solve_internal(const Internal& prob, const SdpOptions& opts) {
  const int n = prob.n;
  const int m = static_cast<int>(prob.a.size());
  const double tol = opts.tolerance;

  InternalResult res;
  res.z = Sym::identity(n);
  res.s = Sym::identity(n);
  double cscale = 1.0 + prob.c.max_abs();
  for (int i = 0; i < n; ++i) res.s.at(i, i) = cscale;
  res.y.assign(m, 0.0);

  double bscale = 1.0;
  for (double v : prob.b) bscale = std::max(bscale, std::abs(v));

  int stalls = 0;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    res.iterations = iter + 1;
    Sym& z = res.z;
    Sym& s = res.s;

    // residuals
    Vec rp(m);
    for (int i = 0; i < m; ++i) rp[i] = prob.b[i] - inner(prob.a[i], z);
    Sym rd = prob.c;
    for (int i = 0; i < m; ++i) axpy(rd, -res.y[i], prob.a[i]);
    axpy(rd, -1.0, s);

    double mu_total = inner(z, s);
    double mu = mu_total / n;
    double primal = inner(prob.c, z);
    double dual = 0.0;
    for (int i = 0; i < m; ++i) dual += prob.b[i] * res.y[i];
    double obj_scale = 1.0 + std::abs(primal) + std::abs(dual);

    // Exact identity: <C,Z> - b'y = <Z,S> - y'rp + <Z,Rd>. A violation means
    // the linear algebra above is inconsistent, so fail loudly.
    double slop = 0.0;
    for (int i = 0; i < m; ++i) slop += res.y[i] * rp[i];
    double identity_err = std::abs((primal - dual) - (mu_total - slop + inner(z, rd)));
    if (identity_err > 1e-6 * obj_scale)
      throw std::logic_error("sdp: weak-duality identity violated");

    double rp_norm = 0.0;
    for (double v : rp) rp_norm = std::max(rp_norm, std::abs(v));
    if (mu_total <= tol * obj_scale && rp_norm <= tol * bscale &&
        rd.max_abs() <= tol * cscale) {
      res.status = SdpStatus::optimal;
      return res;
    }
    double y_norm = 0.0;
    for (double v : res.y) y_norm = std::max(y_norm, std::abs(v));
    if (y_norm > 1e12 * (1.0 + bscale) * (1.0 + cscale) || !std::isfinite(mu_total)) {
      res.status = SdpStatus::infeasible;
      return res;
    }

    // Nesterov-Todd scaling point W: W S W = Z.
    SymEig ez = sym_eig(z);
    Sym z_half = eig_apply(ez, f_sqrt);
    Sym t = mul(mul(z_half, s), z_half);
    t.symmetrize();
    SymEig et = sym_eig(t);
    Sym t_invhalf = eig_apply(et, f_invsqrt);
    Sym w = mul(mul(z_half, t_invhalf), z_half);
    w.symmetrize();

    SymEig es = sym_eig(s);
    Sym s_inv = eig_apply(es, f_inv);

    // Schur complement M_ij = <A_i, W A_j W>, factor-once solve-twice.
    std::vector<Sym> waw(m);
    for (int j = 0; j < m; ++j) {
      waw[j] = mul(mul(w, prob.a[j]), w);
      waw[j].symmetrize();
    }
    std::vector<Vec> schur(m, Vec(m, 0.0));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) schur[i][j] = inner(prob.a[i], waw[j]);

    Sym wrdw = mul(mul(w, rd), w);
    wrdw.symmetrize();

    auto direction = [&](double sigma_mu, Vec& dy, Sym& ds, Sym& dz) {
      Vec rhs(m);
      for (int i = 0; i < m; ++i)
        rhs[i] = rp[i] - sigma_mu * inner(prob.a[i], s_inv) + inner(prob.a[i], z) +
                 inner(prob.a[i], wrdw);
      dy = solve_linear(schur, rhs);
      ds = rd;
      for (int i = 0; i < m; ++i) axpy(ds, -dy[i], prob.a[i]);
      // dz = sigma*mu*S^-1 - Z - W dS W
      Sym wdsw = mul(mul(w, ds), w);
      dz = Sym(n);
      axpy(dz, sigma_mu, s_inv);
      axpy(dz, -1.0, z);
      axpy(dz, -1.0, wdsw);
      dz.symmetrize();
    };

    // Predictor probe chooses the centering weight.
    Vec dy_aff;
    Sym ds_aff, dz_aff;
    direction(0.0, dy_aff, ds_aff, dz_aff);
    double ap_aff = max_step(ez, dz_aff, 1.0);
    double ad_aff = max_step(es, ds_aff, 1.0);
    double mu_aff = 0.0;
    {
      Sym z_try = z, s_try = s;
      axpy(z_try, ap_aff, dz_aff);
      axpy(s_try, ad_aff, ds_aff);
      mu_aff = inner(z_try, s_try) / n;
    }
    double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 1e-4, 0.8);

    Vec dy;
    Sym ds, dz;
    direction(sigma * mu, dy, ds, dz);

    double ap = 0.98 * max_step(ez, dz, 1.0 / 0.98);
    double ad = 0.98 * max_step(es, ds, 1.0 / 0.98);
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);

    axpy(z, ap, dz);
    axpy(s, ad, ds);
    for (int i = 0; i < m; ++i) res.y[i] += ad * dy[i];
    z.symmetrize();
    s.symmetrize();

    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }
  }
  res.status = SdpStatus::max_iter;
  return res;
}

// ---- complex <-> real embedding -------------------------------------------

// [[Re M, -Im M], [Im M, Re M]]; satisfies <emb(A), emb(X)> = 2 Tr(A X) for
// Hermitian A, X.
void embed_into(const ComplexMatrix& m, Sym& out, int offset) {
  const int n = m.rows();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double re = m(i, j).real(), im = m(i, j).imag();
      out.at(offset + i, offset + j) = re;
      out.at(offset + n + i, offset + n + j) = re;
      out.at(offset + i, offset + n + j) = -im;
      out.at(offset + n + i, offset + j) = im;
    }
}

ComplexMatrix extract_complex(const Sym& z, int n) {
  ComplexMatrix x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double re = 0.5 * (z.at(i, j) + z.at(n + i, n + j));
      double im = 0.5 * (z.at(n + i, j) - z.at(i, n + j));
      x(i, j) = cplx(re, im);
    }
  return x.hermitized();
}

void check_constraint_matrix(const ComplexMatrix& a, int dim, const char* what) {
  if (a.rows() != dim || a.cols() != dim)
    throw std::invalid_argument(std::string("sdp: ") + what + " dimension mismatch");
  if (a.hermiticity_residual() > tol::herm * std::max(1.0, a.max_abs()))
    throw std::invalid_argument(std::string("sdp: ") + what + " not Hermitian");
}

}  // namespace

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::max_iter: return "max-iter";
    case SdpStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

SdpSolution solve(const SdpProblem& p, const SdpOptions& opts) {
  const int dim = p.objective.rows();
  check_constraint_matrix(p.objective, dim, "objective");
  if (p.equalities.empty())
    throw std::invalid_argument("sdp: at least one equality (normalization) required");
  for (const auto& c : p.equalities) check_constraint_matrix(c.a, dim, "equality");
  for (const auto& c : p.inequalities) check_constraint_matrix(c.a, dim, "inequality");

  const int n_eq = static_cast<int>(p.equalities.size());
  const int n_in = static_cast<int>(p.inequalities.size());
  const int big = 2 * dim + n_in;

  Internal prob;
  prob.n = big;
  prob.c = Sym(big);
  embed_into(p.objective, prob.c, 0);
  for (auto& v : prob.c.a) v = -v;  // internal form minimizes

  for (int i = 0; i < n_eq; ++i) {
    Sym a(big);
    embed_into(p.equalities[i].a, a, 0);
    prob.a.push_back(std::move(a));
    prob.b.push_back(2.0 * p.equalities[i].rhs);
  }
  for (int j = 0; j < n_in; ++j) {
    Sym a(big);
    embed_into(p.inequalities[j].a, a, 0);
    a.at(2 * dim + j, 2 * dim + j) = 2.0;  // slack coordinate
    prob.a.push_back(std::move(a));
    prob.b.push_back(2.0 * p.inequalities[j].rhs);
  }

  InternalResult internal = solve_internal(prob, opts);

  SdpSolution sol;
  sol.status = internal.status;
  sol.iterations = internal.iterations;
  sol.x = extract_complex(internal.z, dim);
  sol.primal_value = real_inner(p.objective, sol.x);
  sol.eq_duals.resize(n_eq);
  sol.ineq_duals.resize(n_in);
  double dual = 0.0;
  for (int i = 0; i < n_eq; ++i) {
    sol.eq_duals[i] = -internal.y[i];
    dual += p.equalities[i].rhs * sol.eq_duals[i];
  }
  for (int j = 0; j < n_in; ++j) {
    sol.ineq_duals[j] = -internal.y[n_eq + j];
    dual += p.inequalities[j].rhs * sol.ineq_duals[j];
  }
  sol.dual_value = dual;
  sol.gap = std::abs(sol.dual_value - sol.primal_value);
  return sol;
}

double KktReport::max_residual() const {
  return std::max({primal_eq_residual, primal_ineq_violation, std::max(0.0, -x_min_eigenvalue),
                   dual_psd_violation, dual_sign_violation, complementary_slackness});
}

KktReport verify_kkt(const SdpProblem& p, const SdpSolution& s) {
  KktReport r;
  for (size_t i = 0; i < p.equalities.size(); ++i)
    r.primal_eq_residual = std::max(
        r.primal_eq_residual, std::abs(real_inner(p.equalities[i].a, s.x) - p.equalities[i].rhs));
  for (size_t j = 0; j < p.inequalities.size(); ++j)
    r.primal_ineq_violation =
        std::max(r.primal_ineq_violation,
                 real_inner(p.inequalities[j].a, s.x) - p.inequalities[j].rhs);
  r.primal_ineq_violation = std::max(0.0, r.primal_ineq_violation);

  EigResult ex = eig_hermitian(s.x.hermitized());
  r.x_min_eigenvalue = ex.values.front();

  // dual slack S = sum_i y_i A_i + sum_j z_j G_j - C
  ComplexMatrix dual_slack = ComplexMatrix::zero(s.x.rows(), s.x.cols());
  for (size_t i = 0; i < p.equalities.size(); ++i) {
    ComplexMatrix t = p.equalities[i].a;
    t *= cplx(s.eq_duals[i], 0.0);
    dual_slack += t;
  }
  for (size_t j = 0; j < p.inequalities.size(); ++j) {
    ComplexMatrix t = p.inequalities[j].a;
    t *= cplx(s.ineq_duals[j], 0.0);
    dual_slack += t;
    r.dual_sign_violation = std::max(r.dual_sign_violation, -s.ineq_duals[j]);
  }
  dual_slack -= p.objective;
  EigResult es = eig_hermitian(dual_slack.hermitized());
  r.dual_psd_violation = std::max(0.0, -es.values.front());
  r.dual_sign_violation = std::max(0.0, r.dual_sign_violation);

  double comp = std::abs(real_inner(dual_slack, s.x));
  for (size_t j = 0; j < p.inequalities.size(); ++j) {
    double slack = p.inequalities[j].rhs - real_inner(p.inequalities[j].a, s.x);
    comp = std::max(comp, std::abs(slack * s.ineq_duals[j]));
  }
  r.complementary_slackness = comp;
  return r;
}

}  // namespace cekit::sdp
