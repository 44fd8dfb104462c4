#include "cekit/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cekit {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

ComplexMatrix::ComplexMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, cplx(0.0, 0.0)) {
  require(rows > 0 && cols > 0, "ComplexMatrix: dimensions must be positive");
}

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zero(int rows, int cols) { return ComplexMatrix(rows, cols); }

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
  int r = static_cast<int>(rows.size());
  require(r > 0, "from_rows: empty");
  int c = static_cast<int>(rows.begin()->size());
  ComplexMatrix m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    require(static_cast<int>(row.size()) == c, "from_rows: ragged rows");
    int j = 0;
    for (cplx v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "matrix add: dimension mismatch");
  for (size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "matrix sub: dimension mismatch");
  for (size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

cplx ComplexMatrix::trace() const {
  require(rows_ == cols_, "trace: square matrix required");
  cplx t = 0.0;
  for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double s = 0.0;
  for (const auto& v : data_) s = std::max(s, std::abs(v));
  return s;
}

bool ComplexMatrix::is_finite() const {
  for (const auto& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

double ComplexMatrix::hermiticity_residual() const {
  if (rows_ != cols_) return std::numeric_limits<double>::infinity();
  double r = 0.0;
  for (int i = 0; i < rows_; ++i)
    for (int j = i; j < cols_; ++j)
      r = std::max(r, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return r;
}

ComplexMatrix ComplexMatrix::hermitized() const {
  require(rows_ == cols_, "hermitized: square matrix required");
  ComplexMatrix m(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    m(i, i) = (*this)(i, i).real();
    for (int j = i + 1; j < cols_; ++j) {
      cplx v = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return m;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix mul: dimension mismatch");
  ComplexMatrix m(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      cplx aik = a(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      for (int j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
    }
  return m;
}

ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.is_finite() || !b.is_finite()) throw std::invalid_argument("kron: non-finite input");
  ComplexMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      cplx aij = a(i, j);
      if (aij == cplx(0.0, 0.0)) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) m(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return m;
}

double real_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("real_inner: dimension mismatch");
  double s = 0.0;
  const auto& da = a.data();
  const auto& db = b.data();
  for (size_t k = 0; k < da.size(); ++k)
    s += da[k].real() * db[k].real() + da[k].imag() * db[k].imag();
  return s;
}

EigResult eig_hermitian(const ComplexMatrix& m) {
  require(m.rows() == m.cols(), "eig_hermitian: square matrix required");
  const int n = m.rows();
  double scale = std::max(1e-300, m.max_abs());
  require(m.hermiticity_residual() <= tol::herm * std::max(1.0, scale),
          "eig_hermitian: input not Hermitian");

  ComplexMatrix a = m.hermitized();
  ComplexMatrix v = ComplexMatrix::identity(n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += 2.0 * std::norm(a(i, j));
    return std::sqrt(s);
  };

  const double target = 1e-14 * std::max(1.0, a.frobenius_norm());
  for (int sweep = 0; sweep < 80 && off_norm() > target; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        cplx apq = a(p, q);
        double abs_apq = std::abs(apq);
        if (abs_apq <= 1e-300) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        // Unitary 2x2 rotation R = [[c, s e^{i phi}], [-s e^{-i phi}, c]]
        // chosen so (R^H A R)(p,q) = 0, with e^{i phi} the phase of a_pq.
        cplx phase = apq / abs_apq;
        double app = a(p, p).real();
        double aqq = a(q, q).real();
        double tau = (aqq - app) / (2.0 * abs_apq);
        double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        cplx sp = s * phase;         // s e^{i phi}
        cplx spc = std::conj(sp);    // s e^{-i phi}

        // A <- A R (columns p, q)
        for (int k = 0; k < n; ++k) {
          cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - spc * akq;
          a(k, q) = sp * akp + c * akq;
        }
        // A <- R^H A (rows p, q)
        for (int k = 0; k < n; ++k) {
          cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sp * aqk;
          a(q, k) = spc * apk + c * aqk;
        }
        // V <- V R
        for (int k = 0; k < n; ++k) {
          cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - spc * vkq;
          v(k, q) = sp * vkp + c * vkq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  EigResult res;
  res.values.resize(n);
  res.vectors = ComplexMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    res.values[j] = a(order[j], order[j]).real();
    for (int i = 0; i < n; ++i) res.vectors(i, j) = v(i, order[j]);
  }
  return res;
}

DensityMatrix::DensityMatrix(ComplexMatrix mat) : mat_(std::move(mat)) {
  require(mat_.rows() == mat_.cols() && mat_.rows() > 0, "DensityMatrix: square matrix required");
  require(mat_.is_finite(), "DensityMatrix: non-finite entries");
  require(mat_.hermiticity_residual() <= tol::herm, "DensityMatrix: not Hermitian");
  cplx tr = mat_.trace();
  require(std::abs(tr - cplx(1.0, 0.0)) <= tol::trace, "DensityMatrix: trace must be 1");
  EigResult eig = eig_hermitian(mat_);
  require(eig.values.front() >= -tol::psd, "DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const std::vector<cplx>& amplitudes) {
  int n = static_cast<int>(amplitudes.size());
  require(n > 0, "from_pure: empty amplitude vector");
  double norm2 = 0.0;
  for (cplx v : amplitudes) norm2 += std::norm(v);
  require(std::abs(norm2 - 1.0) <= 1e-9, "from_pure: amplitudes must be normalized");
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = amplitudes[i] * std::conj(amplitudes[j]);
  return DensityMatrix(m);
}

Povm::Povm(int dim, std::vector<ComplexMatrix> elements) : dim_(dim), elements_(std::move(elements)) {
  require(dim_ > 0, "Povm: dimension must be positive");
  require(!elements_.empty(), "Povm: needs at least one element");
  ComplexMatrix sum(dim_, dim_);
  for (const auto& e : elements_) {
    require(e.rows() == dim_ && e.cols() == dim_, "Povm: element dimension mismatch");
    require(e.hermiticity_residual() <= tol::herm, "Povm: element not Hermitian");
    EigResult eig = eig_hermitian(e);
    require(eig.values.front() >= -tol::psd, "Povm: element not PSD");
    sum += e;
  }
  ComplexMatrix id = ComplexMatrix::identity(dim_);
  require((sum - id).max_abs() <= tol::trace, "Povm: elements must sum to identity");
}

ComplexMatrix partial_trace(const ComplexMatrix& m, int dim_a, int dim_b, Keep keep) {
  if (m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b)
    throw std::invalid_argument("partial_trace: dimension mismatch");
  if (keep == Keep::A) {
    ComplexMatrix out(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j) {
        cplx s = 0.0;
        for (int k = 0; k < dim_b; ++k) s += m(i * dim_b + k, j * dim_b + k);
        out(i, j) = s;
      }
    return out;
  }
  ComplexMatrix out(dim_b, dim_b);
  for (int i = 0; i < dim_b; ++i)
    for (int j = 0; j < dim_b; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < dim_a; ++k) s += m(k * dim_b + i, k * dim_b + j);
      out(i, j) = s;
    }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b, Keep keep) {
  return DensityMatrix(partial_trace(rho.mat(), dim_a, dim_b, keep));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  EigResult eig = eig_hermitian(rho.mat());
  double s = 0.0;
  for (double lambda : eig.values) {
    double l = std::clamp(lambda, 0.0, 1.0);
    if (l > 0.0) s -= l * std::log2(l);
  }
  return std::max(0.0, s);
}

std::vector<std::vector<double>> born_probabilities(const DensityMatrix& rho, const Povm& povm_a,
                                                    const Povm& povm_b) {
  if (rho.dim() != povm_a.dim() * povm_b.dim())
    throw std::invalid_argument("born_probabilities: dimension mismatch");
  std::vector<std::vector<double>> table(povm_a.outcomes(),
                                         std::vector<double>(povm_b.outcomes(), 0.0));
  double total = 0.0;
  for (int a = 0; a < povm_a.outcomes(); ++a)
    for (int b = 0; b < povm_b.outcomes(); ++b) {
      double p = real_inner(kron(povm_a.element(a), povm_b.element(b)), rho.mat());
      if (p < -tol::psd) throw std::logic_error("born_probabilities: negative probability");
      table[a][b] = std::max(0.0, p);
      total += table[a][b];
    }
  if (std::abs(total - 1.0) > tol::trace * 10)
    throw std::logic_error("born_probabilities: table does not sum to 1");
  return table;
}

}  // namespace cekit
