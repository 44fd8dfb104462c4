#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace cekit {

using cplx = std::complex<double>;

// Central numerical tolerances. Dimensions stay small (<= ~16), so the
// conditioning is benign and these can be tight.
namespace tol {
inline constexpr double herm = 1e-9;   // Hermiticity residual
inline constexpr double trace = 1e-9;  // trace / completeness residual
inline constexpr double psd = 1e-8;    // eigenvalue floor for PSD checks
}  // namespace tol

// Dense row-major complex matrix with value semantics.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols);

  static ComplexMatrix identity(int n);
  static ComplexMatrix zero(int rows, int cols);
  // Row-by-row construction, mostly for tests and fixed operators.
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cplx& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const cplx& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  ComplexMatrix adjoint() const;
  cplx trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool is_finite() const;
  // Max |A - A^dagger| entry.
  double hermiticity_residual() const;
  // (A + A^dagger)/2, also flushes diagonal imaginary parts.
  ComplexMatrix hermitized() const;

  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

// Tensor product; entry (i*rb+k, j*cb+l) = a(i,j) * b(k,l).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Re Tr(a^dagger b); the natural real inner product on Hermitian matrices.
double real_inner(const ComplexMatrix& a, const ComplexMatrix& b);

struct EigResult {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // orthonormal eigenvectors as columns
};

// Cyclic Jacobi eigendecomposition for Hermitian input. Reconstruction
// residual ||m - V diag V^H||_F stays below 1e-10 * ||m||_F.
EigResult eig_hermitian(const ComplexMatrix& m);

// Trace-one PSD Hermitian matrix; validates on construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix mat);
  static DensityMatrix from_pure(const std::vector<cplx>& amplitudes);

  int dim() const { return mat_.rows(); }
  const ComplexMatrix& mat() const { return mat_; }

 private:
  ComplexMatrix mat_;
};

// Finite set of PSD operators summing to identity; validates on construction.
class Povm {
 public:
  Povm(int dim, std::vector<ComplexMatrix> elements);

  int dim() const { return dim_; }
  int outcomes() const { return static_cast<int>(elements_.size()); }
  const ComplexMatrix& element(int k) const { return elements_[k]; }

 private:
  int dim_;
  std::vector<ComplexMatrix> elements_;
};

enum class Keep { A, B };

ComplexMatrix partial_trace(const ComplexMatrix& m, int dim_a, int dim_b, Keep keep);
DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b, Keep keep);

// -sum lambda_i log2 lambda_i with eigenvalues clamped to [0, 1].
double von_neumann_entropy(const DensityMatrix& rho);

// p(a, b) = Tr[rho A_a (x) B_b], clamped to >= 0; rows index povm_a outcomes.
std::vector<std::vector<double>> born_probabilities(const DensityMatrix& rho, const Povm& povm_a,
                                                    const Povm& povm_b);

}  // namespace cekit
