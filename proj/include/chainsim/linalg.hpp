#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace chainsim {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Raised when a requested computation would exceed a configured resource
/// limit (Hilbert-space dimension, memory, Pauli term count).
class ResourceGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Square complex matrix acting on 2^L states, L the number of spin-1/2 sites.
///
/// Basis index bit j holds the sigma_z eigenvalue of site j (0 = up), so site
/// 0 is the least significant bit.
class DenseOperator {
 public:
  DenseOperator() = default;
  explicit DenseOperator(Matrix m);

  static DenseOperator zero(int num_sites);
  static DenseOperator identity(int num_sites);
  static DenseOperator diagonal(const ComplexVector& d);

  int num_sites() const { return num_sites_; }
  Index dim() const { return m_.rows(); }

  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }

  bool is_hermitian(double tol = 1e-10) const;
  /// True when every off-diagonal entry is exactly zero.
  bool is_diagonal() const;
  DenseOperator adjoint() const;

  DenseOperator& operator+=(const DenseOperator& o);
  DenseOperator& operator-=(const DenseOperator& o);
  DenseOperator& operator*=(Complex s);

  friend DenseOperator operator+(DenseOperator a, const DenseOperator& b) { return a += b; }
  friend DenseOperator operator-(DenseOperator a, const DenseOperator& b) { return a -= b; }
  friend DenseOperator operator*(DenseOperator a, Complex s) { return a *= s; }
  friend DenseOperator operator*(Complex s, DenseOperator a) { return a *= s; }
  friend DenseOperator operator*(const DenseOperator& a, const DenseOperator& b);

 private:
  Matrix m_;
  int num_sites_ = 0;
};

/// log2 of a power-of-two dimension; throws for anything else.
int sites_for_dimension(Index dim);

void require_same_dim(const DenseOperator& a, const DenseOperator& b, const char* what);

/// Normalized Hilbert-Schmidt product Tr(A^dagger B) / dim.
Complex hs_inner(const DenseOperator& a, const DenseOperator& b);
/// Tr(A^dagger A) / dim.
double hs_norm_sq(const DenseOperator& a);
Complex normalized_trace(const DenseOperator& a);

/// [A, B]; diagonal operands take an O(dim^2) path.
DenseOperator commutator(const DenseOperator& a, const DenseOperator& b);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
struct HermitianEigen {
  Vector values;
  Matrix vectors;
};
struct RealSymmetricEigen {
  Vector values;
  RealMatrix vectors;
};

HermitianEigen hermitian_eigen(const Matrix& h);
RealSymmetricEigen symmetric_eigen(const RealMatrix& h);
/// Eigenvalues only, ascending.
Vector hermitian_eigenvalues(const Matrix& h);
Vector symmetric_eigenvalues(const RealMatrix& h);

/// e^{-i H t} for Hermitian H.
Matrix unitary_from_hermitian(const Matrix& h, double t);

/// Principal Hermitian generator H with U = e^{-i H t}; eigenphases must lie
/// in (-pi, pi] after scaling.
Matrix hermitian_generator(const Matrix& u, double t);

}  // namespace chainsim
