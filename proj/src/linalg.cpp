#include "chainsim/linalg.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace chainsim {

int sites_for_dimension(Index dim) {
  if (dim <= 0 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument("operator dimension " + std::to_string(dim) +
                                " is not a power of two");
  }
  int sites = 0;
  while ((Index{1} << sites) < dim) ++sites;
  return sites;
}

DenseOperator::DenseOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("DenseOperator must be square");
  }
  num_sites_ = sites_for_dimension(m_.rows());
}

DenseOperator DenseOperator::zero(int num_sites) {
  const Index d = Index{1} << num_sites;
  return DenseOperator(Matrix::Zero(d, d));
}

DenseOperator DenseOperator::identity(int num_sites) {
  const Index d = Index{1} << num_sites;
  return DenseOperator(Matrix::Identity(d, d));
}

DenseOperator DenseOperator::diagonal(const ComplexVector& d) {
  return DenseOperator(Matrix(d.asDiagonal()));
}

bool DenseOperator::is_hermitian(double tol) const {
  const Index n = dim();
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r <= c; ++r) {
      if (std::abs(m_(r, c) - std::conj(m_(c, r))) > tol) return false;
    }
  }
  return true;
}

bool DenseOperator::is_diagonal() const {
  const Index n = dim();
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < n; ++r) {
      if (r != c && m_(r, c) != Complex{}) return false;
    }
  }
  return true;
}

DenseOperator DenseOperator::adjoint() const { return DenseOperator(m_.adjoint()); }

DenseOperator& DenseOperator::operator+=(const DenseOperator& o) {
  require_same_dim(*this, o, "operator+");
  m_ += o.m_;
  return *this;
}

DenseOperator& DenseOperator::operator-=(const DenseOperator& o) {
  require_same_dim(*this, o, "operator-");
  m_ -= o.m_;
  return *this;
}

DenseOperator& DenseOperator::operator*=(Complex s) {
  m_ *= s;
  return *this;
}

DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
  require_same_dim(a, b, "operator*");
  Matrix p;
  p.noalias() = a.matrix() * b.matrix();
  return DenseOperator(std::move(p));
}

void require_same_dim(const DenseOperator& a, const DenseOperator& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) +
                                ")");
  }
}

Complex hs_inner(const DenseOperator& a, const DenseOperator& b) {
  require_same_dim(a, b, "hs_inner");
  // Tr(A^dagger B) = sum_ij conj(A_ij) B_ij
  return a.matrix().conjugate().cwiseProduct(b.matrix()).sum() / static_cast<double>(a.dim());
}

double hs_norm_sq(const DenseOperator& a) {
  return a.matrix().squaredNorm() / static_cast<double>(a.dim());
}

Complex normalized_trace(const DenseOperator& a) {
  return a.matrix().trace() / static_cast<double>(a.dim());
}

DenseOperator commutator(const DenseOperator& a, const DenseOperator& b) {
  require_same_dim(a, b, "commutator");
  const Index n = a.dim();
  if (b.is_diagonal()) {
    // [A, D]_rc = A_rc (d_c - d_r)
    const ComplexVector d = b.matrix().diagonal();
    Matrix out(n, n);
    for (Index c = 0; c < n; ++c) {
      for (Index r = 0; r < n; ++r) out(r, c) = a.matrix()(r, c) * (d(c) - d(r));
    }
    return DenseOperator(std::move(out));
  }
  if (a.is_diagonal()) {
    const ComplexVector d = a.matrix().diagonal();
    Matrix out(n, n);
    for (Index c = 0; c < n; ++c) {
      for (Index r = 0; r < n; ++r) out(r, c) = b.matrix()(r, c) * (d(r) - d(c));
    }
    return DenseOperator(std::move(out));
  }
  Matrix out;
  out.noalias() = a.matrix() * b.matrix();
  out.noalias() -= b.matrix() * a.matrix();
  return DenseOperator(std::move(out));
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

HermitianEigen hermitian_eigen(const Matrix& h) {
  const Index n = h.rows();
  HermitianEigen out;
  out.values.resize(n);
  out.vectors = h;
  if (n == 0) return out;
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(out.vectors.data()), static_cast<lapack_int>(n),
      out.values.data());
  if (info != 0) {
    throw std::runtime_error("zheevd failed to converge (info=" + std::to_string(info) + ")");
  }
  return out;
}

RealSymmetricEigen symmetric_eigen(const RealMatrix& h) {
  const Index n = h.rows();
  RealSymmetricEigen out;
  out.values.resize(n);
  out.vectors = h;
  if (n == 0) return out;
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
                     out.vectors.data(), static_cast<lapack_int>(n), out.values.data());
  if (info != 0) {
    throw std::runtime_error("dsyevd failed to converge (info=" + std::to_string(info) + ")");
  }
  return out;
}

Vector hermitian_eigenvalues(const Matrix& h) {
  const Index n = h.rows();
  Vector values(n);
  if (n == 0) return values;
  Matrix work = h;
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'N', 'U', static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(work.data()), static_cast<lapack_int>(n),
      values.data());
  if (info != 0) {
    throw std::runtime_error("zheevd failed to converge (info=" + std::to_string(info) + ")");
  }
  return values;
}

Vector symmetric_eigenvalues(const RealMatrix& h) {
  const Index n = h.rows();
  Vector values(n);
  if (n == 0) return values;
  RealMatrix work = h;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', static_cast<lapack_int>(n),
                                         work.data(), static_cast<lapack_int>(n), values.data());
  if (info != 0) {
    throw std::runtime_error("dsyevd failed to converge (info=" + std::to_string(info) + ")");
  }
  return values;
}

Matrix unitary_from_hermitian(const Matrix& h, double t) {
  const HermitianEigen e = hermitian_eigen(h);
  ComplexVector phases(e.values.size());
  for (Index k = 0; k < e.values.size(); ++k) phases(k) = std::exp(-kI * e.values(k) * t);
  return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

Matrix hermitian_generator(const Matrix& u, double t) {
  // U = e^{-iHt}  =>  H = i log(U) / t
  const Matrix log_u = u.log();
  Matrix h = (kI / t) * log_u;
  return 0.5 * (h + h.adjoint());
}

}  // namespace chainsim
