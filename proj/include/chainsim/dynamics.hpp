#pragma once

#include "chainsim/linalg.hpp"
#include "chainsim/pauli.hpp"

#include <vector>

namespace chainsim {

/// Largest chain handled by dense exact diagonalization.
inline constexpr int kMaxDenseSites = 14;

void check_dense_sites(int num_sites);

/// Basis-state blocks left invariant by an operator: connected components of
/// its nonzero pattern. Each block lists computational-basis indices in
/// ascending order; blocks are ordered by their smallest index.
std::vector<std::vector<Index>> invariant_blocks(const Matrix& h);
std::vector<std::vector<Index>> invariant_blocks(const OperatorSum& h);

/// Matrix of h restricted to the listed basis states (which must span an
/// invariant subspace), rows and columns in list order.
Matrix restrict_to_states(const OperatorSum& h, const std::vector<Index>& states);

/// Spectral decomposition H = W diag(E) W^dagger, computed block by block on
/// the invariant subspaces of H.
///
/// Operators are moved to the eigenbasis with to_eigenbasis(); that basis
/// lists the eigenvectors block after block, with energies given by
/// basis_energies(). eigenvalues() and eigenvectors() give the conventional
/// globally ascending ordering.
class EigenSystem {
 public:
  struct Block {
    std::vector<Index> states;
    Vector energies;
    bool real = true;
    RealMatrix real_vectors;
    Matrix complex_vectors;
    Index offset = 0;
    Index size() const { return static_cast<Index>(states.size()); }
  };

  EigenSystem() = default;

  /// Throws for non-Hermitian input or when the dimension guard trips.
  static EigenSystem diagonalize(const DenseOperator& h, double hermitian_tol = 1e-10);
  /// Builds the blocks directly from the Pauli expansion without forming the
  /// full matrix.
  static EigenSystem diagonalize(const OperatorSum& h);

  int num_sites() const { return num_sites_; }
  Index dim() const { return dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  /// Ascending eigenvalues.
  const Vector& eigenvalues() const { return sorted_; }
  /// Unitary with columns ordered as eigenvalues().
  Matrix eigenvectors() const;
  /// Energies in the block-ordered eigenbasis used by to_eigenbasis().
  const Vector& basis_energies() const { return energies_; }
  double max_abs_energy() const;

  Matrix to_eigenbasis(const Matrix& o) const;
  Matrix from_eigenbasis(const Matrix& o) const;

  /// Multiplies eigenbasis entries by e^{-i (E_a - E_b) t}.
  Matrix evolve_in_eigenbasis(Matrix o_eig, double t) const;

 private:
  void finalize();

  int num_sites_ = 0;
  Index dim_ = 0;
  std::vector<Block> blocks_;
  Vector energies_;
  Vector sorted_;
};

/// Ascending eigenvalues without eigenvectors.
Vector spectrum(const DenseOperator& h);
Vector spectrum(const OperatorSum& h);

/// O(t) = U O U^dagger with U = e^{-iHt}.
DenseOperator evolve_operator(const DenseOperator& o, const EigenSystem& eig, double t);

/// e^{-iHt}.
Matrix propagator(const EigenSystem& eig, double t);

/// 4 Tr(A(t) B) / (2^L L).
double two_point_correlator(const DenseOperator& a, const DenseOperator& b,
                            const EigenSystem& eig, double t);
/// Same correlator on a list of times; A and B are transformed once.
std::vector<double> two_point_series(const DenseOperator& a, const DenseOperator& b,
                                     const EigenSystem& eig, const std::vector<double>& times);

/// Keeps the eigenbasis entries of O between (near-)degenerate levels,
/// |E_a - E_b| < 1e-9 max|E|; the result commutes with H.
DenseOperator diagonal_ensemble(const DenseOperator& o, const EigenSystem& eig);

/// Mean of O(t_n) over the grid.
DenseOperator time_average_operator(const DenseOperator& o, const EigenSystem& eig,
                                    const std::vector<double>& times);
/// Continuous average (1/T) int_0^T O(t) dt.
DenseOperator window_average_operator(const DenseOperator& o, const EigenSystem& eig,
                                      double window);

/// Tr(A^2) / Tr(B^2) for Hermitian operators.
double trace_ratio(const DenseOperator& a, const DenseOperator& b);

}  // namespace chainsim
