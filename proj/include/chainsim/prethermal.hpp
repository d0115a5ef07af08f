#pragma once

#include "chainsim/dynamics.hpp"
#include "chainsim/pauli.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace chainsim {

/// H = scale (H0 + epsilon V).
struct PrethermalSplit {
  OperatorSum h0;
  OperatorSum v;
  double epsilon = 0.0;
  double scale = 1.0;
};

/// H0 = Z, epsilon = J / g and V = (H - g Z) / J, so that H = g (H0 + eps V).
/// Throws for g = 0, where no field-aligned split exists.
PrethermalSplit split_h0_v(const OperatorSum& h_tdip, double g, double j_scale = 1.0);

/// H0 = sum_j 2 S_y^j S_y^{j+1}. The scale a is fixed by the nearest-neighbour
/// yy coupling of H, H = a (H0 + V), and epsilon = 1.
PrethermalSplit alternative_split(const OperatorSum& h_tdip);

struct SeriesOptions {
  int max_order = 4;
  /// Largest Pauli term count of any intermediate before giving up.
  std::size_t term_cap = 5'000'000;
  /// Largest accepted |V'_j|.
  double residual_tol = 1e-10;
};

/// Symbolic order-by-order prethermal series. Entries of s, d, rhs and
/// residual are indexed j - 1 for orders j = 1..completed_orders().
struct PrethermalSeries {
  PrethermalSplit split;
  std::vector<OperatorSum> s;
  std::vector<OperatorSum> d;
  /// Full right-hand side D_j + V'_j collected at each order.
  std::vector<OperatorSum> rhs;
  /// Norm of V'_j after the split.
  std::vector<double> residual;
  bool diverged = false;
  std::string diagnostic;

  int completed_orders() const { return static_cast<int>(d.size()); }
  /// scale (H0 + sum_{j<=n} eps^j D_j).
  OperatorSum h_pre(int n) const;
  /// sum_{j<=n} eps^j S_j.
  OperatorSum generator(int n) const;
};

PrethermalSeries construct_series(const PrethermalSplit& split, const SeriesOptions& options);

/// Same construction with dense real matrices in the eigenbasis of H0, which
/// must be diagonal in the computational basis. Matrices are stored per
/// invariant block of H0 + V.
class DenseSeries {
 public:
  using Blocks = std::vector<RealMatrix>;

  int num_sites() const { return num_sites_; }
  int completed_orders() const { return static_cast<int>(d_.size()); }
  const PrethermalSplit& split() const { return split_; }
  double residual(int j) const { return residual_.at(static_cast<std::size_t>(j - 1)); }
  bool diverged() const { return diverged_; }
  const std::string& diagnostic() const { return diagnostic_; }

  /// Ascending spectrum of scale (H0 + sum_{j<=n} eps^j D_j).
  Vector h_pre_spectrum(int n) const;
  DenseOperator h_pre(int n) const;
  DenseOperator generator(int n) const;
  DenseOperator s(int j) const { return assemble(s_.at(static_cast<std::size_t>(j - 1))); }
  DenseOperator d(int j) const { return assemble(d_.at(static_cast<std::size_t>(j - 1))); }

  friend DenseSeries construct_series_dense(const PrethermalSplit& split,
                                            const SeriesOptions& options);

 private:
  DenseOperator assemble(const Blocks& b) const;

  int num_sites_ = 0;
  PrethermalSplit split_;
  std::vector<std::vector<Index>> states_;
  std::vector<Vector> levels_;
  Blocks h0_;
  std::vector<Blocks> s_;
  std::vector<Blocks> d_;
  std::vector<double> residual_;
  bool diverged_ = false;
  std::string diagnostic_;
};

DenseSeries construct_series_dense(const PrethermalSplit& split, const SeriesOptions& options);

/// Series for the nearest-neighbour yy generator. The operators are relabelled
/// by the cyclic rotation x -> y -> z -> x, which makes H0 diagonal and keeps
/// every matrix real; spectra are unaffected.
DenseSeries alternative_generator_series(const OperatorSum& h_tdip, const SeriesOptions& options);

/// Cyclic relabelling X -> Y, Y -> Z, Z -> X of every string.
OperatorSum rotate_cyclic(const OperatorSum& a);

/// mean_m (E_m - E_m^pre) / L with both spectra sorted ascending.
double eigenvalue_gap(const DenseOperator& h, const DenseOperator& h_pre, int num_sites);
double eigenvalue_gap(const Vector& e, const Vector& e_pre, int num_sites);

/// mean_m |E_m - E_m^pre| / L with the same pairing. The signed mean above
/// equals (Tr H - Tr H_pre) / (2^L L), which vanishes for every truncation
/// because all D_j are traceless; this is the diagnostic that can diverge.
double eigenvalue_gap_abs(const Vector& e, const Vector& e_pre, int num_sites);

/// Order with the smallest |r|, counting from 1.
int optimal_order(const std::vector<double>& r_by_order);

/// Squared-coefficient weight binned by the distance between the outermost
/// non-identity sites, d = 0..L-1, normalized to sum 1. Identity terms are
/// left out.
std::vector<double> locality_profile(const OperatorSum& s);

}  // namespace chainsim
