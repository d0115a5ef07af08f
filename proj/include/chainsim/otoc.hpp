#pragma once

#include "chainsim/dynamics.hpp"

#include <vector>

namespace chainsim {

/// MQC intensities I_q for q = -L..L.
struct MqcSpectrum {
  int max_order = 0;
  std::vector<double> intensity;
  /// Largest imaginary part met while transforming the signal.
  double imaginary_residue = 0.0;

  double at(int q) const { return intensity.at(static_cast<std::size_t>(q + max_order)); }
  double total() const;
};

/// (4/L) Tr([A(t),B][A(t),B]^dagger) / 2^L.
double oto_commutator_direct(const DenseOperator& a, const DenseOperator& b,
                             const EigenSystem& eig, double t);

/// Tr(A^dagger(t) B^dagger A(t) B) / 2^L.
Complex oto_correlator(const DenseOperator& a, const DenseOperator& b, const EigenSystem& eig,
                       double t);

/// S_m = 2^-L Tr[e^{-i phi_m P} rho_f(t1) e^{i phi_m P} rho_b(t2)] with
/// phi_m = m pi / L, m = 0..2L-1. rho_f evolves under eig_fwd, rho_b under
/// eig_bwd. P must have integer eigenvalue differences.
std::vector<double> mqc_signal(const DenseOperator& rho0, const EigenSystem& eig_fwd,
                               const EigenSystem& eig_bwd, double t1, double t2,
                               const DenseOperator& p, int num_sites);

/// I_q = (1/2L) sum_m e^{i q phi_m} S_m. The bins q = L and q = -L coincide
/// on the 2L-point grid; their sum is shared equally.
MqcSpectrum mqc_intensities(const std::vector<double>& signal, int num_sites);

/// sum_q q^2 I_q.
double oto_from_second_moment(const MqcSpectrum& spectrum);

/// sum_q (q^2 / M^2) sum_{j,k} I_q(t_j, t_k) from double-time MQC signals.
double oto_time_averaged(const DenseOperator& rho0, const EigenSystem& eig,
                         const DenseOperator& p, const std::vector<double>& times,
                         int num_sites);

/// Cap on cached evolved operators, M dim^2 complex entries.
inline constexpr double kMaxCachedEntries = 1.5e8;

}  // namespace chainsim
