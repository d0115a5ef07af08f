#pragma once

#include "chainsim/linalg.hpp"
#include "chainsim/pauli.hpp"

#include <Eigen/Dense>

#include <vector>

namespace chainsim {

/// Collective rotation by `angle` about the in-plane axis (cos phase, sin phase, 0).
struct Pulse {
  double phase = 0.0;
  double angle = M_PI / 2;
};

/// Alternating free evolutions and pulses: delays[0], pulses[0], delays[1],
/// ..., pulses[n-1], delays[n]. Delays are the free-evolution intervals, so a
/// finite pulse width is already taken out of the centre-to-centre spacing.
struct PulseSequence {
  std::vector<double> delays;
  std::vector<Pulse> pulses;
  double pulse_width = 0.0;
  double u = 0.0;
  double tau = 0.0;

  double period() const;
  void validate() const;
};

enum class SequenceKind { Forward, Backward };

/// Sixteen pi/2 pulses in four 4-pulse blocks with sign pattern (+, +, -, -),
/// t_c = 24 tau. Forward blocks use tau1 = tau(1-u), tau2 = tau(1+2u) with
/// pulses x y y x; backward blocks use tau3 = tau(1+u), tau4 = tau(1-2u)
/// with pulses y x x y. Throws when a spacing would become negative.
PulseSequence build_sequence(SequenceKind kind, double u, double tau, double pulse_width = 0.0);

/// Every pulse direction advanced by phi about z.
PulseSequence phase_shifted(const PulseSequence& seq, double phi);

using Rotation = Eigen::Matrix3d;

/// Rotation of the spin vector produced by the pulse, or by a fraction of it.
Rotation rotation_matrix(const Pulse& p, double fraction = 1.0);
/// Product of all pulse rotations of one cycle.
Rotation rf_cycle_rotation(const PulseSequence& seq);

/// Substitutes S_a -> sum_b m(b, a) S_b on every site.
OperatorSum rotate_operator(const OperatorSum& a, const Rotation& m);

struct Frame {
  OperatorSum h;
  double duration = 0.0;
};

/// Internal Hamiltonian in the rf toggling frame, one entry per free
/// evolution and, for finite pulses, `pulse_substeps` midpoint entries per
/// pulse. Durations sum to the period.
std::vector<Frame> toggling_hamiltonians(const PulseSequence& seq, const OperatorSum& h_int,
                                         int pulse_substeps = 8);

/// Magnus term of order 0 or 1 for piecewise-constant frames.
OperatorSum average_hamiltonian(const std::vector<Frame>& frames, int order);

/// e^{-i theta n.S} on all sites.
Matrix collective_rotation(int num_sites, const Pulse& p, double fraction = 1.0);

/// Lab-frame propagator of one cycle: free evolution under H_int and pulses
/// (instantaneous, or generated by H_int plus the rf term for finite width).
Matrix cycle_propagator(const PulseSequence& seq, const OperatorSum& h_int);

/// U_n ... U_1 with U_k = e^{-i (k-1) phi Z} U e^{i (k-1) phi Z}.
Matrix phase_shifted_product(const Matrix& u_cycle, const Matrix& z, double phi, int n);
/// e^{-i n phi Z} [e^{i phi Z} U]^n.
Matrix telescoped_product(const Matrix& u_cycle, const Matrix& z, double phi, int n);

struct PhaseShiftReport {
  double g = 0.0;
  /// Exact shifted product against its telescoped form.
  double telescoping_error = 0.0;
  /// Against e^{-i n phi Z} e^{-i (H_Flq + g Z) n t_c}, H_Flq from the exact cycle.
  double absorption_error = 0.0;
  /// Same with H_Flq replaced by the zeroth Magnus term.
  double zeroth_order_error = 0.0;
  Matrix exact;
  Matrix approximate;
  /// e^{-i n phi Z}, undone by rotating the encoding pulse by n phi.
  Matrix frame_correction;
};

/// Cycle k is built with all pulse phases advanced by (k-1) phi.
PhaseShiftReport phase_shift_field(const PulseSequence& seq, const OperatorSum& h_int,
                                   int n_cycles, double phi);

struct EngineeringReport {
  /// || U_cycle - e^{-i H0 t_c} || in operator norm.
  double cycle_defect = 0.0;
  /// || U_cycle^n - e^{-i H0 n t_c} ||.
  double total_defect = 0.0;
  /// Largest coefficient of the first Magnus term.
  double first_order_norm = 0.0;
  OperatorSum h_zero;
};

EngineeringReport verify_engineering(const PulseSequence& seq, const OperatorSum& h_int,
                                     int n_cycles);

/// Largest dense size for propagator checks.
inline constexpr int kMaxFloquetSites = 10;

}  // namespace chainsim
