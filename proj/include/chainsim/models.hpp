#pragma once

#include "chainsim/pauli.hpp"

#include <array>
#include <string>

namespace chainsim {

enum class Axis { X, Y, Z };
enum class CouplingRange { PowerLaw, NearestNeighbor };

Axis parse_axis(const std::string& s);
CouplingRange parse_range(const std::string& s);
std::string to_string(CouplingRange r);

/// Open dipolar chain. J is the signed nearest-neighbour coupling; the pair
/// coupling is J |j-k|^-3 (power law) or J for |j-k| = 1 only.
struct SpinChainModel {
  int num_sites = 2;
  double J = -1.0;
  double u = 1.0;
  double g = 0.0;
  CouplingRange range = CouplingRange::PowerLaw;

  void validate() const;
  double coupling(int j, int k) const;
  /// Energy scale used for dimensionless time, J_eff = -u J.
  double effective_coupling() const { return -u * J; }
};

/// S_axis on one site, i.e. sigma_axis / 2.
OperatorSum spin_operator(int num_sites, int site, Axis axis);

/// sum_{j<k} J_jk [S_a S_a - (S_b S_b + S_c S_c) / 2] with a the given axis.
OperatorSum build_dipolar(const SpinChainModel& model, Axis axis);

/// u H_Dipy + g Z.
OperatorSum build_transverse_dipolar(const SpinChainModel& model);

/// sum_j S_axis^j.
OperatorSum build_collective(int num_sites, Axis axis);
/// sum_j n . S_j for a direction n (normalized internally).
OperatorSum build_collective(int num_sites, const std::array<double, 3>& n);

/// Physical parameters to dimensionless ones: J_eff = -u J_nn in rad/s and the
/// product J_eff t for t in seconds.
double effective_coupling(double u, double j_nearest);
double dimensionless_time(double u, double j_nearest, double seconds);

}  // namespace chainsim
