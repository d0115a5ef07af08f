#include "chainsim/models.hpp"

#include <cmath>

namespace chainsim {

Axis parse_axis(const std::string& s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw std::invalid_argument("invalid axis '" + s + "' (expected x, y or z)");
}

CouplingRange parse_range(const std::string& s) {
  if (s == "power_law" || s == "full") return CouplingRange::PowerLaw;
  if (s == "nearest_neighbor" || s == "nn") return CouplingRange::NearestNeighbor;
  throw std::invalid_argument("invalid coupling range '" + s +
                              "' (expected power_law or nearest_neighbor)");
}

std::string to_string(CouplingRange r) {
  return r == CouplingRange::PowerLaw ? "power_law" : "nearest_neighbor";
}

void SpinChainModel::validate() const {
  if (num_sites < 2 || num_sites > kMaxPauliSites) {
    throw std::invalid_argument("chain length must be in [2, 64], got " +
                                std::to_string(num_sites));
  }
  if (!std::isfinite(J) || !std::isfinite(u) || !std::isfinite(g)) {
    throw std::invalid_argument("model parameters J, u, g must be finite");
  }
}

double SpinChainModel::coupling(int j, int k) const {
  const int d = std::abs(j - k);
  if (d == 0) return 0.0;
  if (range == CouplingRange::NearestNeighbor) return d == 1 ? J : 0.0;
  return J / (static_cast<double>(d) * d * d);
}

namespace {

Pauli pauli_of(Axis a) {
  switch (a) {
    case Axis::X: return Pauli::X;
    case Axis::Y: return Pauli::Y;
    case Axis::Z: return Pauli::Z;
  }
  throw std::invalid_argument("invalid axis");
}

}  // namespace

OperatorSum spin_operator(int num_sites, int site, Axis axis) {
  if (site < 0 || site >= num_sites) throw std::out_of_range("site index out of range");
  return OperatorSum::single(num_sites, PauliString::single(site, pauli_of(axis)), 0.5);
}

OperatorSum build_dipolar(const SpinChainModel& model, Axis axis) {
  model.validate();
  const int n = model.num_sites;
  const Pauli a = pauli_of(axis);
  std::array<Pauli, 2> others{};
  int idx = 0;
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
    if (p != a) others[static_cast<std::size_t>(idx++)] = p;
  }
  std::vector<OperatorSum::Term> terms;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double c = model.coupling(j, k);
      if (c == 0.0) continue;
      // S_a S_a = sigma_a sigma_a / 4
      terms.emplace_back(PauliString::single(j, a).with(k, a), 0.25 * c);
      for (Pauli p : others) terms.emplace_back(PauliString::single(j, p).with(k, p), -0.125 * c);
    }
  }
  return OperatorSum(n, std::move(terms));
}

OperatorSum build_collective(int num_sites, Axis axis) {
  std::vector<OperatorSum::Term> terms;
  for (int j = 0; j < num_sites; ++j) terms.emplace_back(PauliString::single(j, pauli_of(axis)), 0.5);
  return OperatorSum(num_sites, std::move(terms));
}

OperatorSum build_collective(int num_sites, const std::array<double, 3>& n) {
  const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (!(norm > 0.0)) throw std::invalid_argument("collective direction must be nonzero");
  OperatorSum out(num_sites);
  const Axis axes[3] = {Axis::X, Axis::Y, Axis::Z};
  for (int a = 0; a < 3; ++a) {
    if (n[static_cast<std::size_t>(a)] != 0.0) {
      out += (n[static_cast<std::size_t>(a)] / norm) * build_collective(num_sites, axes[a]);
    }
  }
  return out;
}

OperatorSum build_transverse_dipolar(const SpinChainModel& model) {
  model.validate();
  OperatorSum h = model.u * build_dipolar(model, Axis::Y);
  if (model.g != 0.0) h += model.g * build_collective(model.num_sites, Axis::Z);
  return h;
}

double effective_coupling(double u, double j_nearest) { return -u * j_nearest; }

double dimensionless_time(double u, double j_nearest, double seconds) {
  return effective_coupling(u, j_nearest) * seconds;
}

}  // namespace chainsim
