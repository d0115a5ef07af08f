#include "chainsim/floquet.hpp"

#include "chainsim/dynamics.hpp"
#include "chainsim/models.hpp"

#include <cmath>

namespace chainsim {

double PulseSequence::period() const {
  double t = pulse_width * static_cast<double>(pulses.size());
  for (double d : delays) t += d;
  return t;
}

void PulseSequence::validate() const {
  if (delays.size() != pulses.size() + 1) {
    throw std::invalid_argument("pulse sequence needs one more delay than pulses");
  }
  for (double d : delays) {
    if (!(d >= 0.0)) throw std::invalid_argument("pulse sequence has a negative delay");
  }
  if (!(pulse_width >= 0.0)) throw std::invalid_argument("pulse width must be >= 0");
}

PulseSequence build_sequence(SequenceKind kind, double u, double tau, double pulse_width) {
  if (!(tau > 0.0)) throw std::invalid_argument("build_sequence: tau must be > 0");
  const bool fwd = kind == SequenceKind::Forward;
  // outer spacing a, inner spacing b of each block P(a, n1, a', n2, 2b, n2, a', n1, a)
  double first;
  double second;
  double middle;
  if (fwd) {
    if (u < -0.5 || u > 1.0) {
      throw std::invalid_argument("build_sequence: forward sequence needs u in [-1/2, 1]");
    }
    first = tau * (1 - u);
    second = tau * (1 + 2 * u);
    middle = 2 * tau * (1 - u);
  } else {
    if (u < -1.0 || u > 0.5) {
      throw std::invalid_argument("build_sequence: backward sequence needs u in [-1, 1/2]");
    }
    first = tau * (1 + u);
    second = tau * (1 + u);
    middle = 2 * tau * (1 - 2 * u);
  }
  const double px = 0.0;
  const double py = M_PI / 2;
  const double a = fwd ? px : py;
  const double b = fwd ? py : px;

  PulseSequence seq;
  seq.u = u;
  seq.tau = tau;
  seq.pulse_width = pulse_width;
  std::vector<double> centre;
  for (int block = 0; block < 4; ++block) {
    const double flip = block < 2 ? 0.0 : M_PI;
    for (double ph : {a, b, b, a}) seq.pulses.push_back({ph + flip, M_PI / 2});
    // delays up to the block's last pulse; the closing spacing merges with the
    // next block's opening one
    centre.push_back(block == 0 ? first : 2 * first);
    centre.push_back(second);
    centre.push_back(middle);
    centre.push_back(second);
  }
  centre.push_back(first);
  // spacings run between pulse midpoints; the free part loses half a width on
  // each side that touches a pulse
  for (std::size_t k = 0; k < centre.size(); ++k) {
    double d = centre[k];
    if (k > 0) d -= 0.5 * pulse_width;
    if (k + 1 < centre.size()) d -= 0.5 * pulse_width;
    if (d < -1e-15) {
      throw std::invalid_argument("build_sequence: pulse width exceeds a pulse spacing");
    }
    seq.delays.push_back(std::max(d, 0.0));
  }
  seq.validate();
  return seq;
}

PulseSequence phase_shifted(const PulseSequence& seq, double phi) {
  PulseSequence out = seq;
  for (auto& p : out.pulses) p.phase += phi;
  return out;
}

Rotation rotation_matrix(const Pulse& p, double fraction) {
  const Eigen::Vector3d n(std::cos(p.phase), std::sin(p.phase), 0.0);
  return Eigen::AngleAxisd(p.angle * fraction, n).toRotationMatrix();
}

Rotation rf_cycle_rotation(const PulseSequence& seq) {
  Rotation m = Rotation::Identity();
  for (const auto& p : seq.pulses) m = rotation_matrix(p) * m;
  return m;
}

namespace {

Pauli letter(int a) { return a == 0 ? Pauli::X : (a == 1 ? Pauli::Y : Pauli::Z); }

int axis_index(Pauli p) {
  switch (p) {
    case Pauli::X: return 0;
    case Pauli::Y: return 1;
    case Pauli::Z: return 2;
    case Pauli::I: break;
  }
  return -1;
}

void expand_string(PauliString s, int site, int num_sites, PauliString built, Complex c,
                   const Rotation& m, std::vector<OperatorSum::Term>& out) {
  if (std::abs(c) < 1e-300) return;
  if (site == num_sites) {
    out.emplace_back(built, c);
    return;
  }
  const int a = axis_index(s.at(site));
  if (a < 0) {
    expand_string(s, site + 1, num_sites, built, c, m, out);
    return;
  }
  for (int b = 0; b < 3; ++b) {
    const double f = m(b, a);
    if (std::abs(f) < 1e-15) continue;
    expand_string(s, site + 1, num_sites, built.with(site, letter(b)), c * f, m, out);
  }
}

}  // namespace

OperatorSum rotate_operator(const OperatorSum& a, const Rotation& m) {
  std::vector<OperatorSum::Term> terms;
  for (const auto& [s, c] : a.terms()) {
    expand_string(s, 0, a.num_sites(), PauliString{}, c, m, terms);
  }
  return OperatorSum(a.num_sites(), std::move(terms));
}

std::vector<Frame> toggling_hamiltonians(const PulseSequence& seq, const OperatorSum& h_int,
                                         int pulse_substeps) {
  seq.validate();
  if (pulse_substeps < 1) throw std::invalid_argument("toggling_hamiltonians: need >= 1 substep");
  std::vector<Frame> frames;
  // accumulated rotation M = R_k ... R_1; in the toggling frame
  // S_a -> sum_b M(a, b) S_b
  Rotation acc = Rotation::Identity();
  const auto add = [&](const Rotation& m, double duration) {
    if (duration <= 0.0) return;
    frames.push_back({rotate_operator(h_int, m.transpose()), duration});
  };
  for (std::size_t k = 0; k < seq.delays.size(); ++k) {
    add(acc, seq.delays[k]);
    if (k == seq.pulses.size()) break;
    const Pulse& p = seq.pulses[k];
    if (seq.pulse_width > 0.0) {
      const double dt = seq.pulse_width / pulse_substeps;
      for (int i = 0; i < pulse_substeps; ++i) {
        add(rotation_matrix(p, (i + 0.5) / pulse_substeps) * acc, dt);
      }
    }
    acc = rotation_matrix(p) * acc;
  }
  if (frames.empty()) frames.push_back({h_int, seq.period()});
  return frames;
}

OperatorSum average_hamiltonian(const std::vector<Frame>& frames, int order) {
  if (frames.empty()) throw std::invalid_argument("average_hamiltonian: no frames");
  if (order != 0 && order != 1) throw std::invalid_argument("average_hamiltonian: order must be 0 or 1");
  const int n = frames.front().h.num_sites();
  double tc = 0.0;
  for (const auto& f : frames) tc += f.duration;
  OperatorSum out(n);
  if (order == 0) {
    for (const auto& f : frames) out += (f.duration / tc) * f.h;
    return out;
  }
  // (-i / 2 t_c) sum_{k > l} d_k d_l [H_k, H_l]
  OperatorSum earlier(n);
  for (const auto& f : frames) {
    if (!earlier.empty()) out += f.duration * commutator(f.h, earlier);
    earlier += f.duration * f.h;
  }
  return out * Complex{0.0, -0.5 / tc};
}

Matrix collective_rotation(int num_sites, const Pulse& p, double fraction) {
  check_dense_sites(num_sites);
  const double half = 0.5 * p.angle * fraction;
  const Complex nx = std::cos(p.phase);
  const Complex ny = std::sin(p.phase);
  // exp(-i half (nx sigma_x + ny sigma_y)), basis (up, down)
  Eigen::Matrix2cd u;
  u(0, 0) = std::cos(half);
  u(1, 1) = std::cos(half);
  u(0, 1) = -kI * std::sin(half) * (nx - kI * ny);
  u(1, 0) = -kI * std::sin(half) * (nx + kI * ny);
  const Index dim = Index{1} << num_sites;
  Matrix m(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    for (Index r = 0; r < dim; ++r) {
      Complex v = 1.0;
      for (int j = 0; j < num_sites && v != Complex{}; ++j) v *= u((r >> j) & 1, (c >> j) & 1);
      m(r, c) = v;
    }
  }
  return m;
}

Matrix cycle_propagator(const PulseSequence& seq, const OperatorSum& h_int) {
  seq.validate();
  const int n = h_int.num_sites();
  if (n > kMaxFloquetSites) {
    throw ResourceGuardError("cycle_propagator: dense propagators limited to L <= " +
                             std::to_string(kMaxFloquetSites));
  }
  const EigenSystem eig = EigenSystem::diagonalize(h_int);
  const Matrix h = to_dense(h_int).matrix();
  const Index dim = Index{1} << n;
  Matrix u = Matrix::Identity(dim, dim);
  for (std::size_t k = 0; k < seq.delays.size(); ++k) {
    if (seq.delays[k] > 0.0) u = (propagator(eig, seq.delays[k]) * u).eval();
    if (k == seq.pulses.size()) break;
    const Pulse& p = seq.pulses[k];
    if (seq.pulse_width > 0.0) {
      const OperatorSum rf =
          (p.angle / seq.pulse_width) *
          build_collective(n, {std::cos(p.phase), std::sin(p.phase), 0.0});
      u = (unitary_from_hermitian(h + to_dense(rf).matrix(), seq.pulse_width) * u).eval();
    } else {
      u = (collective_rotation(n, p) * u).eval();
    }
  }
  return u;
}

namespace {

Matrix z_phase(const Matrix& z, double angle) {
  // e^{-i angle Z} for diagonal Z
  ComplexVector d(z.rows());
  for (Index i = 0; i < z.rows(); ++i) d(i) = std::exp(-kI * angle * z(i, i).real());
  return d.asDiagonal();
}

void require_diagonal(const Matrix& z) {
  if (!DenseOperator(z).is_diagonal()) throw std::invalid_argument("phase shift generator must be diagonal");
}

}  // namespace

Matrix phase_shifted_product(const Matrix& u_cycle, const Matrix& z, double phi, int n) {
  require_diagonal(z);
  Matrix u = Matrix::Identity(u_cycle.rows(), u_cycle.cols());
  for (int k = 1; k <= n; ++k) {
    const double a = (k - 1) * phi;
    u = (z_phase(z, a) * u_cycle * z_phase(z, -a) * u).eval();
  }
  return u;
}

Matrix telescoped_product(const Matrix& u_cycle, const Matrix& z, double phi, int n) {
  require_diagonal(z);
  const Matrix step = z_phase(z, -phi) * u_cycle;
  Matrix u = Matrix::Identity(u_cycle.rows(), u_cycle.cols());
  for (int k = 0; k < n; ++k) u = (step * u).eval();
  return z_phase(z, n * phi) * u;
}

PhaseShiftReport phase_shift_field(const PulseSequence& seq, const OperatorSum& h_int,
                                   int n_cycles, double phi) {
  if (n_cycles < 1) throw std::invalid_argument("phase_shift_field: need at least one cycle");
  const int n = h_int.num_sites();
  const double tc = seq.period();
  const Matrix z = to_dense(build_collective(n, Axis::Z)).matrix();

  PhaseShiftReport rep;
  rep.g = -phi / tc;
  const Index dim = Index{1} << n;
  rep.exact = Matrix::Identity(dim, dim);
  for (int k = 1; k <= n_cycles; ++k) {
    rep.exact = (cycle_propagator(phase_shifted(seq, (k - 1) * phi), h_int) * rep.exact).eval();
  }
  const Matrix u1 = cycle_propagator(seq, h_int);
  rep.telescoping_error = operator_norm(rep.exact - telescoped_product(u1, z, phi, n_cycles));

  rep.frame_correction = z_phase(z, n_cycles * phi);
  const Matrix h_flq = hermitian_generator(u1, tc);
  rep.approximate =
      rep.frame_correction * unitary_from_hermitian(h_flq + rep.g * z, n_cycles * tc);
  rep.absorption_error = operator_norm(rep.exact - rep.approximate);

  const Matrix h0 = to_dense(average_hamiltonian(toggling_hamiltonians(seq, h_int), 0)).matrix();
  rep.zeroth_order_error = operator_norm(
      rep.exact - rep.frame_correction * unitary_from_hermitian(h0 + rep.g * z, n_cycles * tc));
  return rep;
}

EngineeringReport verify_engineering(const PulseSequence& seq, const OperatorSum& h_int,
                                     int n_cycles) {
  if (n_cycles < 1) throw std::invalid_argument("verify_engineering: need at least one cycle");
  if (h_int.num_sites() > kMaxFloquetSites) {
    throw ResourceGuardError("verify_engineering: dense propagators limited to L <= " +
                             std::to_string(kMaxFloquetSites));
  }
  const auto frames = toggling_hamiltonians(seq, h_int);
  EngineeringReport rep;
  rep.h_zero = average_hamiltonian(frames, 0);
  rep.first_order_norm = average_hamiltonian(frames, 1).max_abs_coefficient();
  const double tc = seq.period();
  const Matrix u = cycle_propagator(seq, h_int);
  const Matrix h0 = to_dense(rep.h_zero).matrix();
  rep.cycle_defect = operator_norm(u - unitary_from_hermitian(h0, tc));
  Matrix un = Matrix::Identity(u.rows(), u.cols());
  for (int k = 0; k < n_cycles; ++k) un = (u * un).eval();
  rep.total_defect = operator_norm(un - unitary_from_hermitian(h0, n_cycles * tc));
  return rep;
}

}  // namespace chainsim
