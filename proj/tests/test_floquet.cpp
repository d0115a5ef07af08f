#include "chainsim/fitting.hpp"
#include "chainsim/floquet.hpp"
#include "chainsim/models.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace chainsim;
using namespace testutil;

namespace {

SpinChainModel chain(int n) {
  SpinChainModel m;
  m.num_sites = n;
  return m;
}

double total_duration(const std::vector<Frame>& frames) {
  return std::accumulate(frames.begin(), frames.end(), 0.0,
                         [](double s, const Frame& f) { return s + f.duration; });
}

}  // namespace

TEST(Floquet, SequenceLayout) {
  const PulseSequence f = build_sequence(SequenceKind::Forward, 0.2, 4.0);
  EXPECT_EQ(f.pulses.size(), 16u);
  EXPECT_EQ(f.delays.size(), 17u);
  EXPECT_NEAR(f.period(), 96.0, 1e-12);
  EXPECT_NEAR(f.delays[0], 4.0 * 0.8, 1e-12);
  EXPECT_NEAR(f.delays[1], 4.0 * 1.4, 1e-12);
  // blocks 3 and 4 carry the opposite pulse directions
  for (int b = 0; b < 4; ++b) {
    const double sign = b < 2 ? 1.0 : -1.0;
    const Pulse& p = f.pulses[static_cast<std::size_t>(4 * b)];
    EXPECT_NEAR(std::cos(p.phase), sign, 1e-12) << "block " << b;
  }
  const PulseSequence flat = build_sequence(SequenceKind::Forward, 0.0, 1.0);
  EXPECT_NEAR(flat.delays[1], flat.delays[2] / 2, 1e-12);
  EXPECT_NEAR(flat.delays[0], 1.0, 1e-12);
  EXPECT_NEAR(flat.delays[1], 1.0, 1e-12);
  EXPECT_NEAR(build_sequence(SequenceKind::Backward, 0.3, 1.0).period(), 24.0, 1e-12);
  EXPECT_THROW(build_sequence(SequenceKind::Forward, 1.5, 1.0), std::invalid_argument);
  EXPECT_THROW(build_sequence(SequenceKind::Backward, 0.8, 1.0), std::invalid_argument);
  EXPECT_THROW(build_sequence(SequenceKind::Forward, 0.2, 0.0), std::invalid_argument);
  EXPECT_THROW(build_sequence(SequenceKind::Forward, 0.2, 1.0, 5.0), std::invalid_argument);
}

TEST(Floquet, CyclicCondition) {
  for (auto kind : {SequenceKind::Forward, SequenceKind::Backward}) {
    const Rotation r = rf_cycle_rotation(build_sequence(kind, 0.2, 1.0));
    EXPECT_LT((r - Rotation::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Floquet, SingleFramesAndRotations) {
  const OperatorSum sz = build_collective(3, Axis::Z);
  const OperatorSum sy = build_collective(3, Axis::Y);
  const OperatorSum rotated = rotate_operator(sz, rotation_matrix(Pulse{0.0, M_PI / 2}));
  EXPECT_LT(std::min(max_coefficient_distance(rotated, sy), max_coefficient_distance(rotated, -sy)), 1e-14);
  // the symbolic rotation matches conjugation by the dense pulse
  const Pulse p{0.3, 1.1};
  const Matrix r = collective_rotation(3, p);
  const Matrix h = to_dense(build_dipolar(chain(3), Axis::Z)).matrix();
  const OperatorSum hr = rotate_operator(build_dipolar(chain(3), Axis::Z), rotation_matrix(p));
  EXPECT_LT((r * h * r.adjoint() - to_dense(hr).matrix()).cwiseAbs().maxCoeff(), 1e-12);

  PulseSequence empty;
  empty.delays = {2.5};
  const OperatorSum hint = build_dipolar(chain(3), Axis::Z);
  const auto frames = toggling_hamiltonians(empty, hint);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_NEAR(frames[0].duration, 2.5, 1e-15);
  EXPECT_EQ(frames[0].h, hint);
  EXPECT_THROW(average_hamiltonian({}, 0), std::invalid_argument);
  EXPECT_THROW(average_hamiltonian(frames, 2), std::invalid_argument);
}

TEST(Floquet, FrameDurationsFollowDelays) {
  const PulseSequence f = build_sequence(SequenceKind::Forward, 0.2, 1.0);
  const auto frames = toggling_hamiltonians(f, build_dipolar(chain(3), Axis::Z));
  ASSERT_EQ(frames.size(), f.delays.size());
  for (std::size_t k = 0; k < frames.size(); ++k) EXPECT_NEAR(frames[k].duration, f.delays[k], 1e-15);
  EXPECT_NEAR(total_duration(frames), 24.0, 1e-12);
  const PulseSequence w = build_sequence(SequenceKind::Forward, 0.2, 1.0, 0.1);
  const auto wf = toggling_hamiltonians(w, build_dipolar(chain(3), Axis::Z), 4);
  EXPECT_NEAR(total_duration(wf), 24.0, 1e-12);
  for (const auto& fr : wf) EXPECT_GE(fr.duration, 0.0);
}

TEST(Floquet, AverageHamiltonianOfBothSequences) {
  const double u = 0.2;
  const OperatorSum hint = build_dipolar(chain(5), Axis::Z);
  const OperatorSum dy = build_dipolar(chain(5), Axis::Y);
  const auto fwd = toggling_hamiltonians(build_sequence(SequenceKind::Forward, u, 1.0), hint);
  const auto bwd = toggling_hamiltonians(build_sequence(SequenceKind::Backward, u, 1.0), hint);
  EXPECT_LT(max_coefficient_distance(average_hamiltonian(fwd, 0), u * dy), 1e-14);
  EXPECT_LT(max_coefficient_distance(average_hamiltonian(bwd, 0), -u * dy), 1e-14);
  EXPECT_LT(average_hamiltonian(fwd, 1).max_abs_coefficient(), 1e-10);
  EXPECT_LT(average_hamiltonian(bwd, 1).max_abs_coefficient(), 1e-10);
  const auto flat = toggling_hamiltonians(build_sequence(SequenceKind::Forward, 0.0, 1.0), hint);
  EXPECT_LT(average_hamiltonian(flat, 0).max_abs_coefficient(), 1e-14);
}

TEST(Floquet, ReorderedBlockBreaksFirstOrderCancellation) {
  const OperatorSum hint = build_dipolar(chain(4), Axis::Z);
  PulseSequence f = build_sequence(SequenceKind::Forward, 0.2, 1.0);
  std::swap(f.pulses[0], f.pulses[1]);
  std::swap(f.pulses[2], f.pulses[3]);
  EXPECT_GT(average_hamiltonian(toggling_hamiltonians(f, hint), 1).max_abs_coefficient(), 1e-3);
}

TEST(Floquet, FirstOrderMatchesDenseMagnus) {
  // two frames: H1 = -(i / 2 t) [H2, H1] t1 t2
  const OperatorSum a = build_dipolar(chain(3), Axis::Z);
  const OperatorSum b = build_collective(3, Axis::X);
  const std::vector<Frame> frames{{a, 0.3}, {b, 0.5}};
  const OperatorSum expect = Complex{0.0, -0.5 / 0.8} * (0.3 * 0.5) * commutator(b, a);
  EXPECT_LT(max_coefficient_distance(average_hamiltonian(frames, 1), expect), 1e-14);
}

TEST(Floquet, PropagatorDefectIsThirdOrder) {
  const OperatorSum hint = build_dipolar(chain(4), Axis::Z);
  std::vector<double> taus;
  std::vector<double> defect;
  for (double tau : {0.01, 0.02, 0.04, 0.1}) {
    taus.push_back(tau);
    defect.push_back(verify_engineering(build_sequence(SequenceKind::Forward, 0.2, tau), hint, 1).cycle_defect);
  }
  EXPECT_NEAR(log_log_slope(taus, defect), 3.0, 0.3);
  EXPECT_NEAR(defect[1] / defect[0], 8.0, 0.8);
}

TEST(Floquet, ZeroInteractionIsExact) {
  const EngineeringReport rep =
      verify_engineering(build_sequence(SequenceKind::Forward, 0.2, 1.0), OperatorSum(4), 5);
  EXPECT_LT(rep.cycle_defect, 1e-12);
  EXPECT_LT(rep.total_defect, 1e-12);
  EXPECT_THROW(verify_engineering(build_sequence(SequenceKind::Forward, 0.2, 1.0), OperatorSum(11), 1),
               ResourceGuardError);
}

TEST(Floquet, TelescopingIdentityOnRandomCycles) {
  std::mt19937_64 rng(5);
  const Matrix z = to_dense(build_collective(3, Axis::Z)).matrix();
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix u = unitary_from_hermitian(random_hermitian(rng, 8), 1.0);
    const double phi = 0.7 * (trial + 1) / 5.0;
    EXPECT_LT(operator_norm(phase_shifted_product(u, z, phi, 7) - telescoped_product(u, z, phi, 7)), 1e-12);
  }
}

TEST(Floquet, PhaseShiftAbsorption) {
  const OperatorSum hint = build_dipolar(chain(4), Axis::Z);
  const PulseSequence seq = build_sequence(SequenceKind::Forward, 0.2, 0.05);
  const PhaseShiftReport zero = phase_shift_field(seq, hint, 4, 0.0);
  EXPECT_NEAR(zero.g, 0.0, 0.0);
  EXPECT_LT(zero.absorption_error, 1e-10);
  EXPECT_LT(zero.telescoping_error, 1e-12);
  const PhaseShiftReport shifted = phase_shift_field(seq, hint, 4, 1e-3);
  EXPECT_LT(shifted.telescoping_error, 1e-12);
  EXPECT_NEAR(shifted.g, -1e-3 / seq.period(), 1e-15);
  EXPECT_LT(shifted.absorption_error, 1e-3);
}

TEST(Floquet, FinitePulsesConvergeToDeltaLimit) {
  const OperatorSum hint = build_dipolar(chain(3), Axis::Z);
  const Matrix ideal = cycle_propagator(build_sequence(SequenceKind::Forward, 0.2, 0.2), hint);
  double prev = 1e9;
  for (double tw : {0.04, 0.02, 0.01}) {
    const double d = operator_norm(cycle_propagator(build_sequence(SequenceKind::Forward, 0.2, 0.2, tw), hint) - ideal);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 1e-2);
}
