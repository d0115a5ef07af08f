#include "chainsim/floquet.hpp"
#include "chainsim/models.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace chainsim;

namespace {

SpinChainModel chain(int n, double g = 0.0, double u = 1.0) {
  SpinChainModel m;
  m.num_sites = n;
  m.g = g;
  m.u = u;
  return m;
}

}  // namespace

TEST(Model, CouplingPolicies) {
  SpinChainModel m = chain(5);
  m.J = 1.0;
  EXPECT_DOUBLE_EQ(m.coupling(0, 2), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(m.coupling(3, 1), m.coupling(1, 3));
  EXPECT_DOUBLE_EQ(m.coupling(0, 4), 1.0 / 64.0);
  SpinChainModel nn = m;
  nn.range = CouplingRange::NearestNeighbor;
  for (int j = 0; j < 5; ++j) {
    for (int k = 0; k < 5; ++k) {
      EXPECT_DOUBLE_EQ(nn.coupling(j, k), std::abs(j - k) == 1 ? m.coupling(j, k) : 0.0);
    }
  }
}

TEST(Model, ValidationAndParsing) {
  EXPECT_THROW(chain(1).validate(), std::invalid_argument);
  SpinChainModel bad = chain(3);
  bad.g = std::nan("");
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_EQ(parse_range("nn"), CouplingRange::NearestNeighbor);
  EXPECT_EQ(parse_axis("y"), Axis::Y);
  EXPECT_THROW(parse_axis("w"), std::invalid_argument);
  EXPECT_THROW(parse_range("cubic"), std::invalid_argument);
}

TEST(Model, SinglePairDipolar) {
  SpinChainModel m = chain(2);
  m.J = 1.0;
  const OperatorSum h = build_dipolar(m, Axis::Z);
  const OperatorSum expect = product(spin_operator(2, 0, Axis::Z), spin_operator(2, 1, Axis::Z)) -
                             0.5 * (product(spin_operator(2, 0, Axis::X), spin_operator(2, 1, Axis::X)) +
                                    product(spin_operator(2, 0, Axis::Y), spin_operator(2, 1, Axis::Y)));
  EXPECT_LT(max_coefficient_distance(h, expect), 1e-15);
}

TEST(Model, HamiltoniansHermitianTraceless) {
  const OperatorSum h = build_transverse_dipolar(chain(6, 0.7, 0.3));
  EXPECT_TRUE(h.is_hermitian());
  EXPECT_EQ(h.trace_coefficient(), Complex{});
  for (const auto& [s, c] : h.terms()) EXPECT_EQ(c.imag(), 0.0);
}

TEST(Model, AxisYIsRotatedAxisZ) {
  // the pi/2 pulse about x takes S_z to S_y, so it carries H_Dipz to H_Dipy
  const SpinChainModel m = chain(4);
  const Matrix r = collective_rotation(4, Pulse{0.0, M_PI / 2});
  const Matrix rotated = r.adjoint() * to_dense(build_dipolar(m, Axis::Z)).matrix() * r;
  EXPECT_LT((rotated - to_dense(build_dipolar(m, Axis::Y)).matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Model, ConservationLimits) {
  const OperatorSum z = build_collective(5, Axis::Z);
  const OperatorSum y = build_collective(5, Axis::Y);
  EXPECT_LT(commutator(build_transverse_dipolar(chain(5, 0.8, 0.0)), z).max_abs_coefficient(), 1e-15);
  EXPECT_LT(commutator(build_transverse_dipolar(chain(5, 0.0, 1.0)), y).max_abs_coefficient(), 1e-14);
  EXPECT_GT(commutator(build_transverse_dipolar(chain(5, 0.8, 1.0)), z).max_abs_coefficient(), 0.1);
}

TEST(Model, CollectiveOperators) {
  const OperatorSum z = build_collective(4, Axis::Z);
  EXPECT_EQ(z.size(), 4u);
  EXPECT_NEAR(hs_norm_sq(to_dense(z)), 1.0, 1e-15);  // L / 4
  EXPECT_LT(max_coefficient_distance(build_collective(4, {0.0, 1.0, 0.0}), build_collective(4, Axis::Y)), 1e-15);
  EXPECT_THROW(build_collective(4, {0.0, 0.0, 0.0}), std::invalid_argument);
  // 2 O_n has an integer spectrum, so a full 2 pi turn is the identity
  const OperatorSum o = build_collective(4, {0.3, -0.5, 0.8});
  const Matrix u = unitary_from_hermitian(to_dense(2.0 * o).matrix(), 2.0 * M_PI);
  EXPECT_LT((u - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Model, PhysicalUnits) {
  // J_nn = -33 krad/s, u = 0.2 and t_c = 96 us
  EXPECT_DOUBLE_EQ(effective_coupling(0.2, -33e3), 6.6e3);
  EXPECT_NEAR(dimensionless_time(0.2, -33e3, 96e-6), 0.62, 0.015);
  EXPECT_DOUBLE_EQ(chain(3, 0.0, 0.2).effective_coupling(), 0.2);
}
