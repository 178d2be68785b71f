#include "support.hpp"

using namespace bubble_lab;
using testing_support::prof;

TEST(KernelBasis, ShapeAndClosedForms) {
  const auto& P = prof(4, 3);
  auto basis = kernel_basis(P);
  ASSERT_EQ(basis.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(basis[i].index, i);
  // dilation pair at the origin: n U(0) / (q0 + 1) = 1
  EXPECT_NEAR(basis[0].Psi[0], 1, 1e-12);
  // translation radial factor is U'(r) = -r/4 (1 + r^2/8)^{-2}
  for (std::size_t i = 1; i < P.size(); i += 97) {
    double r = P.r[i];
    if (r > 10) break;
    double exact = -r / 4 / std::pow(1 + r * r / 8, 2);
    EXPECT_NEAR(basis[1].Psi[i], exact, 1e-6 * std::max(1.0, std::abs(exact))) << r;
  }
}

TEST(KernelBasis, ResidualsVanishOnAcceptancePairs) {
  for (const auto& s : acceptance::acceptance_pairs()) {
    const auto& P = acceptance::profile(s);
    for (const auto& kp : kernel_basis(P)) EXPECT_LE(linearized_residual(P, kp), 1e-6) << acceptance::label(s);
  }
}

TEST(KernelBasis, BrokenPairingIsDetected) {
  const auto& P = prof(4, 3);
  auto kp = kernel_basis(P)[0];
  for (double& v : kp.Psi) v *= 1.01;
  EXPECT_GT(linearized_residual(P, kp), 1e-3);
}

TEST(ModeDimension, OneOneZero) {
  for (const auto& s : acceptance::acceptance_pairs()) {
    const auto& P = acceptance::profile(s);
    EXPECT_EQ(mode_kernel_dimension(P, 0).dimension, 1) << acceptance::label(s);
    EXPECT_EQ(mode_kernel_dimension(P, 1).dimension, 1) << acceptance::label(s);
    EXPECT_EQ(mode_kernel_dimension(P, 2).dimension, 0) << acceptance::label(s);
  }
}

TEST(ModeDimension, NegativeModeRejected) { EXPECT_KIND(mode_kernel_dimension(prof(4, 3), -1), ErrorKind::invalid_argument); }

TEST(Shooting, DichotomyOnEitherSideOfTheBracket) {
  for (const auto& s : acceptance::talenti_pairs()) {
    const auto& P = acceptance::profile(s);
    int above = detail::classify_shot(P.pair, P.config, P.v0 * 1.05);
    int below = detail::classify_shot(P.pair, P.config, P.v0 * 0.95);
    EXPECT_NE(above, 0);
    EXPECT_NE(below, 0);
    EXPECT_EQ(above, -below) << acceptance::label(s);
  }
}
