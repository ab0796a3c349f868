#include <gtest/gtest.h>

#include "cfwm/system_model.hpp"

using namespace cfwm;

TEST(LevelScheme, PresetIsConsistent) {
  const auto s = presets::rb87_diamond_scheme();
  EXPECT_NO_THROW(s.validate());
  EXPECT_LT(s.energy_consistency(), 0.01);
  EXPECT_EQ(s.find_transition(3, 2), 2);
  EXPECT_EQ(s.find_transition(2, 3), -1);
  auto bad = s;
  bad.energies[2] *= 1.05;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(LevelScheme, PresetOrientations) {
  const auto s = presets::rb87_diamond_scheme();
  const auto& t = s.transitions;
  EXPECT_EQ(t[0].orientation, t[2].orientation);
  EXPECT_EQ(t[1].orientation, t[3].orientation);
  EXPECT_EQ(std::abs(t[0].orientation.dot(t[1].orientation)), 0.0);
}

TEST(BuildHamiltonian, SingleAtomMatrixEntries) {
  for (double scale : {1.0, 2.0}) {
    presets::DiamondParameters p;
    p.atoms = 1;
    p.hamiltonian.drive_coupling_scale = scale;
    const CMatrix h = presets::rb87_diamond(p).h_sys();
    ASSERT_EQ(h.rows(), 4);
    EXPECT_NEAR(h(0, 0).real(), 70.0 / 3.0, 1e-12);
    EXPECT_NEAR(h(1, 1).real(), -140.0 / 3.0, 1e-12);
    EXPECT_NEAR(h(2, 2).real(), 70.0 / 3.0, 1e-12);
    EXPECT_NEAR(std::abs(h(3, 3)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(h(0, 1) - scale * 7.5), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(h(1, 2) - scale * 6.3), 0.0, 1e-12);
    EXPECT_EQ(h(0, 2), Complex{});
    EXPECT_EQ(h(0, 3), Complex{});
  }
}

TEST(BuildHamiltonian, GeneralDetuningDiagonal) {
  const double d1 = -31.0, d2 = 4.5;
  presets::DiamondParameters p;
  p.atoms = 1;
  p.delta1 = d1;
  p.delta2 = d2;
  p.lam01 = p.lam12 = 0.0;
  const CMatrix h = presets::rb87_diamond(p).h_sys();
  EXPECT_NEAR(h(0, 0).real(), -(d1 + d2) / 3.0, 1e-12);
  EXPECT_NEAR(h(1, 1).real(), (2 * d1 - d2) / 3.0, 1e-12);
  EXPECT_NEAR(h(2, 2).real(), (-d1 + 2 * d2) / 3.0, 1e-12);
  EXPECT_NEAR(h(3, 3).real(), 0.0, 1e-12);
  EXPECT_NEAR((h - CMatrix(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(BuildHamiltonian, FrameMismatchNamesTransition) {
  auto frame_error = [](double d1, double d2) {
    auto m = presets::rb87_diamond({1});
    m.frame = diamond_frame(d1, d2);
    try {
      m.h_sys();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Frame);
      return std::string(e.what());
    }
    return std::string();
  };
  // The drives were built for (-70, 0).
  EXPECT_NE(frame_error(-60.0, 0.0).find("(0,1)"), std::string::npos);
  EXPECT_NE(frame_error(-70.0, 3.0).find("(1,2)"), std::string::npos);
  EXPECT_EQ(frame_error(-70.0, 0.0), "");
}

TEST(BuildHamiltonian, CrossTransitionExchangeNeedsStaticFrame) {
  presets::DiamondParameters p;
  p.coupling.secular_threshold = 1e12;
  EXPECT_THROW(presets::rb87_diamond(p).h_sys(), Error);
}

TEST(BuildHamiltonian, HermitianAndExchangeSymmetric) {
  const CMatrix s = swap_operator(4);
  for (double r : {60.0, 120.0, 300.0, 1000.0}) {
    for (double d2 : {-8.0, 0.0, 5.0}) {
      presets::DiamondParameters p;
      p.separation_nm = r;
      p.delta2 = d2;
      const CMatrix h = presets::rb87_diamond(p).h_sys();
      EXPECT_LT(max_abs(h - h.adjoint()), 1e-12);
      EXPECT_LT(max_abs(h * s - s * h), 1e-10);
    }
  }
}

TEST(BuildHamiltonian, NoDrivesNoCouplingsIsDiagonal) {
  presets::DiamondParameters p;
  p.lam01 = p.lam12 = 0.0;
  p.couplings_enabled = false;
  const auto m = presets::rb87_diamond(p);
  const CMatrix h = m.h_sys();
  EXPECT_EQ((h - CMatrix(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
  const RVector h0 = m.frame.level_shifts(4);
  const JointSpace sp(4, 2);
  for (int i = 0; i < 16; ++i) {
    EXPECT_NEAR(h(i, i).real(), -h0(sp.level_of(i, 0)) - h0(sp.level_of(i, 1)), 1e-12);
  }
}

TEST(BuildHamiltonian, DrivePhaseFollowsDisplacement) {
  const auto base = presets::rb87_diamond();
  const CMatrix h = base.h_sys();
  // Displacement perpendicular to the lasers leaves the matrix unchanged.
  auto shifted = base;
  for (auto& r : shifted.positions) r += Vec3(0.0, 37.0, 0.0);
  EXPECT_EQ(shifted.h_sys(), h);
  // Along the lasers the Rabi terms of that emitter pick up e^{i k.d}.
  auto moved = base;
  const double dz = 55.0;
  moved.positions[1] += Vec3(0.0, 0.0, dz);
  moved.couplings = base.couplings;
  const CMatrix hm = moved.h_sys();
  const JointSpace sp(4, 2);
  const int g = sp.joint_index({0, 0});
  const int e = sp.joint_index({0, 1});
  const Complex ratio = hm(e, g) / h(e, g);
  EXPECT_NEAR(std::abs(ratio - std::exp(kI * (units::wavenumber(780.0) * dz))), 0.0, 1e-12);
}

TEST(SwapOperator, Properties) {
  const CMatrix s = swap_operator(4);
  EXPECT_EQ(s * s, CMatrix::Identity(16, 16));
  EXPECT_NEAR(std::abs(s.trace() - 4.0), 0.0, 1e-15);
  const JointSpace sp(4, 2);
  EXPECT_EQ(s * sp.product_state({0, 2}), sp.product_state({2, 0}));
  EXPECT_THROW(swap_operator(4, 3), Error);
}

TEST(RabiFromPower, ScalesWithSquareRootOfPower) {
  const double a = rabi_from_power(0.1, 1.1, 5.956);
  const double b = rabi_from_power(0.4, 1.1, 5.956);
  EXPECT_NEAR(b / a, 2.0, 1e-12);
  EXPECT_GT(a, 0.0);
  EXPECT_THROW(rabi_from_power(1.0, 0.0, 1.0), Error);
}
