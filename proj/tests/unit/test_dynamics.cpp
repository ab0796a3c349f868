#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "cfwm/dynamics.hpp"
#include "cfwm/system_model.hpp"

using namespace cfwm;

namespace {

constexpr double kGamma = 6.0;

CouplingTensors two_level_couplings(double gamma = kGamma) {
  TransitionDipole t;
  t.lower = 0;
  t.upper = 1;
  t.rate = gamma;
  t.wavelength_nm = 780.0;
  return compute_couplings({Vec3::Zero()}, {t});
}

CMatrix two_level_h(double drive, double detuning) {
  CMatrix h(2, 2);
  h << 0.0, drive, drive, -detuning;
  return h;
}

CMatrix unvec(const CVector& v, int n) { return Eigen::Map<const CMatrix>(v.data(), n, n); }
CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

CMatrix random_density(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

struct Preset {
  SystemModel model = presets::rb87_diamond();
  OperatorBasis basis{4, 2};
  CMatrix h = model.h_sys();
  GeneratorMatrix gen = build_generator(h, model.couplings, basis);
};

const Preset& preset() {
  static const Preset p;
  return p;
}

}  // namespace

TEST(Dissipator, IdentityIsAnnihilated) {
  const auto& p = preset();
  EXPECT_LT(max_abs(apply_dissipator(CMatrix::Identity(16, 16), p.model.couplings, 4)), 1e-13);
}

TEST(Dissipator, TwoLevelPopulations) {
  const auto c = two_level_couplings();
  CMatrix pe = CMatrix::Zero(2, 2), pg = CMatrix::Zero(2, 2);
  pe(1, 1) = 1.0;
  pg(0, 0) = 1.0;
  EXPECT_LT(max_abs(apply_dissipator(pe, c, 2) + kGamma * pe), 1e-14);
  EXPECT_LT(max_abs(apply_dissipator(pg, c, 2) - kGamma * pe), 1e-14);
}

TEST(Dissipator, AdjointOfOracleOnEveryBasisElement) {
  // Tr[L_H(Q) X] = Tr[Q L_S(X)] for all X, i.e. vec(L_H(Q)^T) = L_S^T vec(Q^T).
  const auto& p = preset();
  const DensityMatrixOracle oracle(CMatrix::Zero(16, 16), p.model.couplings, 4);
  const CMatrix lt = oracle.liouvillian().transpose();
  double worst = 0.0;
  for (int k = 0; k < p.basis.size(); ++k) {
    const CMatrix q = p.basis.element(k);
    const CMatrix expected = unvec(lt * vec(q.transpose()), 16).transpose();
    worst = std::max(worst, max_abs(apply_dissipator(q, p.model.couplings, 4) - expected));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Generator, RealAndConserving) {
  const auto& p = preset();
  EXPECT_LT(p.gen.imaginary_residue, 1e-10);
  EXPECT_EQ(p.gen.size(), 256);
  const RVector f = population_functional(p.basis);
  EXPECT_LT((f.transpose() * p.gen.lambda).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Generator, MatchesOracleInStateRepresentation) {
  const auto& p = preset();
  const DensityMatrixOracle oracle(p.h, p.model.couplings, 4);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix rho = random_density(16, rng);
    const RVector lhs = p.gen.lambda * state_from_density(rho, p.basis);
    const CMatrix drho = unvec(oracle.liouvillian() * vec(rho), 16);
    const RVector rhs = state_from_density(drho, p.basis);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Generator, TwoLevelDecayRow) {
  const OperatorBasis b(2, 1);
  const auto gen = build_generator(two_level_h(0.0, 0.0), two_level_couplings(), b);
  EXPECT_NEAR(gen.lambda(1, 1), -kGamma, 1e-14);
  const RVector w0 = product_initial_state(b, {1});
  for (auto method : {IntegrationMethod::Adaptive, IntegrationMethod::Exponential}) {
    IntegrationOptions o;
    o.method = method;
    o.samples = 4;
    const auto traj = integrate(gen.lambda, w0, 200.0, o);
    for (std::size_t i = 0; i < traj.times_ns.size(); ++i) {
      const double t = traj.times_ns[i] * units::kNsToRateTime;
      EXPECT_NEAR(traj.states[i](1), std::exp(-kGamma * t), 1e-9);
    }
  }
}

TEST(Generator, ConstructionErrorOnNonHermitianH) {
  const OperatorBasis b(2, 1);
  CMatrix h = two_level_h(1.0, 0.0);
  h(0, 1) = Complex(1.0, 0.5);
  try {
    build_generator(h, two_level_couplings(), b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Construction);
  }
}

TEST(Generator, SpectralAbscissaNegative) {
  for (double r : {80.0, 120.0, 240.0}) {
    presets::DiamondParameters params;
    params.separation_nm = r;
    const auto m = presets::rb87_diamond(params);
    const OperatorBasis b(4, 2);
    const auto gen = build_generator(m.h_sys(), m.couplings, b);
    const Eigen::EigenSolver<RMatrix> es(gen.lambda);
    int zeros = 0;
    double abscissa = -1e300;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
      const double re = es.eigenvalues()(k).real();
      if (std::abs(es.eigenvalues()(k)) < 1e-8) {
        ++zeros;
      } else {
        abscissa = std::max(abscissa, re);
      }
    }
    EXPECT_EQ(zeros, 1);
    EXPECT_LT(abscissa, 0.0);
  }
}

TEST(Cache, HitsOnRepeatedParameters) {
  const auto& p = preset();
  GeneratorCache cache;
  const auto a = cache.get(p.h, p.model.couplings, p.basis);
  const auto b = cache.get(p.h, p.model.couplings, p.basis);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_EQ(cache.size(), 1u);
  EXPECT_EQ(cache.hits(), 1u);
  const auto m2 = presets::with_drives(p.model, -70.0, 1.0, 7.5, 6.3);
  cache.get(m2.h_sys(), m2.couplings, p.basis);
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_NE(generator_hash(p.h, p.model.couplings, p.basis),
            generator_hash(m2.h_sys(), m2.couplings, p.basis));
}

TEST(Integrate, ZeroGeneratorLeavesStateUnchanged) {
  const RMatrix zero = RMatrix::Zero(16, 16);
  RVector w0 = RVector::LinSpaced(16, -1.0, 1.0);
  for (auto method : {IntegrationMethod::Adaptive, IntegrationMethod::Exponential}) {
    IntegrationOptions o;
    o.method = method;
    EXPECT_EQ(integrate(zero, w0, 500.0, o).final_state(), w0);
  }
}

TEST(Integrate, PopulationConservedAndMethodsAgree) {
  const auto& p = preset();
  const RVector w0 = product_initial_state(p.basis, {0, 0});
  const RVector f = population_functional(p.basis);
  IntegrationOptions o;
  o.samples = 9;
  const auto adaptive = integrate(p.gen.lambda, w0, 200.0, o);
  o.method = IntegrationMethod::Exponential;
  const auto expo = integrate(p.gen.lambda, w0, 200.0, o);
  ASSERT_EQ(adaptive.times_ns.size(), 11u);  // t = 0, nine samples, t_final
  const DensityMatrixOracle oracle(p.h, p.model.couplings, 4);
  const CMatrix rho0 = density_from_state(w0, p.basis);
  for (std::size_t i = 0; i < adaptive.states.size(); ++i) {
    EXPECT_NEAR(f.dot(adaptive.states[i]), 1.0, 1e-9);
    EXPECT_LT((adaptive.states[i] - expo.states[i]).cwiseAbs().maxCoeff(), 1e-8);
    const RVector ref = state_from_density(oracle.evolve(rho0, adaptive.times_ns[i]), p.basis);
    EXPECT_LT((adaptive.states[i] - ref).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Integrate, PresetDecaysWithin800ns) {
  const auto& p = preset();
  const RVector w0 = product_initial_state(p.basis, {0, 0});
  const auto traj = integrate(p.gen.lambda, w0, 800.0);
  EXPECT_LT(traj.final_residual, 1e-6 * traj.initial_residual);
  EXPECT_EQ(is_steady(traj), traj.final_residual < 1e-6 * traj.initial_residual);
}

TEST(SteadyState, AgreesWithIntegrationAt800ns) {
  const auto& p = preset();
  const RVector w0 = product_initial_state(p.basis, {0, 0});
  const RVector ws = steady_state(p.gen.lambda, w0, p.basis);
  const auto traj = integrate(p.gen.lambda, w0, 800.0);
  EXPECT_LT((traj.final_state() - ws).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SteadyState, PresetMatchesOracle) {
  const auto& p = preset();
  const RVector w0 = product_initial_state(p.basis, {0, 0});
  const RVector ws = steady_state(p.gen.lambda, w0, p.basis);
  EXPECT_LT((p.gen.lambda * ws).cwiseAbs().maxCoeff(), 1e-10);
  const DensityMatrixOracle oracle(p.h, p.model.couplings, 4);
  const CMatrix rho = oracle.stationary();
  EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-10);
  EXPECT_LT((ws - state_from_density(rho, p.basis)).cwiseAbs().maxCoeff(), 1e-8);
  const JointSpace sp(4, 2);
  const CMatrix a = sp.sigma(0, 2, 2) * sp.sigma(1, 3, 3);
  EXPECT_NEAR(std::abs(expectation(a, ws, p.basis) - (rho * a).trace()), 0.0, 1e-8);
}

TEST(SteadyState, TwoLevelGridMatchesOracle) {
  const OperatorBasis b(2, 1);
  const auto c = two_level_couplings();
  const RVector w0 = product_initial_state(b, {0});
  for (double drive : {0.5, 1.0, 3.0, 6.0, 12.0}) {
    for (double det : {-10.0, -3.0, 0.0, 2.0, 8.0}) {
      const CMatrix h = two_level_h(drive, det);
      const RVector ws = steady_state(build_generator(h, c, b).lambda, w0, b);
      const CMatrix rho = DensityMatrixOracle(h, c, 2).stationary();
      EXPECT_NEAR(ws(1), rho(1, 1).real(), 1e-8);
      // Optical-Bloch closed form for H = [[0, W], [W, -D]] and decay G.
      const double w2 = drive * drive;
      const double ee = w2 / (det * det + kGamma * kGamma / 4.0 + 2.0 * w2);
      EXPECT_NEAR(ws(1), ee, 1e-10);
    }
  }
}

TEST(SteadyState, UndrivenEndsInGround) {
  presets::DiamondParameters params;
  params.lam01 = params.lam12 = 0.0;
  const auto m = presets::rb87_diamond(params);
  const OperatorBasis b(4, 2);
  const RVector w0 = product_initial_state(b, {2, 3});
  const RVector ws = steady_state(build_generator(m.h_sys(), m.couplings, b).lambda, w0, b);
  EXPECT_LT((ws - product_initial_state(b, {0, 0})).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SteadyState, DegenerateKernelIsReported) {
  const OperatorBasis b(2, 1);
  try {
    steady_state(RMatrix::Zero(4, 4), product_initial_state(b, {0}), b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Degeneracy);
    EXPECT_NE(std::string(e.what()).find('4'), std::string::npos);
  }
}

TEST(Expectation, IdentityAndBasisElements) {
  const auto& p = preset();
  const RVector ws = steady_state(p.gen.lambda, product_initial_state(p.basis, {0, 0}), p.basis);
  EXPECT_NEAR(std::abs(expectation(CMatrix::Identity(16, 16), ws, p.basis) - 1.0), 0.0, 1e-12);
  for (int k : {0, 5, 77, 255}) {
    EXPECT_NEAR(std::abs(expectation(p.basis.element(k), ws, p.basis) - ws(k)), 0.0, 1e-12);
  }
  EXPECT_THROW(expectation(CMatrix::Identity(4, 4), ws, p.basis), Error);
}

TEST(Oracle, TracePreservedAndPureDecay) {
  const auto c = two_level_couplings();
  const DensityMatrixOracle oracle(two_level_h(0.0, 0.0), c, 2);
  CMatrix rho0(2, 2);
  rho0 << 0.3, 0.2, 0.2, 0.7;
  for (double t : {0.0, 50.0, 200.0, 1000.0}) {
    const CMatrix rho = oracle.evolve(rho0, t);
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-10);
    EXPECT_NEAR(rho(1, 1).real(), 0.7 * std::exp(-kGamma * t * units::kNsToRateTime), 1e-9);
  }
  const auto& p = preset();
  EXPECT_THROW(DensityMatrixOracle(p.h, p.model.couplings, 4, 8), Error);
}
