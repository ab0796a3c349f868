#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "../common/fixtures.hpp"
#include "cfwm/dressed_spectra.hpp"
#include "cfwm/system_model.hpp"

using namespace cfwm;
using cfwm::testing::find_pair;
using cfwm::testing::tracked_sweep;

namespace {

CMatrix single_h(double d1, double l01, double l12) {
  presets::DiamondParameters p;
  p.atoms = 1;
  p.delta1 = d1;
  p.lam01 = l01;
  p.lam12 = l12;
  return presets::rb87_diamond(p).h_sys();
}

// Eigenvalues straight from the closed-form expressions, independent of the library.
std::array<double, 4> closed_form(double d1, double l01, double l12) {
  const double z = std::sqrt(d1 * d1 + 16 * l01 * l01 + 16 * l12 * l12);
  return {0.0, -d1 / 3.0, (d1 + 3 * z) / 6.0, (d1 - 3 * z) / 6.0};
}

}  // namespace

TEST(ClosedForm, ReferenceExample) {
  const auto e = closed_form(-70.0, 7.5, 6.3);
  EXPECT_NEAR(e[1], 23.33, 0.005);
  EXPECT_NEAR(e[2], 28.44, 0.005);
  EXPECT_NEAR(e[3], -51.78, 0.005);
  const auto lib = single_atom_closed_form(-70.0, 7.5, 6.3);
  EXPECT_NEAR(lib.zeta, 80.22, 0.005);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(lib.energies[k], e[k], 1e-12);
}

TEST(ClosedForm, MatchesNumericsOnRandomTriples) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-150.0, 150.0), l(0.5, 25.0);
  for (int t = 0; t < 50; ++t) {
    const double d1 = d(rng), l01 = l(rng), l12 = l(rng);
    auto e = closed_form(d1, l01, l12);
    std::sort(e.begin(), e.end());
    const DressedSpectrum s = diagonalize(single_h(d1, l01, l12));
    const double scale = std::max(std::abs(e.front()), std::abs(e.back()));
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(s.energies(k), e[k], 1e-10 * scale);
  }
}

TEST(ClosedForm, StatesAreEigenvectors) {
  const double d1 = -70.0, l01 = 7.5, l12 = 6.3;
  const CMatrix h = single_h(d1, l01, l12);
  const auto cf = single_atom_closed_form(d1, l01, l12);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(cf.states[k].norm(), 1.0, 1e-12);
    EXPECT_LT((h * cf.states[k] - cf.energies[k] * cf.states[k]).norm(), 1e-10);
  }
  // Dark state: no weight on |1>, and proportional to L12|0> - L01|2>.
  const CVector& b = cf.states[1];
  EXPECT_EQ(std::abs(b(1)), 0.0);
  EXPECT_NEAR(std::abs(b(0) * l01 + b(2) * l12), 0.0, 1e-12);
  EXPECT_NEAR(cf.energies[0], 0.0, 0.0);
  EXPECT_NEAR(std::abs(cf.states[0](3)), 1.0, 1e-15);
}

TEST(ClosedForm, FarDetunedLimit) {
  const auto cf = single_atom_closed_form(-700.0, 7.0, 7.0);
  const double s = 1.0 / std::sqrt(2.0);
  CVector minus(4), plus(4), one(4);
  minus << s, 0, -s, 0;
  plus << s, 0, s, 0;
  one << 0, 1, 0, 0;
  EXPECT_GT(std::abs(minus.dot(cf.states[1])), 0.99);
  EXPECT_GT(std::abs(plus.dot(cf.states[2])), 0.99);
  EXPECT_GT(std::abs(one.dot(cf.states[3])), 0.99);
}

TEST(ClosedForm, UndrivenReducesToFrameDiagonal) {
  const DressedSpectrum s = diagonalize(single_h(-70.0, 0.0, 0.0));
  std::vector<double> expected{70.0 / 3.0, -140.0 / 3.0, 70.0 / 3.0, 0.0};
  std::sort(expected.begin(), expected.end());
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(s.energies(k), expected[k], 1e-12);
}

TEST(SingleStates, NamingFollowsStructure) {
  const auto named = name_single_states(single_h(-70.0, 7.5, 6.3));
  ASSERT_EQ(named.names, (std::vector<std::string>{"a", "b", "c", "d"}));
  EXPECT_NEAR(named.energies(0), 0.0, 1e-12);
  EXPECT_NEAR(named.energies(1), 70.0 / 3.0, 1e-10);
  EXPECT_GT(named.energies(2), named.energies(3));
  EXPECT_LT(std::abs(named.vectors(1, 1)), 1e-12);
}

TEST(Diagonalize, RejectsNonHermitian) {
  CMatrix h = CMatrix::Identity(3, 3);
  h(0, 1) = 1.0;
  try {
    diagonalize(h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Domain);
  }
}

TEST(Diagonalize, UnitaryResidualAndSectors) {
  const CMatrix s = swap_operator(4);
  for (double r : {60.0, 120.0, 400.0}) {
    presets::DiamondParameters p;
    p.separation_nm = r;
    const CMatrix h = presets::rb87_diamond(p).h_sys();
    const DressedSpectrum d = diagonalize(h, &s);
    ASSERT_EQ(d.size(), 16);
    const double hn = h.norm();
    EXPECT_LT(max_abs(d.vectors.adjoint() * d.vectors - CMatrix::Identity(16, 16)), 1e-10);
    int sym = 0, anti = 0;
    for (int k = 0; k < 16; ++k) {
      const CVector v = d.vectors.col(k);
      EXPECT_LT((h * v - d.energies(k) * v).norm(), 1e-10 * hn);
      const double x = v.dot(s * v).real();
      EXPECT_GT(std::abs(x), 1.0 - 1e-8);
      if (d.symmetry[k] == Symmetry::Symmetric) {
        ++sym;
        EXPECT_GT(x, 0.0);
      } else if (d.symmetry[k] == Symmetry::Antisymmetric) {
        ++anti;
        EXPECT_LT(x, 0.0);
      }
      if (k > 0) EXPECT_LE(d.energies(k - 1), d.energies(k));
      // Largest component real and positive.
      Eigen::Index i;
      v.cwiseAbs().maxCoeff(&i);
      EXPECT_NEAR(v(i).imag(), 0.0, 1e-14);
      EXPECT_GT(v(i).real(), 0.0);
    }
    EXPECT_EQ(sym, 10);
    EXPECT_EQ(anti, 6);
  }
}

TEST(Diagonalize, InSectorEigenvaluesDistinctAt120nm) {
  const DressedSpectrum d = cfwm::testing::preset_spectrum({});
  double gap = 1e300;
  for (int i = 0; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j)
      if (d.symmetry[i] == d.symmetry[j]) gap = std::min(gap, std::abs(d.energies(i) - d.energies(j)));
  EXPECT_GT(gap, 1e-3);
}

TEST(Diagonalize, NonInteractingLimit) {
  presets::DiamondParameters p;
  p.separation_nm = 1e4;
  const DressedSpectrum d = cfwm::testing::preset_spectrum(p);
  const auto single = diagonalize(single_h(-70.0, 7.5, 6.3));
  std::vector<double> sums;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sums.push_back(single.energies(i) + single.energies(j));
  std::sort(sums.begin(), sums.end());
  for (int k = 0; k < 16; ++k) EXPECT_NEAR(d.energies(k), sums[k], 0.1);
}

TEST(Tracking, AsymptoticLabelsAreComplete) {
  const auto spectra = tracked_sweep(default_separation_sweep(60.0, 2000.0, 200));
  ASSERT_EQ(spectra.size(), 200u);
  for (const auto& s : spectra) {
    ASSERT_TRUE(s.labelled());
    std::vector<std::string> labels = s.labels;
    std::sort(labels.begin(), labels.end());
    EXPECT_EQ(std::adjacent_find(labels.begin(), labels.end()), labels.end());
  }
  EXPECT_GE(find_pair(spectra.back(), 'c', 'd', '+'), 0);
  EXPECT_GE(find_pair(spectra.back(), 'b', 'c', '-'), 0);
  EXPECT_LT(find_pair(spectra.back(), 'a', 'a', '-'), 0);
}

TEST(Tracking, SectorsArePreserved) {
  const auto spectra = tracked_sweep(default_separation_sweep(60.0, 2000.0, 200));
  const auto& first = spectra.front();
  for (const auto& s : spectra) {
    for (int k = 0; k < s.size(); ++k) {
      const int j = first.find(s.labels[k]);
      ASSERT_GE(j, 0);
      EXPECT_EQ(first.symmetry[j], s.symmetry[k]);
    }
  }
}

TEST(Tracking, DecoupledBranchesAreFlat) {
  auto sweep = default_separation_sweep(60.0, 2000.0, 200);
  const auto spectra = tracked_sweep(sweep);
  for (char x : {'a', 'b'}) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      if (sweep[i] > 1000.0) continue;
      const int k = find_pair(spectra[i], x, x, '+');
      ASSERT_GE(k, 0);
      lo = std::min(lo, spectra[i].energies(k));
      hi = std::max(hi, spectra[i].energies(k));
    }
    EXPECT_LT(hi - lo, 0.05) << x;
  }
}

TEST(Tracking, ReverseSweepRoundTrip) {
  auto sweep = default_separation_sweep(60.0, 2000.0, 200);
  auto forward = tracked_sweep(sweep);
  std::vector<DressedSpectrum> back(forward.rbegin(), forward.rend());
  for (std::size_t i = 1; i < back.size(); ++i) back[i].labels.clear();
  track_labels(back);
  const auto& start = forward.front();
  const auto& end = back.back();
  for (int k = 0; k < start.size(); ++k) EXPECT_EQ(end.labels[k], start.labels[k]);
}

TEST(Tracking, AnticrossingsStayInSector) {
  auto sweep = default_separation_sweep(60.0, 2000.0, 200);
  const auto spectra = tracked_sweep(sweep);
  for (const auto& a : find_anticrossings(sweep, spectra)) {
    EXPECT_NE(a.symmetry, Symmetry::Mixed);
    EXPECT_GE(a.gap, 0.0);
    EXPECT_GE(a.sweep_value, 60.0);
    EXPECT_LE(a.sweep_value, 2000.0);
  }
}

TEST(Tracking, SweepHelperOrdering) {
  const auto r = default_separation_sweep(60.0, 2000.0, 200);
  ASSERT_EQ(r.size(), 200u);
  EXPECT_NEAR(r.front(), 2000.0, 1e-9);
  EXPECT_NEAR(r.back(), 60.0, 1e-9);
  EXPECT_TRUE(std::is_sorted(r.rbegin(), r.rend()));
}
