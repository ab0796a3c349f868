#include "cfwm/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cfwm {

namespace {

std::string pair_name(int m, int n) {
  std::ostringstream s;
  s << "(" << m << "," << n << ")";
  return s.str();
}

void check_level(int level, int n_levels, const std::string& what) {
  if (level < 0 || level >= n_levels) {
    throw Error(ErrorCode::Domain, what + " references level " + std::to_string(level) +
                                       " outside 0.." + std::to_string(n_levels - 1));
  }
}

}  // namespace

double LevelScheme::energy_consistency() const {
  double worst = 0.0;
  for (const auto& t : transitions) {
    const double gap = energies.at(t.upper) - energies.at(t.lower);
    const double ref = t.angular_frequency();
    worst = std::max(worst, std::abs(gap - ref) / ref);
  }
  return worst;
}

void LevelScheme::validate(double tolerance) const {
  if (n_levels < 2) throw Error(ErrorCode::Domain, "level scheme needs at least two levels");
  if (static_cast<int>(energies.size()) != n_levels) {
    throw Error(ErrorCode::Shape, "energies must list one value per level");
  }
  if (energies[0] != 0.0) throw Error(ErrorCode::Domain, "level 0 is the energy reference");
  for (const auto& t : transitions) {
    check_level(t.lower, n_levels, "transition");
    check_level(t.upper, n_levels, "transition");
    t.validate();
  }
  const double c = energy_consistency();
  if (c > tolerance) {
    throw Error(ErrorCode::Domain, "level energies disagree with transition wavelengths by " +
                                       std::to_string(100.0 * c) + "%");
  }
}

int LevelScheme::find_transition(int lower, int upper) const {
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    if (transitions[i].lower == lower && transitions[i].upper == upper) return static_cast<int>(i);
  }
  return -1;
}

RVector RotatingFrame::level_shifts(int n_levels) const {
  RVector h = RVector::Zero(n_levels);
  for (const auto& p : phases) {
    check_level(p.lower, n_levels, "frame phase");
    check_level(p.upper, n_levels, "frame phase");
    h(p.lower) += 0.5 * p.phi;
    h(p.upper) -= 0.5 * p.phi;
  }
  return h;
}

RotatingFrame diamond_frame(double delta1, double delta2) {
  RotatingFrame f;
  f.phases.push_back({0, 1, 2.0 / 3.0 * (delta1 + delta2)});
  f.phases.push_back({1, 2, 2.0 / 3.0 * (2.0 * delta2 - delta1)});
  return f;
}

void validate_frame(const LevelScheme& scheme, const std::vector<Drive>& drives,
                    const RotatingFrame& frame, const CouplingTensors& couplings,
                    double tolerance) {
  const RVector h0 = frame.level_shifts(scheme.n_levels);
  for (const auto& d : drives) {
    check_level(d.lower, scheme.n_levels, "drive");
    check_level(d.upper, scheme.n_levels, "drive");
    const double residual = h0(d.lower) - h0(d.upper) - d.detuning;
    if (std::abs(residual) > tolerance * std::max(1.0, std::abs(d.detuning))) {
      throw Error(ErrorCode::Frame, "drive on transition " + pair_name(d.lower, d.upper) +
                                        " keeps an oscillation at " + std::to_string(residual));
    }
  }
  const int nt = couplings.transition_count();
  for (int a = 0; a < couplings.atoms(); ++a) {
    for (int b = 0; b < couplings.atoms(); ++b) {
      if (a == b) continue;
      for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nt; ++j) {
          if (i == j || !couplings.present(a, b, i, j)) continue;
          const auto& ti = couplings.transition(i);
          const auto& tj = couplings.transition(j);
          const double ri = h0(ti.lower) - h0(ti.upper);
          const double rj = h0(tj.lower) - h0(tj.upper);
          if (std::abs(ri - rj) > tolerance * std::max(1.0, std::abs(ri))) {
            throw Error(ErrorCode::Frame, "exchange between " + pair_name(ti.lower, ti.upper) +
                                              " and " + pair_name(tj.lower, tj.upper) +
                                              " is not static in the frame");
          }
        }
      }
    }
  }
}

CMatrix build_h_sys(const LevelScheme& scheme, const std::vector<Vec3>& positions,
                    const std::vector<Drive>& drives, const RotatingFrame& frame,
                    const CouplingTensors& couplings, const HamiltonianOptions& options) {
  const int na = static_cast<int>(positions.size());
  if (na < 1) throw Error(ErrorCode::Domain, "no emitters");
  if (couplings.atoms() != na) {
    throw Error(ErrorCode::Shape, "coupling tensors describe a different number of emitters");
  }
  validate_frame(scheme, drives, frame, couplings, options.frame_tolerance);

  const JointSpace space(scheme.n_levels, na);
  const RVector h0 = frame.level_shifts(scheme.n_levels);

  CMatrix single = CMatrix::Zero(scheme.n_levels, scheme.n_levels);
  for (int m = 0; m < scheme.n_levels; ++m) single(m, m) = -h0(m);

  CMatrix h = CMatrix::Zero(space.dimension(), space.dimension());
  for (int a = 0; a < na; ++a) {
    CMatrix local = single;
    for (const auto& d : drives) {
      const Complex phase = std::exp(kI * d.wavevector.dot(positions[a]));
      const Complex v = options.drive_coupling_scale * d.rabi * phase;
      local(d.upper, d.lower) += v;
      local(d.lower, d.upper) += std::conj(v);
    }
    h += space.embed(local, a);
  }

  const int nt = couplings.transition_count();
  CMatrix exchange = CMatrix::Zero(space.dimension(), space.dimension());
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < na; ++b) {
      if (a == b) continue;
      for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nt; ++j) {
          if (!couplings.present(a, b, i, j)) continue;
          const double w = couplings.omega(a, b, i, j);
          if (w == 0.0) continue;
          const auto& ti = couplings.transition(i);
          const auto& tj = couplings.transition(j);
          exchange += w * space.sigma(a, ti.upper, ti.lower) * space.sigma(b, tj.lower, tj.upper);
        }
      }
    }
  }
  // Omega is symmetric for identical transitions; the average only matters when unequal
  // cross-transition entries survive the secular filter.
  h += 0.5 * (exchange + exchange.adjoint());
  return h;
}

CMatrix swap_operator(int n_levels, int n_atoms) {
  if (n_atoms != 2) throw Error(ErrorCode::Unsupported, "swap operator is defined for two emitters");
  const JointSpace space(n_levels, 2);
  CMatrix s = CMatrix::Zero(space.dimension(), space.dimension());
  for (int i = 0; i < n_levels; ++i) {
    for (int j = 0; j < n_levels; ++j) {
      s(space.joint_index({j, i}), space.joint_index({i, j})) = 1.0;
    }
  }
  return s;
}

double rabi_from_power(double power_mw, double spot_diameter_mm, double dipole_ea0) {
  if (!(power_mw >= 0.0) || !(spot_diameter_mm > 0.0) || !(dipole_ea0 >= 0.0)) {
    throw Error(ErrorCode::Domain, "power, spot diameter and dipole must be non-negative");
  }
  constexpr double c = 299792458.0;
  constexpr double eps0 = 8.8541878128e-12;
  constexpr double hbar = 1.054571817e-34;
  constexpr double e = 1.602176634e-19;
  constexpr double a0 = 5.29177210903e-11;
  const double radius = 0.5 * spot_diameter_mm * 1e-3;
  const double intensity = power_mw * 1e-3 / (std::numbers::pi * radius * radius);
  const double field = std::sqrt(2.0 * intensity / (c * eps0));
  return field * dipole_ea0 * e * a0 / hbar * 1e-6;
}

namespace presets {

LevelScheme rb87_diamond_scheme() {
  const CVec3 axis(1.0, 0.0, 0.0);
  const CVec3 perp(0.0, 1.0, 0.0);
  LevelScheme s;
  s.n_levels = 4;
  s.transitions = {
      {0, 1, 36.2, 780.0, axis},
      {1, 2, 0.641, 776.0, perp},
      {3, 2, 2.86, 762.0, axis},
      {0, 3, 17.2, 795.0, perp},
  };
  const double e1 = units::angular_frequency(780.0);
  const double e3 = units::angular_frequency(795.0);
  const double e2 = 0.5 * (e1 + units::angular_frequency(776.0) + e3 +
                           units::angular_frequency(762.0));
  s.energies = {0.0, e1, e2, e3};
  return s;
}

std::vector<Vec3> diamond_positions(int atoms, double separation_nm) {
  if (atoms < 1) throw Error(ErrorCode::Domain, "need at least one emitter");
  if (atoms == 1) return {Vec3::Zero()};
  std::vector<Vec3> p;
  const double x0 = -0.5 * separation_nm * (atoms - 1);
  for (int a = 0; a < atoms; ++a) p.emplace_back(x0 + a * separation_nm, 0.0, 0.0);
  return p;
}

std::vector<Drive> diamond_drives(double delta1, double delta2, double lam01, double lam12) {
  const Vec3 z(0.0, 0.0, 1.0);
  return {
      {0, 1, Complex(lam01, 0.0), delta1, units::wavenumber(780.0) * z},
      {1, 2, Complex(lam12, 0.0), delta2 - delta1, units::wavenumber(776.0) * z},
  };
}

SystemModel rb87_diamond(const DiamondParameters& params) {
  SystemModel m;
  m.scheme = rb87_diamond_scheme();
  m.positions = diamond_positions(params.atoms, params.separation_nm);
  m.drives = diamond_drives(params.delta1, params.delta2, params.lam01, params.lam12);
  m.frame = diamond_frame(params.delta1, params.delta2);
  m.hamiltonian = params.hamiltonian;
  m.couplings = compute_couplings(m.positions, m.scheme.transitions, params.coupling);
  if (!params.couplings_enabled) m.couplings.zero_cross_atom();
  return m;
}

SystemModel with_drives(const SystemModel& model, double delta1, double delta2, double lam01,
                        double lam12) {
  SystemModel m = model;
  m.drives = diamond_drives(delta1, delta2, lam01, lam12);
  m.frame = diamond_frame(delta1, delta2);
  return m;
}

}  // namespace presets

}  // namespace cfwm
