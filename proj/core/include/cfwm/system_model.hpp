#pragma once

#include <string>
#include <vector>

#include "cfwm/em_coupling.hpp"
#include "cfwm/joint_space.hpp"
#include "cfwm/types.hpp"

namespace cfwm {

struct LevelScheme {
  int n_levels = 0;
  std::vector<double> energies;  ///< epsilon_m in 10^6 rad/s, energies[0] = 0
  std::vector<TransitionDipole> transitions;

  /// Largest relative mismatch between epsilon_n - epsilon_m and the transition frequency
  /// implied by the stored wavelength.
  double energy_consistency() const;

  /// Throws Error(Domain) on bad level indices, invalid dipoles, or a consistency mismatch
  /// above `tolerance` (relative).
  void validate(double tolerance = 0.01) const;

  int find_transition(int lower, int upper) const;
};

/// Laser acting on one quasi-resonant transition.
struct Drive {
  int lower = 0;
  int upper = 1;
  Complex rabi{0.0, 0.0};    ///< Lambda_mn, 10^6 rad/s
  double detuning = 0.0;     ///< Delta_mn - omega_laser, 10^6 rad/s
  Vec3 wavevector = Vec3::Zero();  ///< nm^-1
};

struct FramePhase {
  int lower = 0;
  int upper = 1;
  double phi = 0.0;
};

/// H_0 = sum_alpha sum 1/2 phi (sigma_mm - sigma_nn) over the listed (lower, upper) pairs.
struct RotatingFrame {
  std::vector<FramePhase> phases;

  /// Per-level diagonal of the single-emitter H_0.
  RVector level_shifts(int n_levels) const;
};

/// Frame that renders the two diamond drives static:
/// phi_01 = 2/3 (d1 + d2), phi_12 = 2/3 (2 d2 - d1).
RotatingFrame diamond_frame(double delta1, double delta2);

struct HamiltonianOptions {
  /// Drive matrix element is scale * Lambda. The single-atom closed form
  /// (zeta with 16 Lambda^2) corresponds to scale 2.
  double drive_coupling_scale = 2.0;
  double frame_tolerance = 1e-9;
};

/// Rotating-frame system Hamiltonian on the joint space of positions.size() emitters:
/// residual frame energies, drives with phases e^{i k.r_alpha}, and the coherent exchange
/// sum_{alpha != beta} Omega sigma^alpha_i^dagger sigma^beta_j.
/// Throws Error(Frame) naming the transition when a drive or surviving exchange term is left
/// oscillating by the frame.
CMatrix build_h_sys(const LevelScheme& scheme, const std::vector<Vec3>& positions,
                    const std::vector<Drive>& drives, const RotatingFrame& frame,
                    const CouplingTensors& couplings, const HamiltonianOptions& options = {});

/// Checks the frame against every drive and every surviving cross-transition coupling.
void validate_frame(const LevelScheme& scheme, const std::vector<Drive>& drives,
                    const RotatingFrame& frame, const CouplingTensors& couplings,
                    double tolerance = 1e-9);

/// Exchange operator S|i>|j> = |j>|i>. Throws Error(Unsupported) unless n_atoms == 2.
CMatrix swap_operator(int n_levels, int n_atoms = 2);

/// Optional power -> Rabi conversion: Lambda = E |p| / hbar with E = sqrt(2 I / (c eps0)),
/// I = P / (pi (d/2)^2). Power in mW, spot diameter in mm, dipole in e*a0; result in 10^6 rad/s.
double rabi_from_power(double power_mw, double spot_diameter_mm, double dipole_ea0);

/// Everything needed to build H_sys and the dissipator for one parameter point.
struct SystemModel {
  LevelScheme scheme;
  std::vector<Vec3> positions;
  std::vector<Drive> drives;
  RotatingFrame frame;
  CouplingTensors couplings;
  HamiltonianOptions hamiltonian;

  int atoms() const { return static_cast<int>(positions.size()); }
  JointSpace space() const { return JointSpace(scheme.n_levels, atoms()); }
  CMatrix h_sys() const {
    return build_h_sys(scheme, positions, drives, frame, couplings, hamiltonian);
  }
};

namespace presets {

inline constexpr const char* kRb87Diamond = "Rb87-diamond";

struct DiamondParameters {
  int atoms = 2;
  double separation_nm = 120.0;
  double delta1 = -70.0;
  double delta2 = 0.0;
  double lam01 = 7.5;
  double lam12 = 6.3;
  bool couplings_enabled = true;
  CouplingOptions coupling;
  HamiltonianOptions hamiltonian;
};

/// Levels {5S1/2, 5P3/2, 5D3/2, 5P1/2} as {0,1,2,3}. Transitions, in order:
/// (0,1) 780 nm, (1,2) 776 nm, (3,2) 762 nm, (0,3) 795 nm.
/// p01 = p23 along the interatomic axis (x), p12 = p30 along y.
LevelScheme rb87_diamond_scheme();

/// Emitters on the x axis at +-r/2 (a single emitter sits at the origin), both lasers along z.
std::vector<Vec3> diamond_positions(int atoms, double separation_nm);

std::vector<Drive> diamond_drives(double delta1, double delta2, double lam01, double lam12);

SystemModel rb87_diamond(const DiamondParameters& params = {});

/// Same model with new detunings/Rabi values; couplings are reused untouched.
SystemModel with_drives(const SystemModel& model, double delta1, double delta2, double lam01,
                        double lam12);

}  // namespace presets

}  // namespace cfwm
