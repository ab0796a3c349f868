#pragma once

#include <string>
#include <vector>

#include "cfwm/dressed_spectra.hpp"
#include "cfwm/dynamics.hpp"
#include "cfwm/em_coupling.hpp"
#include "cfwm/operator_basis.hpp"
#include "cfwm/system_model.hpp"

namespace cfwm {

/// Zero-delay coincidence of the |2> -> |3> -> |0> cascade for two emitters (emitter 0 plays
/// atom "1" of the pair). K_c is never applied.
struct CoincidenceResult {
  double g2 = 0.0;
  double gpp = 0.0;
  double gpe = 0.0;
  double imaginary_residue = 0.0;
  double residual = 0.0;  ///< relative ||Lambda w|| of the input state, if known
  bool stale = false;     ///< residual above the steady-state threshold
};

struct CoincidenceOptions {
  double steady_threshold = 1e-6;
};

/// Gpp = <s1_22 + s1_22 s2_33 + s1_33 s2_22 + s2_22>,
/// Gpe = 2 <s1_23 s2_32 e^{i k23 r} + h.c.> + <s1_20 s2_02 e^{i k20 r} + h.c.>, k20 = k23 + k30.
/// Throws Error(Unsupported) unless the basis describes two four-level emitters.
CoincidenceResult g2_coincidence(const RVector& w, const OperatorBasis& basis, double kappa23,
                                 double kappa30, double r12_nm, double residual = 0.0,
                                 const CoincidenceOptions& options = {});

/// Same evaluation returned as the (Gpp, Gpe) pair.
std::pair<double, double> g2_split(const RVector& w, const OperatorBasis& basis, double kappa23,
                                   double kappa30, double r12_nm);

/// K_c = hbar^4 w23^4 w30^4 / (eps0^2 c^4) |p23|^2 |p30|^2 dOmega in SI units
/// (angular frequencies in rad/s, dipoles in C m). Reported, never multiplied in.
double coincidence_scale(double omega23, double omega30, double p23, double p30,
                         double solid_angle);

/// Operator tags of the dressed decomposition:
///   2222: s1_22 + s2_22           2233: s1_22 s2_33 + s1_33 s2_22
///   2332: s1_23 s2_32 + s1_32 s2_23   2002: s1_20 s2_02 + s1_02 s2_20
CMatrix tagged_operator(const std::string& tag, int n_levels = 4);

struct DressedContribution {
  std::string tag;
  std::vector<std::string> labels;
  std::vector<Symmetry> symmetry;
  std::vector<double> zeta;
  double max_cross_sector = 0.0;  ///< largest |<+|O|->|
  CMatrix off_diagonal;           ///< dressed-basis matrix with the diagonal removed (debug)
};

/// zeta_k = <v_k|O|v_k> over the labelled dressed states. Throws Error(Label) for an
/// unlabelled spectrum.
DressedContribution dressed_decomposition(const std::string& tag, const DressedSpectrum& spectrum,
                                          bool keep_off_diagonal = false);
DressedContribution dressed_decomposition(const CMatrix& op, const std::string& tag,
                                          const DressedSpectrum& spectrum,
                                          bool keep_off_diagonal = false);

/// First-order far-field intensity sum_{alpha beta} sum_t |p_t - R(R.p_t)|^2 (D_t/D_ref)^4
/// e^{i k_t R.(r_alpha - r_beta)} <sigma^alpha_t^dag sigma^beta_t>, real part. `transitions`
/// defaults to the (3,2) and (0,3) cascade when empty; D_ref is the first selected transition.
/// Throws Error(Domain) when R is not a unit vector.
double far_field_intensity(const RVector& w, const OperatorBasis& basis, const Vec3& direction,
                           const std::vector<TransitionDipole>& transitions,
                           const std::vector<Vec3>& positions);

/// Indices of strict three-point local maxima.
std::vector<int> local_maxima(const std::vector<double>& y);

/// Steady state and coincidence for one model point.
struct PointResult {
  RVector state;
  CoincidenceResult coincidence;
};

PointResult evaluate_point(const SystemModel& model, const OperatorBasis& basis,
                           GeneratorCache* cache = nullptr);

}  // namespace cfwm
