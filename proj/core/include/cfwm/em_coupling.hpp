#pragma once

#include <optional>
#include <vector>

#include "cfwm/types.hpp"

namespace cfwm {

/// Radiative transition |upper> -> |lower> of a single emitter.
struct TransitionDipole {
  int lower = 0;
  int upper = 1;
  double rate = 1.0;            ///< individual decay rate, 10^6 rad/s
  double wavelength_nm = 1.0;   ///< transition wavelength
  CVec3 orientation = CVec3(1.0, 0.0, 0.0);  ///< unit (possibly complex) dipole direction

  double wavenumber() const { return units::wavenumber(wavelength_nm); }
  double angular_frequency() const { return units::angular_frequency(wavelength_nm); }

  /// Throws Error(Domain) on a non-unit orientation, non-positive rate or wavelength,
  /// or lower == upper.
  void validate() const;
};

/// Overall prefactor in Omega + i*gamma/2 = c * Gamma * e^{i kappa r} p^*.F.p.
///
/// `Printed` uses c = 3/4, for which gamma^{12} -> Gamma as kappa*r -> 0.
/// `Tabulated` uses c = 1/2, which reproduces the reference Gamma^{+-} values of the
/// Rb-87 diamond at 60..240 nm.
enum class RateNormalization { Tabulated, Printed };

double normalization_prefactor(RateNormalization normalization);

/// Free-space propagation tensor
///   F = xi^-3 [ (xi^2 + i xi - 1) 1 - (xi^2 + 3 i xi - 3) rhat rhat ].
Eigen::Matrix3cd propagator_tensor(double xi, const Vec3& rhat);

struct PairCoupling {
  double omega = 0.0;  ///< coherent exchange, 10^6 rad/s
  double gamma = 0.0;  ///< collective decay, 10^6 rad/s
};

/// Coupling between transition `a` on one emitter and transition `b` on another emitter
/// displaced by `separation`. Returns nullopt when the two transition frequencies differ by
/// more than `secular_threshold` (the term is dropped, not an error).
std::optional<PairCoupling> pair_coupling(const TransitionDipole& a, const TransitionDipole& b,
                                          const Vec3& separation, double secular_threshold,
                                          RateNormalization normalization);

/// Cross rate Gamma_{a;b}, built from the individual rates and frequencies. Equals a.rate when
/// a and b are the same transition.
double cross_rate(const TransitionDipole& a, const TransitionDipole& b);

struct CouplingOptions {
  /// Secular filter on |Delta_a - Delta_b|; a negative value selects 10x the largest rate.
  double secular_threshold = -1.0;
  RateNormalization normalization = RateNormalization::Tabulated;
};

double default_secular_threshold(const std::vector<TransitionDipole>& transitions);

/// Omega^{ab}(i;j) and gamma^{ab}(i;j) for every emitter pair (a,b) and transition pair (i,j).
/// Entries removed by the secular filter are absent and read as zero.
class CouplingTensors {
 public:
  CouplingTensors() = default;
  CouplingTensors(int n_atoms, std::vector<TransitionDipole> transitions);

  int atoms() const { return n_atoms_; }
  int transition_count() const { return static_cast<int>(transitions_.size()); }
  const std::vector<TransitionDipole>& transitions() const { return transitions_; }
  const TransitionDipole& transition(int i) const { return transitions_.at(i); }

  bool present(int a, int b, int i, int j) const { return present_[index(a, b, i, j)] != 0; }
  double omega(int a, int b, int i, int j) const { return omega_[index(a, b, i, j)]; }
  double gamma(int a, int b, int i, int j) const { return gamma_[index(a, b, i, j)]; }

  void set(int a, int b, int i, int j, PairCoupling value);
  void clear(int a, int b, int i, int j);

  /// Zero the cross-emitter (a != b) entries. With `transition` set, only entries where both
  /// transition indices equal it are touched. `omega`/`gamma` select which part is zeroed.
  /// Self terms are never modified.
  void zero_cross_atom(std::optional<int> transition = std::nullopt, bool omega = true,
                       bool gamma = true);

  /// Index of the transition (lower, upper), or -1.
  int find_transition(int lower, int upper) const;

 private:
  std::size_t index(int a, int b, int i, int j) const;

  int n_atoms_ = 0;
  std::vector<TransitionDipole> transitions_;
  std::vector<double> omega_;
  std::vector<double> gamma_;
  std::vector<unsigned char> present_;
};

/// Full coupling tensors for emitters at `positions`. Self terms use Omega = 0 and
/// gamma(i;i) = Gamma_i; the divergent real part is assumed to be absorbed in the level energies.
/// Throws Error(Overlap) if two emitters coincide.
CouplingTensors compute_couplings(const std::vector<Vec3>& positions,
                                  const std::vector<TransitionDipole>& transitions,
                                  const CouplingOptions& options = {});

struct CollectiveChannels {
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  CMatrix pi_plus;   ///< (sigma^1 + sigma^2)/sqrt(2) on the joint space
  CMatrix pi_minus;  ///< (sigma^1 - sigma^2)/sqrt(2)
};

/// Super- and subradiant channels of one transition for a pair of emitters.
/// Throws Error(Unsupported) unless the tensors describe exactly two emitters.
CollectiveChannels collective_channels(const CouplingTensors& couplings, int transition,
                                       int n_levels);

}  // namespace cfwm
