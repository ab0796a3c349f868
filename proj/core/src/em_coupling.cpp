#include "cfwm/em_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfwm/joint_space.hpp"

namespace cfwm {

void TransitionDipole::validate() const {
  if (lower == upper || lower < 0 || upper < 0) {
    throw Error(ErrorCode::Domain, "transition needs two distinct non-negative levels");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error(ErrorCode::Domain, "rate must be positive");
  if (!(wavelength_nm > 0.0) || !std::isfinite(wavelength_nm)) {
    throw Error(ErrorCode::Domain, "wavelength must be positive");
  }
  if (std::abs(orientation.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::Domain, "dipole orientation must be a unit vector");
  }
}

double normalization_prefactor(RateNormalization normalization) {
  return normalization == RateNormalization::Printed ? 0.75 : 0.5;
}

Eigen::Matrix3cd propagator_tensor(double xi, const Vec3& rhat) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw Error(ErrorCode::Domain, "xi must be positive");
  if (std::abs(rhat.norm() - 1.0) > 1e-9) throw Error(ErrorCode::Domain, "rhat must be a unit vector");
  const Complex a = (xi * xi + kI * xi - 1.0) / (xi * xi * xi);
  const Complex b = (xi * xi + 3.0 * kI * xi - 3.0) / (xi * xi * xi);
  const Eigen::Matrix3d rr = rhat * rhat.transpose();
  return a * Eigen::Matrix3cd::Identity() - b * rr.cast<Complex>();
}

double cross_rate(const TransitionDipole& a, const TransitionDipole& b) {
  const double ratio = a.angular_frequency() / b.angular_frequency();
  return std::sqrt(a.rate * b.rate) * std::pow(ratio, 1.5);
}

std::optional<PairCoupling> pair_coupling(const TransitionDipole& a, const TransitionDipole& b,
                                          const Vec3& separation, double secular_threshold,
                                          RateNormalization normalization) {
  if (std::abs(a.angular_frequency() - b.angular_frequency()) > secular_threshold) {
    return std::nullopt;
  }
  const double r = separation.norm();
  if (!(r > 0.0)) throw Error(ErrorCode::Overlap, "emitters coincide");
  const Vec3 rhat = separation / r;
  const Eigen::Matrix3cd f = propagator_tensor(b.wavenumber() * r, rhat);
  // p_a^* . F . p_b; Eigen's dot() already conjugates the left operand.
  const Complex dipole = a.orientation.dot(f * b.orientation);
  const Complex x = normalization_prefactor(normalization) * cross_rate(a, b) *
                    std::exp(kI * (a.wavenumber() * r)) * dipole;
  return PairCoupling{x.real(), 2.0 * x.imag()};
}

double default_secular_threshold(const std::vector<TransitionDipole>& transitions) {
  double m = 0.0;
  for (const auto& t : transitions) m = std::max(m, t.rate);
  return 10.0 * m;
}

CouplingTensors::CouplingTensors(int n_atoms, std::vector<TransitionDipole> transitions)
    : n_atoms_(n_atoms), transitions_(std::move(transitions)) {
  if (n_atoms < 1) throw Error(ErrorCode::Domain, "need at least one emitter");
  const std::size_t nt = transitions_.size();
  const std::size_t n = static_cast<std::size_t>(n_atoms) * n_atoms * nt * nt;
  omega_.assign(n, 0.0);
  gamma_.assign(n, 0.0);
  present_.assign(n, 0);
}

std::size_t CouplingTensors::index(int a, int b, int i, int j) const {
  const int nt = transition_count();
  if (a < 0 || b < 0 || a >= n_atoms_ || b >= n_atoms_ || i < 0 || j < 0 || i >= nt || j >= nt) {
    throw Error(ErrorCode::Domain, "coupling index out of range");
  }
  return ((static_cast<std::size_t>(a) * n_atoms_ + b) * nt + i) * nt + j;
}

void CouplingTensors::set(int a, int b, int i, int j, PairCoupling value) {
  const std::size_t k = index(a, b, i, j);
  omega_[k] = value.omega;
  gamma_[k] = value.gamma;
  present_[k] = 1;
}

void CouplingTensors::clear(int a, int b, int i, int j) {
  const std::size_t k = index(a, b, i, j);
  omega_[k] = 0.0;
  gamma_[k] = 0.0;
  present_[k] = 0;
}

void CouplingTensors::zero_cross_atom(std::optional<int> transition, bool omega, bool gamma) {
  const int nt = transition_count();
  if (transition && (*transition < 0 || *transition >= nt)) {
    throw Error(ErrorCode::Domain, "transition index out of range");
  }
  for (int a = 0; a < n_atoms_; ++a) {
    for (int b = 0; b < n_atoms_; ++b) {
      if (a == b) continue;
      for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nt; ++j) {
          if (transition && (i != *transition || j != *transition)) continue;
          const std::size_t k = index(a, b, i, j);
          if (omega) omega_[k] = 0.0;
          if (gamma) gamma_[k] = 0.0;
        }
      }
    }
  }
}

int CouplingTensors::find_transition(int lower, int upper) const {
  for (int i = 0; i < transition_count(); ++i) {
    if (transitions_[i].lower == lower && transitions_[i].upper == upper) return i;
  }
  return -1;
}

CouplingTensors compute_couplings(const std::vector<Vec3>& positions,
                                  const std::vector<TransitionDipole>& transitions,
                                  const CouplingOptions& options) {
  if (positions.empty()) throw Error(ErrorCode::Domain, "no emitter positions");
  for (const auto& t : transitions) t.validate();
  const double threshold = options.secular_threshold < 0.0
                               ? default_secular_threshold(transitions)
                               : options.secular_threshold;
  const int na = static_cast<int>(positions.size());
  const int nt = static_cast<int>(transitions.size());
  for (int a = 0; a < na; ++a) {
    for (int b = a + 1; b < na; ++b) {
      if ((positions[a] - positions[b]).norm() < 1e-9) {
        throw Error(ErrorCode::Overlap, "emitters " + std::to_string(a) + " and " +
                                            std::to_string(b) + " coincide");
      }
    }
  }
  CouplingTensors out(na, transitions);
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < na; ++b) {
      for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nt; ++j) {
          const auto& ti = transitions[i];
          const auto& tj = transitions[j];
          if (a == b) {
            if (i == j) {
              out.set(a, b, i, j, {0.0, ti.rate});
            } else if (std::abs(ti.angular_frequency() - tj.angular_frequency()) <= threshold) {
              const Complex overlap = ti.orientation.dot(tj.orientation);
              out.set(a, b, i, j, {0.0, cross_rate(ti, tj) * overlap.real()});
            }
            continue;
          }
          auto c = pair_coupling(ti, tj, positions[b] - positions[a], threshold,
                                 options.normalization);
          if (c) out.set(a, b, i, j, *c);
        }
      }
    }
  }
  return out;
}

CollectiveChannels collective_channels(const CouplingTensors& couplings, int transition,
                                       int n_levels) {
  if (couplings.atoms() != 2) {
    throw Error(ErrorCode::Unsupported, "collective channels are defined for two emitters");
  }
  const auto& t = couplings.transition(transition);
  JointSpace space(n_levels, 2);
  CollectiveChannels out;
  out.gamma_plus = couplings.gamma(0, 0, transition, transition) +
                   couplings.gamma(0, 1, transition, transition);
  out.gamma_minus = couplings.gamma(0, 0, transition, transition) -
                    couplings.gamma(0, 1, transition, transition);
  const CMatrix s0 = space.sigma(0, t.lower, t.upper);
  const CMatrix s1 = space.sigma(1, t.lower, t.upper);
  const double inv = 1.0 / std::sqrt(2.0);
  out.pi_plus = inv * (s0 + s1);
  out.pi_minus = inv * (s0 - s1);
  return out;
}

}  // namespace cfwm
