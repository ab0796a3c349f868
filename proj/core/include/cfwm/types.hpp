#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cfwm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr Complex kI{0.0, 1.0};

// Unit system used throughout the library:
//   angular frequencies and rates  10^6 rad/s  (= rad/us)
//   lengths                        nm
//   times                          ns
namespace units {
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Speed of light in nm/us, so that c * kappa [nm^-1] is a rate in 10^6 rad/s.
inline constexpr double kSpeedOfLight = 2.99792458e11;
/// Multiply a time in ns by this to make it dimensionless against a rate in 10^6 rad/s.
inline constexpr double kNsToRateTime = 1.0e-3;

inline double wavenumber(double wavelength_nm) { return kTwoPi / wavelength_nm; }
inline double angular_frequency(double wavelength_nm) {
  return kSpeedOfLight * wavenumber(wavelength_nm);
}
}  // namespace units

enum class ErrorCode {
  Domain,
  Shape,
  Capacity,
  Overlap,
  Unsupported,
  Frame,
  Construction,
  Integration,
  Degeneracy,
  Label,
  Config,
  Io,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + " error: " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

double max_abs(const CMatrix& m);
bool is_hermitian(const CMatrix& m, double tol);

}  // namespace cfwm
