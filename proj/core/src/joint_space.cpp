#include "cfwm/joint_space.hpp"

#include <string>

namespace cfwm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::Capacity: return "capacity";
    case ErrorCode::Overlap: return "overlap";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Frame: return "frame";
    case ErrorCode::Construction: return "construction";
    case ErrorCode::Integration: return "integration";
    case ErrorCode::Degeneracy: return "degeneracy";
    case ErrorCode::Label: return "label";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol;
}

JointSpace::JointSpace(int levels, int atoms) : levels_(levels), atoms_(atoms), dimension_(1) {
  if (levels < 1 || atoms < 1) {
    throw Error(ErrorCode::Domain, "joint space needs levels >= 1 and atoms >= 1");
  }
  for (int a = 0; a < atoms; ++a) dimension_ *= levels;
}

int JointSpace::level_of(int joint_index, int atom) const {
  for (int a = 0; a < atom; ++a) joint_index /= levels_;
  return joint_index % levels_;
}

int JointSpace::joint_index(const std::vector<int>& levels_per_atom) const {
  if (static_cast<int>(levels_per_atom.size()) != atoms_) {
    throw Error(ErrorCode::Shape, "expected one level per emitter");
  }
  int index = 0;
  int stride = 1;
  for (int a = 0; a < atoms_; ++a) {
    const int m = levels_per_atom[a];
    if (m < 0 || m >= levels_) throw Error(ErrorCode::Domain, "level index out of range");
    index += m * stride;
    stride *= levels_;
  }
  return index;
}

CMatrix JointSpace::single(int m, int n) const {
  if (m < 0 || n < 0 || m >= levels_ || n >= levels_) {
    throw Error(ErrorCode::Domain,
                "transition (" + std::to_string(m) + "," + std::to_string(n) + ") out of range");
  }
  CMatrix s = CMatrix::Zero(levels_, levels_);
  s(m, n) = 1.0;
  return s;
}

CMatrix JointSpace::embed(const CMatrix& op, int atom) const {
  if (op.rows() != levels_ || op.cols() != levels_) {
    throw Error(ErrorCode::Shape, "single-emitter operator has wrong dimension");
  }
  if (atom < 0 || atom >= atoms_) throw Error(ErrorCode::Domain, "emitter index out of range");
  int stride = 1;
  for (int a = 0; a < atom; ++a) stride *= levels_;
  CMatrix out = CMatrix::Zero(dimension_, dimension_);
  // |i> = ... digit_atom ... ; op acts only on the digit at `stride`.
  for (int i = 0; i < dimension_; ++i) {
    const int mi = (i / stride) % levels_;
    const int base = i - mi * stride;
    for (int mj = 0; mj < levels_; ++mj) {
      const Complex v = op(mi, mj);
      if (v == Complex{}) continue;
      out(i, base + mj * stride) = v;
    }
  }
  return out;
}

CVector JointSpace::product_state(const std::vector<int>& levels_per_atom) const {
  CVector psi = CVector::Zero(dimension_);
  psi(joint_index(levels_per_atom)) = 1.0;
  return psi;
}

}  // namespace cfwm
