#pragma once

#include <vector>

#include "cfwm/types.hpp"

namespace cfwm {

/// Joint Hilbert space of `atoms` emitters with `levels` levels each.
///
/// Emitter 0 is the rightmost Kronecker factor, so the joint index of the product state
/// |m_{n-1}> x ... x |m_0> is sum_a m_a * levels^a.
class JointSpace {
 public:
  JointSpace(int levels, int atoms);

  int levels() const { return levels_; }
  int atoms() const { return atoms_; }
  int dimension() const { return dimension_; }

  int level_of(int joint_index, int atom) const;
  int joint_index(const std::vector<int>& levels_per_atom) const;

  /// |m><n| on a single emitter.
  CMatrix single(int m, int n) const;

  /// `op` acting on emitter `atom`, identity elsewhere.
  CMatrix embed(const CMatrix& op, int atom) const;

  /// sigma^atom_{mn} = |m><n| on emitter `atom`.
  CMatrix sigma(int atom, int m, int n) const { return embed(single(m, n), atom); }

  CMatrix identity() const { return CMatrix::Identity(dimension_, dimension_); }

  /// Product state with emitter a in level levels_per_atom[a].
  CVector product_state(const std::vector<int>& levels_per_atom) const;

 private:
  int levels_;
  int atoms_;
  int dimension_;
};

}  // namespace cfwm
