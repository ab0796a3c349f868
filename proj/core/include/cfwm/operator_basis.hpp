#pragma once

#include <cstddef>
#include <vector>

#include "cfwm/types.hpp"

namespace cfwm {

/// Hermitian single-emitter set: n_l projectors, then n_l(n_l-1)/2 symmetric pair matrices,
/// then n_l(n_l-1)/2 antisymmetric (sigma_y-like) pair matrices. Pairs are ordered (j<l)
/// lexicographically. Throws Error(Domain) for n_l < 2.
std::vector<CMatrix> build_single_basis(int n_levels);

/// One nonzero entry of a basis element.
struct BasisEntry {
  int row;
  int col;
  Complex value;
};

/// Complete trace-orthogonal Hermitian basis Q_k = q_{k_{n_a-1}} x ... x q_{k_0} of the
/// operators on the joint space. The index is mixed radix in base n_l^2, emitter 0 least
/// significant: k = sum_a k_a (n_l^2)^a.
class OperatorBasis {
 public:
  OperatorBasis(int n_levels, int n_atoms, std::size_t capacity = 10000);

  int levels() const { return levels_; }
  int atoms() const { return atoms_; }
  int size() const { return static_cast<int>(entries_.size()); }
  int dimension() const { return dimension_; }

  /// Dense copy of Q_k assembled from its nonzero entries.
  CMatrix element(int k) const;
  const std::vector<BasisEntry>& entries(int k) const { return entries_.at(k); }
  /// Tr[Q_k^dagger Q_k].
  double norm(int k) const { return norms_.at(k); }

  std::vector<int> digits(int k) const;
  int index(const std::vector<int>& digits) const;

  /// True when every factor of Q_k is a projector.
  bool is_population(int k) const;

  const std::vector<CMatrix>& single() const { return single_; }

 private:
  int levels_;
  int atoms_;
  int dimension_;
  std::vector<CMatrix> single_;
  std::vector<std::vector<BasisEntry>> entries_;
  std::vector<double> norms_;
};

/// Coefficients c_k = Tr[Q_k^dagger A] / Tr[Q_k^dagger Q_k]. Throws Error(Shape) on mismatch.
CVector expand_operator(const CMatrix& a, const OperatorBasis& basis);

/// sum_k c_k Q_k.
CMatrix reconstruct(const CVector& coefficients, const OperatorBasis& basis);

}  // namespace cfwm
