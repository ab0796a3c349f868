#include "cfwm/operator_basis.hpp"

#include <algorithm>

#include <string>

namespace cfwm {

std::vector<CMatrix> build_single_basis(int n_levels) {
  if (n_levels < 2) throw Error(ErrorCode::Domain, "single-emitter basis needs n_l >= 2");
  const int n = n_levels;
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    CMatrix q = CMatrix::Zero(n, n);
    q(k, k) = 1.0;
    out.push_back(q);
  }
  for (int j = 0; j < n; ++j) {
    for (int l = j + 1; l < n; ++l) {
      CMatrix q = CMatrix::Zero(n, n);
      q(j, l) = 1.0;
      q(l, j) = 1.0;
      out.push_back(q);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int l = j + 1; l < n; ++l) {
      CMatrix q = CMatrix::Zero(n, n);
      q(j, l) = -kI;
      q(l, j) = kI;
      out.push_back(q);
    }
  }
  return out;
}

OperatorBasis::OperatorBasis(int n_levels, int n_atoms, std::size_t capacity)
    : levels_(n_levels), atoms_(n_atoms), dimension_(1) {
  if (n_atoms < 1) throw Error(ErrorCode::Domain, "collective basis needs n_a >= 1");
  single_ = build_single_basis(n_levels);
  const std::size_t radix = single_.size();
  std::size_t count = 1;
  for (int a = 0; a < n_atoms; ++a) {
    count *= radix;
    dimension_ *= n_levels;
    if (count > capacity) {
      std::size_t required = 1;
      for (int b = 0; b < n_atoms; ++b) required *= radix;
      throw Error(ErrorCode::Capacity, "operator basis needs N = " + std::to_string(required) +
                                           " elements (limit " + std::to_string(capacity) + ")");
    }
  }

  entries_.reserve(count);
  norms_.reserve(count);
  std::vector<std::vector<BasisEntry>> factors(radix);
  for (std::size_t m = 0; m < radix; ++m) {
    for (int j = 0; j < n_levels; ++j) {
      for (int i = 0; i < n_levels; ++i) {
        if (single_[m](i, j) != Complex{}) factors[m].push_back({i, j, single_[m](i, j)});
      }
    }
  }
  for (std::size_t k = 0; k < count; ++k) {
    const std::vector<int> d = digits(static_cast<int>(k));
    // Kronecker product from the most significant factor down so emitter 0 ends up rightmost.
    std::vector<BasisEntry> nz = factors[d[atoms_ - 1]];
    for (int a = atoms_ - 2; a >= 0; --a) {
      std::vector<BasisEntry> next;
      next.reserve(nz.size() * factors[d[a]].size());
      for (const auto& q : nz) {
        for (const auto& f : factors[d[a]]) {
          next.push_back({q.row * n_levels + f.row, q.col * n_levels + f.col, q.value * f.value});
        }
      }
      nz = std::move(next);
    }
    std::sort(nz.begin(), nz.end(), [](const BasisEntry& x, const BasisEntry& y) {
      return x.col != y.col ? x.col < y.col : x.row < y.row;
    });
    double norm = 0.0;
    for (const auto& e : nz) norm += std::norm(e.value);
    entries_.push_back(std::move(nz));
    norms_.push_back(norm);
  }
}

CMatrix OperatorBasis::element(int k) const {
  CMatrix q = CMatrix::Zero(dimension_, dimension_);
  for (const auto& e : entries_.at(k)) q(e.row, e.col) = e.value;
  return q;
}

std::vector<int> OperatorBasis::digits(int k) const {
  const int radix = levels_ * levels_;
  std::vector<int> d(atoms_);
  for (int a = 0; a < atoms_; ++a) {
    d[a] = k % radix;
    k /= radix;
  }
  return d;
}

int OperatorBasis::index(const std::vector<int>& d) const {
  const int radix = levels_ * levels_;
  if (static_cast<int>(d.size()) != atoms_) throw Error(ErrorCode::Shape, "digit count mismatch");
  int k = 0;
  for (int a = atoms_ - 1; a >= 0; --a) {
    if (d[a] < 0 || d[a] >= radix) throw Error(ErrorCode::Domain, "basis digit out of range");
    k = k * radix + d[a];
  }
  return k;
}

bool OperatorBasis::is_population(int k) const {
  for (int d : digits(k)) {
    if (d >= levels_) return false;
  }
  return true;
}

CVector expand_operator(const CMatrix& a, const OperatorBasis& basis) {
  if (a.rows() != basis.dimension() || a.cols() != basis.dimension()) {
    throw Error(ErrorCode::Shape, "operator dimension does not match the basis");
  }
  CVector c(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    Complex s{};
    for (const auto& e : basis.entries(k)) s += std::conj(e.value) * a(e.row, e.col);
    c(k) = s / basis.norm(k);
  }
  return c;
}

CMatrix reconstruct(const CVector& coefficients, const OperatorBasis& basis) {
  if (coefficients.size() != basis.size()) {
    throw Error(ErrorCode::Shape, "coefficient vector length does not match the basis");
  }
  CMatrix out = CMatrix::Zero(basis.dimension(), basis.dimension());
  for (int k = 0; k < basis.size(); ++k) {
    if (coefficients(k) == Complex{}) continue;
    for (const auto& e : basis.entries(k)) out(e.row, e.col) += coefficients(k) * e.value;
  }
  return out;
}

}  // namespace cfwm
