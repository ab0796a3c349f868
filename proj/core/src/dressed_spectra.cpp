#include "cfwm/dressed_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace cfwm {

const char* to_string(Symmetry s) {
  switch (s) {
    case Symmetry::Symmetric: return "symmetric";
    case Symmetry::Antisymmetric: return "antisymmetric";
    case Symmetry::Mixed: return "mixed";
  }
  return "mixed";
}

int DressedSpectrum::find(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

void fix_phases(CMatrix& vectors) {
  for (int j = 0; j < vectors.cols(); ++j) {
    const double top = vectors.col(j).cwiseAbs().maxCoeff();
    int pick = 0;
    for (int i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) >= top - 1e-12) {
        pick = i;
        break;
      }
    }
    const Complex v = vectors(pick, j);
    if (std::abs(v) > 0.0) vectors.col(j) *= std::conj(v) / std::abs(v);
  }
}

namespace {

struct Sector {
  CMatrix basis;
  Symmetry symmetry;
};

/// Orthonormal bases of the +1/-1 eigenspaces of a permutation-type exchange operator.
std::vector<Sector> exchange_sectors(const CMatrix& swap) {
  const int n = static_cast<int>(swap.rows());
  std::vector<int> perm(n, -1);
  bool permutation = true;
  for (int p = 0; p < n && permutation; ++p) {
    int hits = 0;
    for (int q = 0; q < n; ++q) {
      const Complex v = swap(q, p);
      if (std::abs(v - 1.0) < 1e-12) {
        perm[p] = q;
        ++hits;
      } else if (std::abs(v) > 1e-12) {
        permutation = false;
      }
    }
    if (hits != 1) permutation = false;
  }
  std::vector<CVector> sym, anti;
  if (permutation) {
    const double s = 1.0 / std::sqrt(2.0);
    for (int p = 0; p < n; ++p) {
      const int q = perm[p];
      if (q == p) {
        CVector v = CVector::Zero(n);
        v(p) = 1.0;
        sym.push_back(v);
      } else if (p < q) {
        CVector v = CVector::Zero(n);
        v(p) = s;
        v(q) = s;
        sym.push_back(v);
        v(q) = -s;
        anti.push_back(v);
      }
    }
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (swap + swap.adjoint()));
    for (int k = 0; k < n; ++k) {
      (es.eigenvalues()(k) > 0 ? sym : anti).push_back(es.eigenvectors().col(k));
    }
  }
  std::vector<Sector> out;
  for (auto [list, s] : {std::pair{&sym, Symmetry::Symmetric}, {&anti, Symmetry::Antisymmetric}}) {
    CMatrix b(n, static_cast<int>(list->size()));
    for (std::size_t k = 0; k < list->size(); ++k) b.col(static_cast<int>(k)) = (*list)[k];
    out.push_back({b, s});
  }
  return out;
}

Symmetry classify(const CVector& v, const CMatrix& swap) {
  const double e = v.dot(swap * v).real();
  if (e > 1.0 - 1e-8) return Symmetry::Symmetric;
  if (e < -1.0 + 1e-8) return Symmetry::Antisymmetric;
  return Symmetry::Mixed;
}

void sort_spectrum(DressedSpectrum& s) {
  const int n = s.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return s.energies(a) < s.energies(b); });
  DressedSpectrum out;
  out.energies.resize(n);
  out.vectors.resize(s.vectors.rows(), n);
  for (int k = 0; k < n; ++k) {
    out.energies(k) = s.energies(order[k]);
    out.vectors.col(k) = s.vectors.col(order[k]);
    out.symmetry.push_back(s.symmetry[order[k]]);
  }
  out.flagged.assign(n, false);
  s = std::move(out);
}

}  // namespace

DressedSpectrum diagonalize(const CMatrix& h, const CMatrix* swap,
                            const DiagonalizeOptions& options) {
  if (h.rows() != h.cols()) throw Error(ErrorCode::Shape, "Hamiltonian must be square");
  const double scale = std::max(1.0, max_abs(h));
  if (!is_hermitian(h, options.hermitian_tolerance * scale)) {
    throw Error(ErrorCode::Domain, "Hamiltonian is not Hermitian");
  }
  const CMatrix hh = 0.5 * (h + h.adjoint());
  const int n = static_cast<int>(h.rows());
  DressedSpectrum s;
  s.energies.resize(n);
  s.vectors.resize(n, n);

  const bool commutes = swap != nullptr && swap->rows() == n &&
                        max_abs(hh * *swap - *swap * hh) <= options.commutator_tolerance * scale;
  if (commutes) {
    int col = 0;
    for (const auto& sector : exchange_sectors(*swap)) {
      if (sector.basis.cols() == 0) continue;
      const CMatrix block = sector.basis.adjoint() * hh * sector.basis;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (block + block.adjoint()));
      const CMatrix v = sector.basis * es.eigenvectors();
      for (int k = 0; k < v.cols(); ++k, ++col) {
        s.energies(col) = es.eigenvalues()(k);
        s.vectors.col(col) = v.col(k);
        s.symmetry.push_back(sector.symmetry);
      }
    }
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hh);
    s.energies = es.eigenvalues();
    s.vectors = es.eigenvectors();
    for (int k = 0; k < n; ++k) {
      s.symmetry.push_back(swap != nullptr && swap->rows() == n
                               ? classify(s.vectors.col(k), *swap)
                               : Symmetry::Mixed);
    }
  }
  sort_spectrum(s);
  fix_phases(s.vectors);
  return s;
}

SingleAtomDressed single_atom_closed_form(double delta1, double lam01, double lam12) {
  SingleAtomDressed out;
  const double zeta = std::sqrt(delta1 * delta1 + 16.0 * lam01 * lam01 + 16.0 * lam12 * lam12);
  out.zeta = zeta;
  out.energies = {0.0, -delta1 / 3.0, (delta1 + 3.0 * zeta) / 6.0, (delta1 - 3.0 * zeta) / 6.0};
  auto make = [](double c0, double c1, double c2, double c3) {
    CVector v(4);
    v << c0, c1, c2, c3;
    const double n = v.norm();
    if (n > 0.0) v /= n;
    return v;
  };
  out.states[0] = make(0, 0, 0, 1);
  out.states[1] = make(lam12, 0, -lam01, 0);
  out.states[2] = make(lam01, (delta1 + zeta) / 4.0, lam12, 0);
  out.states[3] = make(lam01, (delta1 - zeta) / 4.0, lam12, 0);
  for (auto& v : out.states) {
    CMatrix m = v;
    fix_phases(m);
    v = m.col(0);
  }
  return out;
}

SingleStates name_single_states(const CMatrix& h_single) {
  const DressedSpectrum s = diagonalize(h_single);
  const int n = s.size();
  SingleStates out;
  out.energies.resize(n);
  out.vectors.resize(n, n);
  if (n != 4) {
    for (int k = 0; k < n; ++k) {
      out.names.push_back("s" + std::to_string(k));
      out.energies(k) = s.energies(k);
      out.vectors.col(k) = s.vectors.col(k);
    }
    return out;
  }
  std::vector<int> rest(4);
  std::iota(rest.begin(), rest.end(), 0);
  auto take = [&](auto key) {
    auto it = std::max_element(rest.begin(), rest.end(),
                               [&](int a, int b) { return key(a) < key(b); });
    const int k = *it;
    rest.erase(it);
    return k;
  };
  const int a = take([&](int k) { return std::abs(s.vectors(3, k)); });
  const int b = take([&](int k) { return -std::abs(s.vectors(1, k)); });
  const int c = take([&](int k) { return s.energies(k); });
  const int d = rest.front();
  const std::array<std::pair<const char*, int>, 4> named{
      {{"a", a}, {"b", b}, {"c", c}, {"d", d}}};
  int col = 0;
  for (const auto& [name, k] : named) {
    out.names.push_back(name);
    out.energies(col) = s.energies(k);
    out.vectors.col(col) = s.vectors.col(k);
    ++col;
  }
  return out;
}

PairStates pair_states(const SingleStates& single) {
  const int n = static_cast<int>(single.names.size());
  const int dim = static_cast<int>(single.vectors.rows());
  auto product = [&](int i, int j) {
    // Emitter 1 in state i (left factor), emitter 0 in state j.
    CVector v(dim * dim);
    for (int p = 0; p < dim; ++p) {
      v.segment(p * dim, dim) = single.vectors(p, i) * single.vectors.col(j);
    }
    return v;
  };
  std::vector<std::tuple<std::string, Symmetry, CVector>> sym, anti;
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const std::string body = "|" + single.names[i] + "," + single.names[j] + ">";
      if (i == j) {
        sym.emplace_back(body + "+", Symmetry::Symmetric, product(i, i));
      } else {
        const CVector ij = product(i, j);
        const CVector ji = product(j, i);
        sym.emplace_back(body + "+", Symmetry::Symmetric, s * (ij + ji));
        anti.emplace_back(body + "-", Symmetry::Antisymmetric, s * (ij - ji));
      }
    }
  }
  PairStates out;
  out.vectors.resize(dim * dim, static_cast<int>(sym.size() + anti.size()));
  int col = 0;
  for (auto* list : {&sym, &anti}) {
    for (auto& [label, symmetry, v] : *list) {
      out.labels.push_back(label);
      out.symmetry.push_back(symmetry);
      out.vectors.col(col++) = v;
    }
  }
  return out;
}

namespace {

/// Greedy one-to-one matching by decreasing weight. weights(i, j) < 0 marks a forbidden pair.
std::vector<int> greedy_match(const RMatrix& weights) {
  std::vector<std::tuple<double, int, int>> cand;
  for (int i = 0; i < weights.rows(); ++i) {
    for (int j = 0; j < weights.cols(); ++j) {
      if (weights(i, j) >= 0.0) cand.emplace_back(weights(i, j), i, j);
    }
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  std::vector<int> row_for_col(weights.cols(), -1);
  std::vector<bool> row_used(weights.rows(), false);
  for (const auto& [w, i, j] : cand) {
    if (row_used[i] || row_for_col[j] >= 0) continue;
    row_used[i] = true;
    row_for_col[j] = i;
  }
  return row_for_col;
}

bool compatible(Symmetry a, Symmetry b) {
  return a == Symmetry::Mixed || b == Symmetry::Mixed || a == b;
}

/// Flags column j when its two best allowed weights are within `ambiguity`.
bool ambiguous(const RMatrix& weights, int j, double ambiguity) {
  double first = -1.0, second = -1.0;
  for (int i = 0; i < weights.rows(); ++i) {
    const double w = weights(i, j);
    if (w > first) {
      second = first;
      first = w;
    } else if (w > second) {
      second = w;
    }
  }
  return second >= 0.0 && first - second < ambiguity;
}

}  // namespace

void assign_labels(DressedSpectrum& spectrum, const PairStates& reference, double degeneracy) {
  const int n = spectrum.size();
  if (reference.vectors.rows() != spectrum.vectors.rows() || reference.vectors.cols() != n) {
    throw Error(ErrorCode::Shape, "reference states do not match the spectrum");
  }
  // Rotate degenerate clusters (same sector) onto the reference states they contain.
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && spectrum.energies(end) - spectrum.energies(end - 1) < degeneracy) ++end;
    for (Symmetry sector : {Symmetry::Symmetric, Symmetry::Antisymmetric, Symmetry::Mixed}) {
      std::vector<int> cols;
      for (int k = start; k < end; ++k) {
        if (spectrum.symmetry[k] == sector) cols.push_back(k);
      }
      if (cols.size() < 2) continue;
      const int m = static_cast<int>(cols.size());
      CMatrix v(spectrum.vectors.rows(), m);
      for (int c = 0; c < m; ++c) v.col(c) = spectrum.vectors.col(cols[c]);
      const CMatrix p = v.adjoint() * reference.vectors;
      std::vector<int> refs(reference.vectors.cols());
      std::iota(refs.begin(), refs.end(), 0);
      std::stable_sort(refs.begin(), refs.end(),
                       [&](int a, int b) { return p.col(a).norm() > p.col(b).norm(); });
      CMatrix rotated(v.rows(), m);
      for (int c = 0; c < m; ++c) {
        CVector x = v * p.col(refs[c]);
        for (int q = 0; q < c; ++q) x -= rotated.col(q).dot(x) * rotated.col(q);
        const double norm = x.norm();
        rotated.col(c) = norm > 1e-12 ? CVector(x / norm) : CVector(v.col(c));
      }
      fix_phases(rotated);
      for (int c = 0; c < m; ++c) spectrum.vectors.col(cols[c]) = rotated.col(c);
    }
    start = end;
  }

  RMatrix w(n, n);
  const CMatrix overlap = reference.vectors.adjoint() * spectrum.vectors;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      w(i, j) = compatible(reference.symmetry[i], spectrum.symmetry[j])
                    ? std::norm(overlap(i, j))
                    : -1.0;
    }
  }
  const std::vector<int> match = greedy_match(w);
  spectrum.labels.assign(n, "?");
  spectrum.flagged.assign(n, false);
  for (int j = 0; j < n; ++j) {
    if (match[j] >= 0) {
      spectrum.labels[j] = reference.labels[match[j]];
    } else {
      spectrum.flagged[j] = true;
    }
    if (ambiguous(w, j, 1e-3)) spectrum.flagged[j] = true;
  }
}

void track_labels(std::vector<DressedSpectrum>& spectra, const TrackingOptions& options) {
  if (spectra.empty()) return;
  if (!spectra.front().labelled()) {
    throw Error(ErrorCode::Label, "first spectrum of a sweep must be labelled");
  }
  for (std::size_t k = 1; k < spectra.size(); ++k) {
    const DressedSpectrum& prev = spectra[k - 1];
    DressedSpectrum& cur = spectra[k];
    const int n = cur.size();
    if (prev.size() != n) throw Error(ErrorCode::Shape, "spectra along a sweep differ in size");
    const CMatrix overlap = prev.vectors.adjoint() * cur.vectors;
    RMatrix w(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const bool ok = !options.enforce_sectors || compatible(prev.symmetry[i], cur.symmetry[j]);
        w(i, j) = ok ? std::abs(overlap(i, j)) : -1.0;
      }
    }
    const std::vector<int> match = greedy_match(w);
    cur.labels.assign(n, "?");
    cur.flagged.assign(n, false);
    for (int j = 0; j < n; ++j) {
      if (match[j] >= 0) {
        cur.labels[j] = prev.labels[match[j]];
      } else {
        cur.flagged[j] = true;
      }
      if (ambiguous(w, j, options.ambiguity)) cur.flagged[j] = true;
    }
  }
}

std::vector<Anticrossing> find_anticrossings(const std::vector<double>& sweep,
                                             const std::vector<DressedSpectrum>& spectra) {
  if (sweep.size() != spectra.size()) {
    throw Error(ErrorCode::Shape, "sweep values and spectra differ in length");
  }
  using Key = std::tuple<Symmetry, std::string, std::string>;
  std::map<Key, std::map<std::size_t, double>> gaps;
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    const auto& s = spectra[k];
    if (!s.labelled()) throw Error(ErrorCode::Label, "anticrossing search needs labels");
    for (Symmetry sector : {Symmetry::Symmetric, Symmetry::Antisymmetric, Symmetry::Mixed}) {
      int last = -1;
      for (int j = 0; j < s.size(); ++j) {
        if (s.symmetry[j] != sector) continue;
        if (last >= 0) {
          gaps[{sector, s.labels[last], s.labels[j]}][k] = s.energies(j) - s.energies(last);
        }
        last = j;
      }
    }
  }
  std::vector<Anticrossing> out;
  for (const auto& [key, series] : gaps) {
    for (const auto& [k, g] : series) {
      if (k == 0) continue;
      auto before = series.find(k - 1);
      auto after = series.find(k + 1);
      if (before == series.end() || after == series.end()) continue;
      if (g < before->second && g < after->second) {
        out.push_back({std::get<1>(key), std::get<2>(key), std::get<0>(key), sweep[k], g});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.sweep_value > b.sweep_value;
  });
  return out;
}

std::vector<double> default_separation_sweep(double near, double far, int points) {
  if (!(near > 0.0) || !(far > near) || points < 2) {
    throw Error(ErrorCode::Domain, "separation sweep needs 0 < near < far and >= 2 points");
  }
  std::vector<double> r(points);
  const double a = std::log(far);
  const double b = std::log(near);
  for (int k = 0; k < points; ++k) r[k] = std::exp(a + (b - a) * k / (points - 1));
  r.front() = far;
  r.back() = near;
  return r;
}

}  // namespace cfwm
