#include "cfwm/observables.hpp"

#include <cmath>

#include "cfwm/joint_space.hpp"

namespace cfwm {

namespace {

void require_pair_of_four(const OperatorBasis& basis) {
  if (basis.atoms() != 2 || basis.levels() != 4) {
    throw Error(ErrorCode::Unsupported, "coincidence is defined for two four-level emitters");
  }
}

}  // namespace

CoincidenceResult g2_coincidence(const RVector& w, const OperatorBasis& basis, double kappa23,
                                 double kappa30, double r12_nm, double residual,
                                 const CoincidenceOptions& options) {
  require_pair_of_four(basis);
  const JointSpace sp(4, 2);
  auto s = [&](int atom, int m, int n) { return sp.sigma(atom, m, n); };
  const CMatrix pop = s(0, 2, 2) + s(0, 2, 2) * s(1, 3, 3) + s(0, 3, 3) * s(1, 2, 2) + s(1, 2, 2);
  const Complex p23 = std::exp(kI * (kappa23 * r12_nm));
  const Complex p20 = std::exp(kI * ((kappa23 + kappa30) * r12_nm));
  const CMatrix x23 = p23 * s(0, 2, 3) * s(1, 3, 2);
  const CMatrix x20 = p20 * s(0, 2, 0) * s(1, 0, 2);
  const CMatrix exch = 2.0 * (x23 + CMatrix(x23.adjoint())) + (x20 + CMatrix(x20.adjoint()));

  const Complex gpp = expectation(pop, w, basis);
  const Complex gpe = expectation(exch, w, basis);
  CoincidenceResult r;
  r.gpp = gpp.real();
  r.gpe = gpe.real();
  r.g2 = r.gpp + r.gpe;
  r.imaginary_residue = std::max(std::abs(gpp.imag()), std::abs(gpe.imag()));
  r.residual = residual;
  r.stale = residual > options.steady_threshold;
  return r;
}

std::pair<double, double> g2_split(const RVector& w, const OperatorBasis& basis, double kappa23,
                                   double kappa30, double r12_nm) {
  const CoincidenceResult r = g2_coincidence(w, basis, kappa23, kappa30, r12_nm);
  return {r.gpp, r.gpe};
}

double coincidence_scale(double omega23, double omega30, double p23, double p30,
                         double solid_angle) {
  constexpr double hbar = 1.054571817e-34;
  constexpr double eps0 = 8.8541878128e-12;
  constexpr double c = 299792458.0;
  const double num = std::pow(hbar, 4) * std::pow(omega23, 4) * std::pow(omega30, 4);
  return num / (eps0 * eps0 * std::pow(c, 4)) * p23 * p23 * p30 * p30 * solid_angle;
}

CMatrix tagged_operator(const std::string& tag, int n_levels) {
  if (tag.size() != 4) throw Error(ErrorCode::Domain, "operator tag must have four digits");
  const JointSpace sp(n_levels, 2);
  auto s = [&](int atom, int m, int n) { return sp.sigma(atom, m, n); };
  if (tag == "2222") return s(0, 2, 2) + s(1, 2, 2);
  if (tag == "2233") return s(0, 2, 2) * s(1, 3, 3) + s(0, 3, 3) * s(1, 2, 2);
  if (tag == "2332") return s(0, 2, 3) * s(1, 3, 2) + s(0, 3, 2) * s(1, 2, 3);
  if (tag == "2002") return s(0, 2, 0) * s(1, 0, 2) + s(0, 0, 2) * s(1, 2, 0);
  throw Error(ErrorCode::Domain, "unknown operator tag " + tag);
}

DressedContribution dressed_decomposition(const CMatrix& op, const std::string& tag,
                                          const DressedSpectrum& spectrum,
                                          bool keep_off_diagonal) {
  if (!spectrum.labelled()) {
    throw Error(ErrorCode::Label, "dressed decomposition needs a labelled spectrum");
  }
  if (op.rows() != spectrum.vectors.rows()) {
    throw Error(ErrorCode::Shape, "operator does not act on the spectrum's space");
  }
  const CMatrix m = spectrum.vectors.adjoint() * op * spectrum.vectors;
  DressedContribution out;
  out.tag = tag;
  out.labels = spectrum.labels;
  out.symmetry = spectrum.symmetry;
  for (int k = 0; k < spectrum.size(); ++k) out.zeta.push_back(m(k, k).real());
  for (int i = 0; i < spectrum.size(); ++i) {
    for (int j = 0; j < spectrum.size(); ++j) {
      const Symmetry a = spectrum.symmetry[i];
      const Symmetry b = spectrum.symmetry[j];
      if (a != Symmetry::Mixed && b != Symmetry::Mixed && a != b) {
        out.max_cross_sector = std::max(out.max_cross_sector, std::abs(m(i, j)));
      }
    }
  }
  if (keep_off_diagonal) {
    out.off_diagonal = m;
    out.off_diagonal.diagonal().setZero();
  }
  return out;
}

DressedContribution dressed_decomposition(const std::string& tag, const DressedSpectrum& spectrum,
                                          bool keep_off_diagonal) {
  return dressed_decomposition(tagged_operator(tag), tag, spectrum, keep_off_diagonal);
}

double far_field_intensity(const RVector& w, const OperatorBasis& basis, const Vec3& direction,
                           const std::vector<TransitionDipole>& transitions,
                           const std::vector<Vec3>& positions) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::Domain, "detector direction must be a unit vector");
  }
  if (static_cast<int>(positions.size()) != basis.atoms()) {
    throw Error(ErrorCode::Shape, "one position per emitter is required");
  }
  std::vector<TransitionDipole> selected = transitions;
  if (selected.empty()) {
    const auto scheme = presets::rb87_diamond_scheme();
    selected = {scheme.transitions[2], scheme.transitions[3]};
  }
  const JointSpace sp(basis.levels(), basis.atoms());
  const double d_ref = selected.front().angular_frequency();
  CMatrix total = CMatrix::Zero(sp.dimension(), sp.dimension());
  for (const auto& t : selected) {
    const CVec3 p = t.orientation;
    const CVec3 proj = p - direction.cast<Complex>() * direction.cast<Complex>().dot(p);
    const double weight = proj.squaredNorm() * std::pow(t.angular_frequency() / d_ref, 4);
    if (weight == 0.0) continue;
    for (int a = 0; a < basis.atoms(); ++a) {
      for (int b = 0; b < basis.atoms(); ++b) {
        const Complex phase =
            std::exp(kI * (t.wavenumber() * direction.dot(positions[a] - positions[b])));
        total += weight * phase * sp.sigma(a, t.upper, t.lower) * sp.sigma(b, t.lower, t.upper);
      }
    }
  }
  return expectation(total, w, basis).real();
}

std::vector<int> local_maxima(const std::vector<double>& y) {
  std::vector<int> out;
  for (std::size_t k = 1; k + 1 < y.size(); ++k) {
    if (y[k] > y[k - 1] && y[k] > y[k + 1]) out.push_back(static_cast<int>(k));
  }
  return out;
}

PointResult evaluate_point(const SystemModel& model, const OperatorBasis& basis,
                           GeneratorCache* cache) {
  const CMatrix h = model.h_sys();
  std::shared_ptr<const GeneratorMatrix> gen =
      cache ? cache->get(h, model.couplings, basis)
            : std::make_shared<const GeneratorMatrix>(build_generator(h, model.couplings, basis));
  const RVector w0 = product_initial_state(basis, std::vector<int>(basis.atoms(), 0));
  PointResult out;
  out.state = steady_state(gen->lambda, w0, basis);
  const double r0 = (gen->lambda * w0).cwiseAbs().maxCoeff();
  const double r1 = (gen->lambda * out.state).cwiseAbs().maxCoeff();
  const double residual = r0 > 0.0 ? r1 / r0 : r1;
  if (basis.atoms() == 2 && basis.levels() == 4) {
    const int i23 = model.scheme.find_transition(3, 2);
    const int i30 = model.scheme.find_transition(0, 3);
    if (i23 < 0 || i30 < 0) throw Error(ErrorCode::Domain, "scheme lacks the 2-3-0 cascade");
    const double r12 = (model.positions[1] - model.positions[0]).norm();
    out.coincidence = g2_coincidence(out.state, basis, model.scheme.transitions[i23].wavenumber(),
                                     model.scheme.transitions[i30].wavenumber(), r12, residual);
  } else {
    out.coincidence.residual = residual;
  }
  return out;
}

}  // namespace cfwm
