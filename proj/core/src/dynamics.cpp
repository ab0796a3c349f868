#include "cfwm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include <Eigen/LU>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "cfwm/joint_space.hpp"

namespace cfwm {

namespace {

int digit(int index, int atom, int levels) {
  for (int a = 0; a < atom; ++a) index /= levels;
  return index % levels;
}

int stride_of(int atom, int levels) {
  int s = 1;
  for (int a = 0; a < atom; ++a) s *= levels;
  return s;
}

}  // namespace

Dissipator::Dissipator(const CouplingTensors& couplings, int n_levels)
    : levels_(n_levels), atoms_(couplings.atoms()), dimension_(JointSpace(n_levels, atoms_).dimension()) {
  const JointSpace space(n_levels, atoms_);
  const int nt = couplings.transition_count();
  decay_ = CMatrix::Zero(dimension_, dimension_);
  for (int a = 0; a < atoms_; ++a) {
    for (int b = 0; b < atoms_; ++b) {
      for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nt; ++j) {
          if (!couplings.present(a, b, i, j)) continue;
          const double g = couplings.gamma(a, b, i, j);
          if (g == 0.0) continue;
          const auto& ti = couplings.transition(i);
          const auto& tj = couplings.transition(j);
          if (ti.upper >= n_levels || tj.upper >= n_levels || ti.lower >= n_levels ||
              tj.lower >= n_levels) {
            throw Error(ErrorCode::Shape, "transition outside the level scheme");
          }
          terms_.push_back({g, a, ti.lower, ti.upper, b, tj.lower, tj.upper});

          Map raise{std::vector<int>(dimension_, -1)};
          Map lower{std::vector<int>(dimension_, -1)};
          const int sa = stride_of(a, n_levels);
          const int sb = stride_of(b, n_levels);
          for (int c = 0; c < dimension_; ++c) {
            if (digit(c, a, n_levels) == ti.lower) raise.target[c] = c + (ti.upper - ti.lower) * sa;
            if (digit(c, b, n_levels) == tj.lower) lower.target[c] = c + (tj.upper - tj.lower) * sb;
          }
          raise_cols_.push_back(std::move(raise));
          lower_rows_.push_back(std::move(lower));
          decay_ += g * space.sigma(a, ti.upper, ti.lower) * space.sigma(b, tj.lower, tj.upper);
        }
      }
    }
  }
}

void Dissipator::add_jumps(const std::vector<BasisEntry>& q, CMatrix& out) const {
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const double g = terms_[t].gamma;
    const auto& raise = raise_cols_[t].target;
    const auto& lower = lower_rows_[t].target;
    for (const auto& e : q) {
      const int r = raise[e.row];
      const int c = lower[e.col];
      if (r >= 0 && c >= 0) out(r, c) += g * e.value;
    }
  }
}

CMatrix Dissipator::apply(const CMatrix& q) const {
  if (q.rows() != dimension_ || q.cols() != dimension_) {
    throw Error(ErrorCode::Shape, "operator dimension does not match the dissipator");
  }
  std::vector<BasisEntry> entries;
  for (int c = 0; c < q.cols(); ++c) {
    for (int r = 0; r < q.rows(); ++r) {
      if (q(r, c) != Complex{}) entries.push_back({r, c, q(r, c)});
    }
  }
  CMatrix out = -0.5 * (decay_ * q + q * decay_);
  add_jumps(entries, out);
  return out;
}

CMatrix apply_dissipator(const CMatrix& q, const CouplingTensors& couplings, int n_levels) {
  return Dissipator(couplings, n_levels).apply(q);
}

std::uint64_t generator_hash(const CMatrix& h_sys, const CouplingTensors& couplings,
                             const OperatorBasis& basis) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= p[k];
      h *= 1099511628211ull;
    }
  };
  auto mix_double = [&](double v) { mix(&v, sizeof v); };
  const int dims[3] = {basis.levels(), basis.atoms(), static_cast<int>(h_sys.rows())};
  mix(dims, sizeof dims);
  for (int j = 0; j < h_sys.cols(); ++j) {
    for (int i = 0; i < h_sys.rows(); ++i) {
      mix_double(h_sys(i, j).real());
      mix_double(h_sys(i, j).imag());
    }
  }
  const int nt = couplings.transition_count();
  for (int a = 0; a < couplings.atoms(); ++a) {
    for (int b = 0; b < couplings.atoms(); ++b) {
      for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nt; ++j) {
          mix_double(couplings.present(a, b, i, j) ? couplings.gamma(a, b, i, j) : 0.0);
        }
      }
    }
  }
  for (const auto& t : couplings.transitions()) {
    const int idx[2] = {t.lower, t.upper};
    mix(idx, sizeof idx);
  }
  return h;
}

GeneratorMatrix build_generator(const CMatrix& h_sys, const CouplingTensors& couplings,
                                const OperatorBasis& basis, const GeneratorOptions& options) {
  const int n = basis.dimension();
  if (h_sys.rows() != n || h_sys.cols() != n) {
    throw Error(ErrorCode::Shape, "H_sys dimension does not match the operator basis");
  }
  if (couplings.atoms() != basis.atoms()) {
    throw Error(ErrorCode::Shape, "coupling tensors and basis disagree on the emitter count");
  }
  const Dissipator diss(couplings, basis.levels());
  const CMatrix left = kI * h_sys - 0.5 * diss.decay_operator();
  const CMatrix right = -kI * h_sys - 0.5 * diss.decay_operator();

  const int size = basis.size();
  GeneratorMatrix g;
  g.levels = basis.levels();
  g.atoms = basis.atoms();
  g.lambda.resize(size, size);
  CMatrix l(n, n);
  for (int i = 0; i < size; ++i) {
    l.setZero();
    const auto& qi = basis.entries(i);
    for (const auto& e : qi) {
      l.col(e.col) += e.value * left.col(e.row);
      l.row(e.row) += e.value * right.row(e.col);
    }
    diss.add_jumps(qi, l);
    for (int j = 0; j < size; ++j) {
      Complex s{};
      for (const auto& e : basis.entries(j)) s += std::conj(e.value) * l(e.row, e.col);
      s /= basis.norm(j);
      g.imaginary_residue = std::max(g.imaginary_residue, std::abs(s.imag()));
      g.lambda(i, j) = s.real();
    }
  }
  if (g.imaginary_residue > options.imaginary_tolerance) {
    throw Error(ErrorCode::Construction,
                "generator has imaginary residue " + std::to_string(g.imaginary_residue) +
                    " (non-Hermitian H_sys or an unresolved frame)");
  }
  g.build_hash = generator_hash(h_sys, couplings, basis);
  return g;
}

std::shared_ptr<const GeneratorMatrix> GeneratorCache::get(const CMatrix& h_sys,
                                                           const CouplingTensors& couplings,
                                                           const OperatorBasis& basis) {
  const std::uint64_t key = generator_hash(h_sys, couplings, basis);
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto built = std::make_shared<const GeneratorMatrix>(build_generator(h_sys, couplings, basis));
  std::lock_guard lock(mutex_);
  return entries_.emplace(key, std::move(built)).first->second;
}

std::size_t GeneratorCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t GeneratorCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

RVector population_functional(const OperatorBasis& basis) {
  RVector f = RVector::Zero(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    if (basis.is_population(k)) f(k) = 1.0;
  }
  return f;
}

RVector state_from_density(const CMatrix& rho, const OperatorBasis& basis) {
  if (rho.rows() != basis.dimension() || rho.cols() != basis.dimension()) {
    throw Error(ErrorCode::Shape, "density matrix dimension does not match the basis");
  }
  RVector w(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    Complex s{};
    for (const auto& e : basis.entries(k)) s += e.value * rho(e.col, e.row);
    w(k) = s.real();
  }
  return w;
}

RVector product_initial_state(const OperatorBasis& basis, const std::vector<int>& levels_per_atom) {
  const JointSpace space(basis.levels(), basis.atoms());
  const CVector psi = space.product_state(levels_per_atom);
  return state_from_density(psi * psi.adjoint(), basis);
}

CMatrix density_from_state(const RVector& w, const OperatorBasis& basis) {
  if (w.size() != basis.size()) throw Error(ErrorCode::Shape, "state length does not match basis");
  CVector c(basis.size());
  for (int k = 0; k < basis.size(); ++k) c(k) = w(k) / basis.norm(k);
  return reconstruct(c, basis);
}

Trajectory integrate(const RMatrix& lambda, const RVector& w0, double t_final_ns,
                     const IntegrationOptions& options) {
  namespace odeint = boost::numeric::odeint;
  if (lambda.rows() != lambda.cols() || lambda.rows() != w0.size()) {
    throw Error(ErrorCode::Shape, "generator and initial state disagree in size");
  }
  if (!(t_final_ns >= 0.0) || !std::isfinite(t_final_ns)) {
    throw Error(ErrorCode::Domain, "final time must be finite and non-negative");
  }
  Trajectory out;
  out.initial_residual = (lambda * w0).cwiseAbs().maxCoeff();

  std::vector<double> times;
  const int pieces = std::max(0, options.samples) + 1;
  for (int k = 0; k <= pieces; ++k) times.push_back(t_final_ns * k / pieces);

  if (options.method == IntegrationMethod::Exponential) {
    const double dt = t_final_ns / pieces * units::kNsToRateTime;
    const RMatrix step = (lambda * dt).exp();
    RVector w = w0;
    out.times_ns.push_back(0.0);
    out.states.push_back(w);
    for (int k = 1; k <= pieces; ++k) {
      w = step * w;
      out.times_ns.push_back(times[k]);
      out.states.push_back(w);
    }
  } else {
    using State = std::vector<double>;
    const Eigen::Index n = w0.size();
    std::size_t evaluations = 0;
    auto rhs = [&](const State& x, State& dxdt, double) {
      ++evaluations;
      Eigen::Map<RVector>(dxdt.data(), n).noalias() =
          lambda * Eigen::Map<const RVector>(x.data(), n);
    };
    State x(w0.data(), w0.data() + n);
    std::vector<double> tau;
    for (double t : times) tau.push_back(t * units::kNsToRateTime);
    auto stepper = odeint::make_controlled(options.atol, options.rtol,
                                           odeint::runge_kutta_dopri5<State>());
    auto observe = [&](const State& s, double t) {
      out.times_ns.push_back(t / units::kNsToRateTime);
      out.states.emplace_back(Eigen::Map<const RVector>(s.data(), n));
    };
    const double rate = std::max(1.0, lambda.cwiseAbs().rowwise().sum().maxCoeff());
    try {
      if (t_final_ns == 0.0) {
        observe(x, 0.0);
      } else {
        odeint::integrate_times(stepper, rhs, x, tau.begin(), tau.end(), 0.01 / rate, observe,
                                odeint::max_step_checker(options.max_steps));
      }
    } catch (const std::exception& e) {
      throw Error(ErrorCode::Integration, std::string("step control failed after ") +
                                              std::to_string(evaluations) +
                                              " evaluations: " + e.what());
    }
    out.steps = evaluations;
  }
  for (const auto& w : out.states) {
    if (!w.allFinite()) throw Error(ErrorCode::Integration, "state became non-finite");
  }
  out.final_residual = (lambda * out.final_state()).cwiseAbs().maxCoeff();
  return out;
}

RVector steady_state(const RMatrix& lambda, const RVector& w0, const OperatorBasis& basis,
                     const SteadyStateOptions& options) {
  const int n = static_cast<int>(lambda.rows());
  if (lambda.cols() != n || w0.size() != n || basis.size() != n) {
    throw Error(ErrorCode::Shape, "generator, state and basis disagree in size");
  }
  Eigen::FullPivLU<RMatrix> lu(lambda);
  lu.setThreshold(options.rank_tolerance);
  const int kernel = n - static_cast<int>(lu.rank());
  if (kernel != 1) {
    throw Error(ErrorCode::Degeneracy,
                "generator has " + std::to_string(kernel) + " stationary directions");
  }
  const RVector f = population_functional(basis);
  int pivot = -1;
  for (int k = 0; k < n && pivot < 0; ++k) {
    if (f(k) != 0.0) pivot = k;
  }
  // The population rows sum to zero, so one of them can carry the normalisation instead.
  RMatrix a = lambda;
  a.row(pivot) = f.transpose();
  RVector rhs = RVector::Zero(n);
  rhs(pivot) = f.dot(w0);
  return a.partialPivLu().solve(rhs);
}

Complex expectation(const CMatrix& a, const RVector& w, const OperatorBasis& basis) {
  if (w.size() != basis.size()) throw Error(ErrorCode::Shape, "state length does not match basis");
  const CVector c = expand_operator(a, basis);
  return (c.transpose() * w.cast<Complex>())(0);
}

bool is_steady(const Trajectory& trajectory, double relative, double min_time_ns) {
  if (trajectory.times_ns.empty()) return false;
  return trajectory.times_ns.back() >= min_time_ns &&
         trajectory.final_residual <= relative * trajectory.initial_residual;
}

DensityMatrixOracle::DensityMatrixOracle(const CMatrix& h_sys, const CouplingTensors& couplings,
                                         int n_levels, int max_dimension) {
  const JointSpace space(n_levels, couplings.atoms());
  dimension_ = space.dimension();
  if (dimension_ > max_dimension) {
    throw Error(ErrorCode::Capacity, "density-matrix oracle limited to dimension " +
                                         std::to_string(max_dimension) + ", got " +
                                         std::to_string(dimension_));
  }
  if (h_sys.rows() != dimension_ || h_sys.cols() != dimension_) {
    throw Error(ErrorCode::Shape, "H_sys dimension does not match the joint space");
  }
  const int d = dimension_;
  const CMatrix id = CMatrix::Identity(d, d);
  auto kron = [](const CMatrix& a, const CMatrix& b) {
    CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i) {
      for (int j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return k;
  };
  // vec(A X B) = (B^T kron A) vec(X), column-major.
  liouvillian_ = -kI * (kron(id, h_sys) - kron(h_sys.transpose(), id));
  const int nt = couplings.transition_count();
  for (int a = 0; a < couplings.atoms(); ++a) {
    for (int b = 0; b < couplings.atoms(); ++b) {
      for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nt; ++j) {
          if (!couplings.present(a, b, i, j)) continue;
          const double g = couplings.gamma(a, b, i, j);
          if (g == 0.0) continue;
          const auto& ti = couplings.transition(i);
          const auto& tj = couplings.transition(j);
          const CMatrix sa = space.sigma(a, ti.lower, ti.upper);
          const CMatrix sb = space.sigma(b, tj.lower, tj.upper);
          const CMatrix m = sa.adjoint() * sb;
          // gamma (sigma_b rho sigma_a^dag - 1/2 {sigma_a^dag sigma_b, rho})
          liouvillian_ += g * (kron(sa.adjoint().transpose(), sb) -
                               0.5 * (kron(id, m) + kron(m.transpose(), id)));
        }
      }
    }
  }
}

CMatrix DensityMatrixOracle::evolve(const CMatrix& rho0, double t_ns) const {
  const int d = dimension_;
  if (rho0.rows() != d || rho0.cols() != d) throw Error(ErrorCode::Shape, "rho0 has wrong size");
  const CMatrix prop = (liouvillian_ * Complex(t_ns * units::kNsToRateTime)).exp();
  const CVector v = prop * Eigen::Map<const CVector>(rho0.data(), d * d);
  return Eigen::Map<const CMatrix>(v.data(), d, d);
}

CMatrix DensityMatrixOracle::stationary() const {
  const int d = dimension_;
  Eigen::FullPivLU<CMatrix> lu(liouvillian_);
  lu.setThreshold(1e-9);
  const int kernel = d * d - static_cast<int>(lu.rank());
  if (kernel != 1) {
    throw Error(ErrorCode::Degeneracy,
                "Liouvillian has " + std::to_string(kernel) + " stationary directions");
  }
  CMatrix a = liouvillian_;
  // Row 0 is d(rho_00)/dt; the diagonal rows sum to zero, so replace it by the trace.
  a.row(0).setZero();
  for (int k = 0; k < d; ++k) a(0, k * d + k) = 1.0;
  CVector rhs = CVector::Zero(d * d);
  rhs(0) = 1.0;
  const CVector v = a.partialPivLu().solve(rhs);
  CMatrix rho = Eigen::Map<const CMatrix>(v.data(), d, d);
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace cfwm
