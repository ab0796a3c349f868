#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "cfwm/em_coupling.hpp"
#include "cfwm/operator_basis.hpp"
#include "cfwm/types.hpp"

namespace cfwm {

/// One term gamma * (2 A^dag Q B - {A^dag B, Q}) / 2 of the dissipator, with
/// A = sigma^{atom_a}_{lower_a, upper_a} and B = sigma^{atom_b}_{lower_b, upper_b}.
struct DissipatorTerm {
  double gamma;
  int atom_a, lower_a, upper_a;
  int atom_b, lower_b, upper_b;
};

/// Heisenberg-picture damping built from the collective decay tensor.
class Dissipator {
 public:
  Dissipator(const CouplingTensors& couplings, int n_levels);

  int levels() const { return levels_; }
  int atoms() const { return atoms_; }
  int dimension() const { return dimension_; }
  const std::vector<DissipatorTerm>& terms() const { return terms_; }

  /// sum gamma A^dag B over all terms.
  const CMatrix& decay_operator() const { return decay_; }

  /// L[Q] = 1/2 sum gamma (2 A^dag Q B - {A^dag B, Q}).
  CMatrix apply(const CMatrix& q) const;

  /// sum gamma A^dag Q B, with Q given by its nonzero entries.
  void add_jumps(const std::vector<BasisEntry>& q, CMatrix& out) const;

 private:
  struct Map {
    std::vector<int> target;  // -1 where the operator annihilates
  };
  int levels_;
  int atoms_;
  int dimension_;
  std::vector<DissipatorTerm> terms_;
  std::vector<Map> raise_cols_;  // A^dag |c> -> |target[c]>
  std::vector<Map> lower_rows_;  // <r| B = <target[r]|
  CMatrix decay_;
};

CMatrix apply_dissipator(const CMatrix& q, const CouplingTensors& couplings, int n_levels);

/// Real generator Lambda with dw/dt = Lambda w, w_i = <Q_i>.
struct GeneratorMatrix {
  RMatrix lambda;
  double imaginary_residue = 0.0;  ///< largest |Im| discarded at construction
  std::uint64_t build_hash = 0;
  int levels = 0;
  int atoms = 0;

  int size() const { return static_cast<int>(lambda.rows()); }
};

struct GeneratorOptions {
  double imaginary_tolerance = 1e-8;
};

/// Lambda_ij = Tr[Q_j^dag L_total(Q_i)] / Tr[Q_j^dag Q_j], L_total(Q) = i[H, Q] + L[Q].
/// Throws Error(Construction) when the imaginary residue exceeds the tolerance.
GeneratorMatrix build_generator(const CMatrix& h_sys, const CouplingTensors& couplings,
                                const OperatorBasis& basis, const GeneratorOptions& options = {});

std::uint64_t generator_hash(const CMatrix& h_sys, const CouplingTensors& couplings,
                             const OperatorBasis& basis);

/// Thread-safe memo of generators keyed by generator_hash.
class GeneratorCache {
 public:
  std::shared_ptr<const GeneratorMatrix> get(const CMatrix& h_sys,
                                             const CouplingTensors& couplings,
                                             const OperatorBasis& basis);
  std::size_t size() const;
  std::size_t hits() const;

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::uint64_t, std::shared_ptr<const GeneratorMatrix>> entries_;
  std::size_t hits_ = 0;
};

/// Indicator of the all-projector basis elements; f.w = <1> = total population.
RVector population_functional(const OperatorBasis& basis);

/// w0 for a product state with emitter a in level levels_per_atom[a].
RVector product_initial_state(const OperatorBasis& basis, const std::vector<int>& levels_per_atom);

/// w for a density matrix: w_k = Tr[Q_k rho].
RVector state_from_density(const CMatrix& rho, const OperatorBasis& basis);

/// rho = sum_k w_k Q_k / Tr[Q_k^dag Q_k].
CMatrix density_from_state(const RVector& w, const OperatorBasis& basis);

enum class IntegrationMethod { Adaptive, Exponential };

struct IntegrationOptions {
  IntegrationMethod method = IntegrationMethod::Adaptive;
  double rtol = 1e-9;
  double atol = 1e-12;
  int samples = 0;  ///< extra uniformly spaced output times before t_final
  std::size_t max_steps = 5'000'000;
};

struct Trajectory {
  std::vector<double> times_ns;
  std::vector<RVector> states;
  double initial_residual = 0.0;  ///< ||Lambda w(0)||_inf
  double final_residual = 0.0;    ///< ||Lambda w(t_final)||_inf
  std::size_t steps = 0;

  const RVector& final_state() const { return states.back(); }
};

/// Integrates dw/dt = Lambda w to t_final (ns). Throws Error(Integration) if step control
/// fails or the state becomes non-finite.
Trajectory integrate(const RMatrix& lambda, const RVector& w0, double t_final_ns,
                     const IntegrationOptions& options = {});

struct SteadyStateOptions {
  double rank_tolerance = 1e-9;  ///< relative pivot threshold for the kernel dimension
};

/// Stationary w* with Lambda w* = 0 and the population functional of w0.
/// Throws Error(Degeneracy) when the kernel of Lambda has dimension > 1.
RVector steady_state(const RMatrix& lambda, const RVector& w0, const OperatorBasis& basis,
                     const SteadyStateOptions& options = {});

/// <A> = sum_i Tr[Q_i^dag A] / Tr[Q_i^dag Q_i] w_i.
Complex expectation(const CMatrix& a, const RVector& w, const OperatorBasis& basis);

/// Steady-state criterion: residual below `relative` times the initial residual and
/// t >= min_time_ns.
bool is_steady(const Trajectory& trajectory, double relative = 1e-6, double min_time_ns = 800.0);

/// Independent Schrodinger-picture Lindblad evolution for validation.
class DensityMatrixOracle {
 public:
  /// Throws Error(Capacity) when the joint dimension exceeds `max_dimension`.
  DensityMatrixOracle(const CMatrix& h_sys, const CouplingTensors& couplings, int n_levels,
                      int max_dimension = 64);

  int dimension() const { return dimension_; }
  /// Column-major vectorised Liouvillian.
  const CMatrix& liouvillian() const { return liouvillian_; }

  CMatrix evolve(const CMatrix& rho0, double t_ns) const;
  CMatrix stationary() const;

 private:
  int dimension_;
  CMatrix liouvillian_;
};

}  // namespace cfwm
