#pragma once

#include <array>
#include <string>
#include <vector>

#include "cfwm/types.hpp"

namespace cfwm {

enum class Symmetry { Symmetric, Antisymmetric, Mixed };

const char* to_string(Symmetry s);

struct DressedSpectrum {
  RVector energies;  ///< ascending
  CMatrix vectors;   ///< orthonormal columns, largest component real-positive
  std::vector<Symmetry> symmetry;
  std::vector<std::string> labels;  ///< empty until labelled
  std::vector<bool> flagged;

  int size() const { return static_cast<int>(energies.size()); }
  bool labelled() const { return !labels.empty(); }
  /// Index of the state carrying `label`, or -1.
  int find(const std::string& label) const;
};

struct DiagonalizeOptions {
  double hermitian_tolerance = 1e-10;  ///< relative to max |H|
  double commutator_tolerance = 1e-10;
};

/// Eigen-decomposition of a Hermitian H_sys. With a swap operator that commutes with H, the
/// problem is block-diagonalised in the S = +1 / S = -1 subspaces so that every eigenvector
/// has definite exchange symmetry even inside degenerate subspaces. Throws Error(Domain) for
/// non-Hermitian input.
DressedSpectrum diagonalize(const CMatrix& h, const CMatrix* swap = nullptr,
                            const DiagonalizeOptions& options = {});

/// Makes the largest-magnitude component of every column real and positive.
void fix_phases(CMatrix& vectors);

/// Closed-form single-atom dressed states of the diamond at two-photon resonance (delta2 = 0),
/// ordered {a, b, c, d}:
///   e_a = 0, e_b = -d1/3, e_c = (d1 + 3 zeta)/6, e_d = (d1 - 3 zeta)/6,
///   zeta = sqrt(d1^2 + 16 L01^2 + 16 L12^2).
/// The states assume the drive matrix element 2*Lambda.
struct SingleAtomDressed {
  std::array<double, 4> energies{};
  std::array<CVector, 4> states;
  double zeta = 0.0;
};

SingleAtomDressed single_atom_closed_form(double delta1, double lam01, double lam12);

/// Single-emitter reference states used to name collective states at the asymptotic end.
struct SingleStates {
  std::vector<std::string> names;
  RVector energies;
  CMatrix vectors;  ///< columns match `names`
};

/// Diagonalises a single-emitter H and names the states. For the four-level diamond the names
/// are a (the state on |3>), b (no |1> weight), c and d (upper and lower of the remaining two);
/// otherwise s0, s1, ... in ascending energy.
SingleStates name_single_states(const CMatrix& h_single);

/// Product-state combinations |i,j>+- of two emitters (emitter 0 rightmost factor).
struct PairStates {
  std::vector<std::string> labels;
  std::vector<Symmetry> symmetry;
  CMatrix vectors;
};

PairStates pair_states(const SingleStates& single);

/// Assigns asymptotic labels by overlap with `reference`, sector by sector. Degenerate
/// clusters (gap below `degeneracy`) are first rotated onto the span of the reference states
/// they contain.
void assign_labels(DressedSpectrum& spectrum, const PairStates& reference,
                   double degeneracy = 1e-6);

struct TrackingOptions {
  double ambiguity = 1e-3;  ///< flag when the two best overlaps differ by less than this
  bool enforce_sectors = true;
};

/// Carries labels along an ordered sweep. spectra[0] must already be labelled. Each state
/// inherits the label of the previous-step state with the largest overlap in the same sector
/// (one-to-one, resolved greedily by decreasing overlap).
void track_labels(std::vector<DressedSpectrum>& spectra, const TrackingOptions& options = {});

struct Anticrossing {
  std::string lower;
  std::string upper;
  Symmetry symmetry = Symmetry::Mixed;
  double sweep_value = 0.0;
  double gap = 0.0;
};

/// In-sector gap minima between energetically adjacent labelled branches.
std::vector<Anticrossing> find_anticrossings(const std::vector<double>& sweep,
                                             const std::vector<DressedSpectrum>& spectra);

/// Default separation sweep: `points` log-spaced values from `far` down to `near` (nm),
/// ordered from the asymptotic end.
std::vector<double> default_separation_sweep(double near = 60.0, double far = 2000.0,
                                             int points = 200);

}  // namespace cfwm
