#pragma once

#include <string>
#include <vector>

#include "cfwm/dressed_spectra.hpp"
#include "cfwm/system_model.hpp"

namespace cfwm::testing {

inline DressedSpectrum preset_spectrum(presets::DiamondParameters p) {
  const CMatrix s = swap_operator(4);
  return diagonalize(presets::rb87_diamond(p).h_sys(), &s);
}

/// Spectra along `separations` (first entry the asymptotic end), labelled from single-atom
/// product states and tracked point to point.
inline std::vector<DressedSpectrum> tracked_sweep(const std::vector<double>& separations,
                                                  presets::DiamondParameters p = {}) {
  std::vector<DressedSpectrum> out;
  for (double r : separations) {
    p.separation_nm = r;
    out.push_back(preset_spectrum(p));
  }
  presets::DiamondParameters one = p;
  one.atoms = 1;
  assign_labels(out.front(), pair_states(name_single_states(presets::rb87_diamond(one).h_sys())));
  track_labels(out);
  return out;
}

/// Index of "|x,y>s" or "|y,x>s".
inline int find_pair(const DressedSpectrum& s, char x, char y, char sign) {
  const auto make = [&](char u, char v) {
    return std::string("|") + u + "," + v + ">" + sign;
  };
  const int k = s.find(make(x, y));
  return k >= 0 ? k : s.find(make(y, x));
}

}  // namespace cfwm::testing
