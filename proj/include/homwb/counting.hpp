#pragma once

#include <optional>
#include <string>

namespace homwb::counting {

// Per-source statistics entering the closed-form coincidence accounting.
// `rate` is a CW count rate in counts/s, or the per-attempt detection
// probability in pulsed operation; only the ratio r enters the formulas.
struct SourceStats {
  double rate = 0.0;
  double g2_zero = 0.0;
  std::string label;

  SourceStats(double rate_, double g2_zero_, std::string label_ = "");
};

// Mode overlap of the two photons, excluding polarisation.
struct OverlapParam {
  double c = 1.0;
  explicit OverlapParam(double c_);
};

// Probability that one photon in each input port exits through opposite
// output ports of a 50:50 splitter: (1 - c) / 2.
double coincidence_prob_11(const OverlapParam& c);

// Visibility reduction from two-photon emissions:
//   f_mp = [1 + (r g2_atom + r^-1 g2_ion) / 2]^-1,  r = R_atom / R_ion.
double multiphoton_factor(const SourceStats& atom, const SourceStats& ion);

// First-order propagated uncertainty of f_mp from the g2(0) uncertainties.
double multiphoton_factor_sigma(const SourceStats& atom, const SourceStats& ion,
                                double sigma_g2_atom, double sigma_g2_ion);

// Expected zero-delay coincidences normalised to the fully classical level:
//   n(0) = [2(1-c) + r g2_atom + r^-1 g2_ion] / [2 + r + r^-1].
double normalized_coincidence(const OverlapParam& c, const SourceStats& atom,
                              const SourceStats& ion);

// Expected visibility with equal rates in both polarisation settings:
// V = c * f_mp.
double expected_visibility(const OverlapParam& c, const SourceStats& atom,
                           const SourceStats& ion);

// General form allowing different rate ratios in the parallel and
// perpendicular measurements.
double expected_visibility_general(const OverlapParam& c, double g2_atom,
                                   double g2_ion, double r_parallel,
                                   double r_perpendicular);

struct Visibility {
  double value = 0.0;
  double sigma = 0.0;
};

// V = (n_perp(0) - n_par(0)) / n_perp(0). When the raw coincidence counts
// behind the two levels are supplied, Poisson errors are propagated to
// first order.
Visibility measured_visibility(double n_perp_0, double n_par_0,
                               std::optional<double> counts_perp = std::nullopt,
                               std::optional<double> counts_par = std::nullopt);

}  // namespace homwb::counting
