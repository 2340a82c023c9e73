#include "homwb/counting.hpp"

#include <cmath>

#include "homwb/errors.hpp"

// The two input states with total photon number 2 contribute
//   P(1,1 -> 1,1) = (1 - c)/2    and    P(2,0 -> 1,1) = 1/2,
// and with g2(0) ~ 2 P_2x / P^2 (valid at small flux) the zero-delay
// coincidence rate normalised to its classical value becomes n(0) below.
// States with more than two photons are neglected throughout.

namespace homwb::counting {

SourceStats::SourceStats(double rate_, double g2_zero_, std::string label_)
    : rate(rate_), g2_zero(g2_zero_), label(std::move(label_)) {
  if (!(rate > 0.0)) throw ParameterError("source rate must be > 0");
  if (g2_zero < 0.0) throw ParameterError("g2(0) must be >= 0");
}

OverlapParam::OverlapParam(double c_) : c(c_) {
  if (c < 0.0 || c > 1.0) throw ParameterError("overlap c must lie in [0, 1]");
}

double coincidence_prob_11(const OverlapParam& c) { return 0.5 * (1.0 - c.c); }

namespace {
double g2_mix(const SourceStats& atom, const SourceStats& ion) {
  double r = atom.rate / ion.rate;
  return r * atom.g2_zero + ion.g2_zero / r;
}
}  // namespace

double multiphoton_factor(const SourceStats& atom, const SourceStats& ion) {
  return 1.0 / (1.0 + 0.5 * g2_mix(atom, ion));
}

double multiphoton_factor_sigma(const SourceStats& atom, const SourceStats& ion,
                                double sigma_g2_atom, double sigma_g2_ion) {
  double f = multiphoton_factor(atom, ion);
  double r = atom.rate / ion.rate;
  double da = f * f * 0.5 * r * sigma_g2_atom;
  double di = f * f * 0.5 * (1.0 / r) * sigma_g2_ion;
  return std::sqrt(da * da + di * di);
}

double normalized_coincidence(const OverlapParam& c, const SourceStats& atom,
                              const SourceStats& ion) {
  double r = atom.rate / ion.rate;
  return (2.0 * (1.0 - c.c) + g2_mix(atom, ion)) / (2.0 + r + 1.0 / r);
}

double expected_visibility(const OverlapParam& c, const SourceStats& atom,
                           const SourceStats& ion) {
  return c.c * multiphoton_factor(atom, ion);
}

double expected_visibility_general(const OverlapParam& c, double g2_atom,
                                   double g2_ion, double r_parallel,
                                   double r_perpendicular) {
  if (!(r_parallel > 0.0) || !(r_perpendicular > 0.0))
    throw ParameterError("rate ratios must be > 0");
  if (g2_atom < 0.0 || g2_ion < 0.0)
    throw ParameterError("g2(0) must be >= 0");
  double num = (2.0 * (1.0 - c.c) + r_parallel * g2_atom + g2_ion / r_parallel) *
               (2.0 + r_perpendicular + 1.0 / r_perpendicular);
  double den = (2.0 + r_perpendicular * g2_atom + g2_ion / r_perpendicular) *
               (2.0 + r_parallel + 1.0 / r_parallel);
  return 1.0 - num / den;
}

Visibility measured_visibility(double n_perp_0, double n_par_0,
                               std::optional<double> counts_perp,
                               std::optional<double> counts_par) {
  if (!(n_perp_0 > 0.0))
    throw NormalizationError("visibility undefined: n_perp(0) <= 0");
  Visibility v;
  v.value = (n_perp_0 - n_par_0) / n_perp_0;
  if (counts_perp && counts_par) {
    // Poisson errors on the raw counts, scaled to the normalised levels
    double sp = *counts_perp > 0.0 ? n_perp_0 / std::sqrt(*counts_perp) : 0.0;
    double sq = *counts_par > 0.0 ? n_par_0 / std::sqrt(*counts_par) : 0.0;
    double d_dperp = n_par_0 / (n_perp_0 * n_perp_0);
    double d_dpar = 1.0 / n_perp_0;
    v.sigma = std::sqrt(d_dperp * d_dperp * sp * sp + d_dpar * d_dpar * sq * sq);
  }
  return v;
}

}  // namespace homwb::counting
