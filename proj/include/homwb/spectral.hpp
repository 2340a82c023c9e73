#pragma once

#include <vector>

namespace homwb {

struct SpectralLine {
  double detuning_rad_ns = 0.0;  // line offset from the mean emission frequency
  double weight = 0.0;           // emission probability of this line
};

// Discrete emission-line set plus a static centre-frequency offset and a
// Gaussian slow-drift width. The single line (0, 1) with zero offset and zero
// drift is the ideal transform-limited case.
class SpectralModel {
 public:
  SpectralModel();  // ideal: one line at 0 with weight 1
  SpectralModel(std::vector<SpectralLine> lines, double offset_rad_ns,
                double drift_sigma_rad_ns);

  const std::vector<SpectralLine>& lines() const { return lines_; }
  double offset() const { return offset_rad_ns_; }
  double drift_sigma() const { return drift_sigma_rad_ns_; }

  bool is_ideal() const;

  // Cross-term reduction factor at inter-detection delay tau:
  //   sum_i c_i cos((dw_i + dw0) tau) * exp(-sigma^2 tau^2 / 2).
  // Equals 1 at tau = 0 for any valid line set.
  double coherence(double tau_ns) const;

 private:
  std::vector<SpectralLine> lines_;
  double offset_rad_ns_ = 0.0;
  double drift_sigma_rad_ns_ = 0.0;
};

struct ZeemanTransition {
  double m_upper = 0.0;
  double m_lower = 0.0;
  double weight = 0.0;
};

// Emission lines of a Zeeman-split manifold pair in a bias field:
//   dw_i = (mu_B B / hbar) (g_lower m_lower - g_upper m_upper),
// with weights normalised to 1 and degenerate lines merged.
SpectralModel zeeman_lines(double b_field_gauss, double g_upper, double g_lower,
                           const std::vector<ZeemanTransition>& transitions,
                           double offset_rad_ns = 0.0,
                           double drift_sigma_rad_ns = 0.0);

// The four equally weighted sigma-excitation/sigma-emission paths from an
// evenly pumped 5D3/2 manifold through 6P1/2 to 6S1/2 in 138Ba+. The photon
// shift is set by the initial and final sublevels; the intermediate level
// drops out of the energy balance.
SpectralModel barium_zeeman_lines(double b_field_gauss,
                                  double offset_rad_ns = 0.0,
                                  double drift_sigma_rad_ns = 0.0);

}  // namespace homwb
