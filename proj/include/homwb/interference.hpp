#pragma once

#include <vector>

#include "homwb/envelope.hpp"
#include "homwb/mixture.hpp"
#include "homwb/spectral.hpp"

namespace homwb {

// Integration window applied to the first-detector time coordinate,
// mirroring a hardware gate on one detector.
struct GateWindow {
  double start_ns = 0.0;
  double end_ns = 0.0;

  GateWindow() = default;
  GateWindow(double start, double end);
  double length() const { return end_ns - start_ns; }
};

// Joint density P(t0, tau) of detecting one photon at t0 and the second at
// t0 + tau on the other detector, for two photons entering opposite ports of
// a 50:50 splitter:
//
//   P = 1/4 [ Ia(t0) Ii(t0+tau) + Ia(t0+tau) Ii(t0)
//             - 2 K(tau) A(t0, tau) ]
//
// where K is the spectral coherence factor and A the envelope cross product
// (mixture-averaged when the second photon is an emission mixture). The
// diagonal part is stored separately so the non-interfering reference is the
// same object with the cross term dropped.
class JointDensity {
 public:
  JointDensity(double t_lo_ns, double dt_ns, std::size_t n_t, double tau_lo_ns,
               double dtau_ns, std::size_t n_tau);

  double t_lo() const { return t_lo_ns_; }
  double dt() const { return dt_ns_; }
  std::size_t n_t() const { return n_t_; }
  double tau_lo() const { return tau_lo_ns_; }
  double dtau() const { return dtau_ns_; }
  std::size_t n_tau() const { return n_tau_; }

  double t_at(std::size_t i) const { return t_lo_ns_ + dt_ns_ * static_cast<double>(i); }
  double tau_at(std::size_t j) const { return tau_lo_ns_ + dtau_ns_ * static_cast<double>(j); }

  double value(std::size_t j_tau, std::size_t i_t) const {
    return full_[j_tau * n_t_ + i_t];
  }
  double diagonal(std::size_t j_tau, std::size_t i_t) const {
    return diag_[j_tau * n_t_ + i_t];
  }

  // interpolated lookup by physical coordinates
  double value_at(double t0_ns, double tau_ns) const;

  // total opposite-port probability: integral of P over t0 and tau
  double total_integral() const;

  std::vector<double>& mutable_full() { return full_; }
  std::vector<double>& mutable_diag() { return diag_; }

 private:
  double t_lo_ns_, dt_ns_;
  std::size_t n_t_;
  double tau_lo_ns_, dtau_ns_;
  std::size_t n_tau_;
  std::vector<double> full_;
  std::vector<double> diag_;
};

struct TauGrid {
  double lo_ns = -150.0;
  double hi_ns = 150.0;
  double step_ns = 1.0;
};

enum class CurveNormalization { Raw, UnitPeakNoninterfering };

struct TheoryCurve {
  std::vector<double> tau_ns;
  std::vector<double> value;
  CurveNormalization normalization = CurveNormalization::Raw;
  bool degenerate = false;  // gate missed the density support entirely
};

// How the delayed mixture component interferes with the partner photon.
// TwoCurveSum treats direct and delayed photons as distinguishable cases and
// adds their joint densities; CoherentSuperposition superposes the direct and
// shifted amplitudes for each delay before squaring.
enum class MixtureCoherence { TwoCurveSum, CoherentSuperposition };

// Single-line joint density with a fixed centre-frequency difference.
JointDensity joint_density(const TemporalEnvelope& atom,
                           const TemporalEnvelope& ion, double delta_omega,
                           const TauGrid& grid = {}, int threads = 0);

// Full model: multi-line spectrum, Gaussian drift, delayed-emission mixture.
JointDensity joint_density_full(
    const TemporalEnvelope& atom, const EmissionMixture& ion,
    const SpectralModel& spectrum, const TauGrid& grid = {}, int threads = 0,
    MixtureCoherence coherence = MixtureCoherence::TwoCurveSum);

// Shortest contiguous window containing `area_fraction` of the profile's
// intensity; ties resolved toward the earlier start.
GateWindow gate_window(const TemporalEnvelope& profile, double area_fraction);
GateWindow gate_window_of_profile(const std::vector<double>& intensity,
                                  double t0_ns, double dt_ns,
                                  double area_fraction);

// C(tau) = integral of P(t0, tau) over the gate, trapezoidal rule.
TheoryCurve coincidence_curve(
    const JointDensity& density, const GateWindow& gate,
    CurveNormalization norm = CurveNormalization::Raw);

// Same integration with the cross term dropped.
TheoryCurve noninterfering_curve(
    const JointDensity& density, const GateWindow& gate,
    CurveNormalization norm = CurveNormalization::Raw);
TheoryCurve noninterfering_curve(
    const TemporalEnvelope& atom, const EmissionMixture& ion,
    const GateWindow& gate, const TauGrid& grid = {},
    CurveNormalization norm = CurveNormalization::Raw, int threads = 0);

// Full width at half maximum of the suppression dip C_non - C_int.
double dip_fwhm(const TheoryCurve& interfering, const TheoryCurve& noninterfering);

}  // namespace homwb
