#pragma once

#include <vector>

#include "homwb/envelope.hpp"
#include "homwb/units.hpp"

namespace homwb {

// Three-level Lambda system: metastable D (initial), excited P, ground S.
// A pulse drives D -> P at `rabi` with detuning `delta`; P decays radiatively
// at total rate `excited_decay_rate` with a fraction `branching_to_ground`
// emitting into S. Decay back to D is treated as population loss, so the
// solution is conditioned on no scatter-back: the emitted envelope is the
// transform-limited first-pass pulse shape. Delayed re-emission after a
// scatter-back is modelled separately (see branching_mixture).
struct LambdaBlochParams {
  double rabi_rad_ns = 0.0;
  double detuning_rad_ns = 0.0;
  double pulse_len_ns = 0.0;
  double branching_to_ground = barium::p12_branching_to_ground;
  double dt_ns = 0.0;
  double excited_decay_rate_inv_ns = barium::p12_decay_rate_inv_ns;
  // integration continues with the drive off for this long, capturing the
  // residual excited-state emission after the pulse
  double tail_ns = -1.0;  // < 0: default 6 excited-state lifetimes
};

struct BlochSolution {
  std::vector<double> t_ns;
  std::vector<double> rho_dd;
  std::vector<double> rho_pp;
  std::vector<double> rho_ss;
  double emission_probability = 0.0;   // Gamma_PS * int rho_pp dt
  double loss_to_metastable = 0.0;     // Gamma_PD * int rho_pp dt
  double survivors = 0.0;              // rho_dd(T) + rho_pp(T)
};

// Fixed-step RK4 integration of the full 3x3 density matrix (9 real ODEs).
// Throws ResolutionError when dt > 1 / (10 * sqrt(rabi^2 + detuning^2)).
BlochSolution solve_lambda_bloch(const LambdaBlochParams& params);

// Emission envelope ~ sqrt(Gamma_PS * rho_pp(t)), normalised.
TemporalEnvelope bloch_emission_profile(
    double rabi_rad_ns, double detuning_rad_ns, double pulse_len_ns,
    double branching_to_ground, double dt_ns,
    double excited_decay_rate_inv_ns = barium::p12_decay_rate_inv_ns);

}  // namespace homwb
