#include "homwb/bloch.hpp"

#include <array>
#include <cmath>
#include <complex>

#include "homwb/errors.hpp"

namespace homwb {

namespace {

using Mat3 = std::array<std::complex<double>, 9>;  // row-major 3x3
constexpr int D = 0, P = 1, S = 2;

inline std::complex<double>& at(Mat3& m, int r, int c) { return m[3 * r + c]; }
inline std::complex<double> at(const Mat3& m, int r, int c) {
  return m[3 * r + c];
}

struct Rates {
  double omega, delta, gamma_s, gamma_d;
  bool drive_on;
};

// drho/dt = -i[H, rho] + Gamma_PS D[|S><P|] - (Gamma/2){|P><P|, rho}
// The P->D jump is not re-added: scatter-back leaves the tracked ensemble.
Mat3 rhs(const Mat3& rho, const Rates& k) {
  const std::complex<double> i1(0.0, 1.0);
  Mat3 h{};
  at(h, P, P) = -k.delta;
  if (k.drive_on) {
    at(h, D, P) = 0.5 * k.omega;
    at(h, P, D) = 0.5 * k.omega;
  }

  Mat3 out{};
  // commutator
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      std::complex<double> acc = 0.0;
      for (int m = 0; m < 3; ++m)
        acc += at(h, r, m) * at(rho, m, c) - at(rho, r, m) * at(h, m, c);
      at(out, r, c) = -i1 * acc;
    }
  // total decay out of P
  double gamma = k.gamma_s + k.gamma_d;
  for (int c = 0; c < 3; ++c) {
    at(out, P, c) -= 0.5 * gamma * at(rho, P, c);
    at(out, c, P) -= 0.5 * gamma * at(rho, c, P);
  }
  // radiative feeding of S
  at(out, S, S) += k.gamma_s * at(rho, P, P);
  return out;
}

Mat3 axpy(const Mat3& a, double s, const Mat3& b) {
  Mat3 out;
  for (int i = 0; i < 9; ++i) out[i] = a[i] + s * b[i];
  return out;
}

}  // namespace

BlochSolution solve_lambda_bloch(const LambdaBlochParams& p) {
  if (!(p.rabi_rad_ns > 0.0)) throw ParameterError("rabi frequency must be > 0");
  if (!(p.pulse_len_ns > 0.0)) throw ParameterError("pulse length must be > 0");
  if (!(p.dt_ns > 0.0)) throw ParameterError("step must be > 0");
  if (!(p.branching_to_ground > 0.0) || p.branching_to_ground > 1.0)
    throw ParameterError("branching to ground must be in (0, 1]");
  if (!(p.excited_decay_rate_inv_ns > 0.0))
    throw ParameterError("excited decay rate must be > 0");

  double omega_eff =
      std::sqrt(p.rabi_rad_ns * p.rabi_rad_ns + p.detuning_rad_ns * p.detuning_rad_ns);
  if (p.dt_ns > 1.0 / (10.0 * omega_eff))
    throw ResolutionError("step too coarse: dt must be <= 1/(10 Omega_eff)");

  double tail = p.tail_ns >= 0.0 ? p.tail_ns : 6.0 / p.excited_decay_rate_inv_ns;
  auto n_pulse = static_cast<std::size_t>(std::ceil(p.pulse_len_ns / p.dt_ns));
  auto n_total = n_pulse + static_cast<std::size_t>(std::ceil(tail / p.dt_ns));

  Rates k{p.rabi_rad_ns, p.detuning_rad_ns,
          p.branching_to_ground * p.excited_decay_rate_inv_ns,
          (1.0 - p.branching_to_ground) * p.excited_decay_rate_inv_ns, true};

  Mat3 rho{};
  at(rho, D, D) = 1.0;

  BlochSolution sol;
  sol.t_ns.reserve(n_total + 1);
  sol.rho_dd.reserve(n_total + 1);
  sol.rho_pp.reserve(n_total + 1);
  sol.rho_ss.reserve(n_total + 1);

  auto record = [&](double t) {
    sol.t_ns.push_back(t);
    sol.rho_dd.push_back(at(rho, D, D).real());
    sol.rho_pp.push_back(at(rho, P, P).real());
    sol.rho_ss.push_back(at(rho, S, S).real());
  };
  record(0.0);

  double pp_integral = 0.0;
  for (std::size_t i = 0; i < n_total; ++i) {
    k.drive_on = i < n_pulse;
    double h = p.dt_ns;
    double pp_before = at(rho, P, P).real();
    Mat3 k1 = rhs(rho, k);
    Mat3 k2 = rhs(axpy(rho, 0.5 * h, k1), k);
    Mat3 k3 = rhs(axpy(rho, 0.5 * h, k2), k);
    Mat3 k4 = rhs(axpy(rho, h, k3), k);
    for (int j = 0; j < 9; ++j)
      rho[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    record(p.dt_ns * static_cast<double>(i + 1));
    pp_integral += 0.5 * h * (pp_before + at(rho, P, P).real());
  }

  sol.emission_probability = k.gamma_s * pp_integral;
  sol.loss_to_metastable = k.gamma_d * pp_integral;
  sol.survivors = at(rho, D, D).real() + at(rho, P, P).real();
  return sol;
}

TemporalEnvelope bloch_emission_profile(double rabi_rad_ns,
                                        double detuning_rad_ns,
                                        double pulse_len_ns,
                                        double branching_to_ground,
                                        double dt_ns,
                                        double excited_decay_rate_inv_ns) {
  LambdaBlochParams p;
  p.rabi_rad_ns = rabi_rad_ns;
  p.detuning_rad_ns = detuning_rad_ns;
  p.pulse_len_ns = pulse_len_ns;
  p.branching_to_ground = branching_to_ground;
  p.dt_ns = dt_ns;
  p.excited_decay_rate_inv_ns = excited_decay_rate_inv_ns;
  BlochSolution sol = solve_lambda_bloch(p);

  double gamma_s = branching_to_ground * excited_decay_rate_inv_ns;
  std::vector<double> amp(sol.rho_pp.size());
  for (std::size_t i = 0; i < amp.size(); ++i)
    amp[i] = std::sqrt(std::max(0.0, gamma_s * sol.rho_pp[i]));
  return TemporalEnvelope(0.0, dt_ns, std::move(amp));
}

}  // namespace homwb
