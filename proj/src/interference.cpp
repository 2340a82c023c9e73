#include "homwb/interference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "homwb/errors.hpp"
#include "homwb/threading.hpp"

namespace homwb {

namespace {

// Piecewise-linear integral of uniformly sampled values over [a, b],
// clamped to the grid span.
double integrate_sampled(const double* y, std::size_t n, double t_lo, double dt,
                         double a, double b) {
  double t_hi = t_lo + dt * static_cast<double>(n - 1);
  a = std::max(a, t_lo);
  b = std::min(b, t_hi);
  if (!(b > a)) return 0.0;

  auto value_at = [&](double t) {
    double x = (t - t_lo) / dt;
    auto i = static_cast<std::size_t>(x);
    if (i >= n - 1) return y[n - 1];
    double f = x - static_cast<double>(i);
    return y[i] * (1.0 - f) + y[i + 1] * f;
  };

  auto ia = static_cast<std::size_t>(std::ceil((a - t_lo) / dt - 1e-12));
  auto ib = static_cast<std::size_t>(std::floor((b - t_lo) / dt + 1e-12));
  double ta = t_lo + dt * static_cast<double>(ia);
  double tb = t_lo + dt * static_cast<double>(ib);

  if (ia > ib) {  // both endpoints inside one cell
    return 0.5 * (value_at(a) + value_at(b)) * (b - a);
  }
  double total = 0.0;
  if (a < ta) total += 0.5 * (value_at(a) + y[ia]) * (ta - a);
  for (std::size_t i = ia; i < ib; ++i) total += 0.5 * (y[i] + y[i + 1]) * dt;
  if (b > tb) total += 0.5 * (y[ib] + value_at(b)) * (b - tb);
  return total;
}

struct SampledAmp {
  std::vector<double> a;

  // amplitude at node i shifted by `off` grid units (off may be fractional)
  double shifted(std::size_t i, long k, double frac) const {
    auto n = static_cast<long>(a.size());
    long j = static_cast<long>(i) + k;
    if (j < 0 || j >= n) return 0.0;
    if (frac == 0.0) return a[j];
    double lo = a[j];
    double hi = (j + 1 < n) ? a[j + 1] : 0.0;
    return lo * (1.0 - frac) + hi * frac;
  }
};

struct DensityInputs {
  double t_lo, dt;
  std::size_t n_t;
  SampledAmp atom;
  SampledAmp ion;                 // direct-component amplitude
  double p_direct = 1.0;
  std::vector<double> delay_w;    // trapezoid-weighted delay masses, sum 1
  std::vector<double> ion_mix_in; // mixture-averaged ion intensity at nodes
};

DensityInputs build_inputs(const TemporalEnvelope& atom_in,
                           const EmissionMixture& ion_mix) {
  const TemporalEnvelope& ion_in = ion_mix.direct();
  double dt = std::min(atom_in.dt(), ion_in.dt());
  TemporalEnvelope atom =
      atom_in.dt() == dt ? atom_in : resample(atom_in, dt);
  TemporalEnvelope ion = ion_in.dt() == dt ? ion_in : resample(ion_in, dt);

  double delay_span = 0.0;
  if (!ion_mix.is_pure_direct()) {
    const auto& d = ion_mix.delay();
    delay_span = d.t0_ns + d.dt_ns * static_cast<double>(d.density.size() - 1);
  }
  double lo = std::min(atom.t0(), ion.t0());
  double hi = std::max(atom.t_end(), ion.t_end() + delay_span);
  if (std::min(atom.t_end(), ion.t_end() + delay_span) <=
      std::max(atom.t0(), ion.t0()))
    throw DomainError("envelope spans do not overlap");

  DensityInputs in;
  in.t_lo = lo;
  in.dt = dt;
  in.n_t = static_cast<std::size_t>(std::ceil((hi - lo) / dt)) + 1;
  in.atom.a.resize(in.n_t);
  in.ion.a.resize(in.n_t);
  for (std::size_t i = 0; i < in.n_t; ++i) {
    double t = lo + dt * static_cast<double>(i);
    in.atom.a[i] = atom.amplitude(t);
    in.ion.a[i] = ion.amplitude(t);
  }

  in.p_direct = ion_mix.direct_weight();
  if (!ion_mix.is_pure_direct()) {
    // delay masses on the common grid step
    const auto& d = ion_mix.delay();
    double span = d.dt_ns * static_cast<double>(d.density.size() - 1);
    auto nd = static_cast<std::size_t>(std::floor(span / dt)) + 1;
    std::vector<double> w(nd);
    for (std::size_t k = 0; k < nd; ++k) {
      double td = d.t0_ns + dt * static_cast<double>(k);
      double x = (td - d.t0_ns) / d.dt_ns;
      auto j = static_cast<std::size_t>(x);
      if (j + 1 < d.density.size()) {
        double f = x - static_cast<double>(j);
        w[k] = d.density[j] * (1.0 - f) + d.density[j + 1] * f;
      } else {
        w[k] = d.density.back();
      }
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < nd; ++k) {
      double tw = (k == 0 || k + 1 == nd) ? 0.5 : 1.0;
      w[k] *= tw * dt;
      sum += w[k];
    }
    for (double& v : w) v /= sum;
    in.delay_w = std::move(w);
  }

  // mixture-averaged ion intensity, accumulated in the same order as the
  // per-row cross sums so the tau = 0 cross term cancels exactly
  in.ion_mix_in.assign(in.n_t, 0.0);
  for (std::size_t i = 0; i < in.n_t; ++i) {
    double direct_sq = in.ion.a[i] * in.ion.a[i];
    double acc = in.p_direct * direct_sq;
    for (std::size_t k = 0; k < in.delay_w.size(); ++k) {
      double shifted = in.ion.shifted(i, -static_cast<long>(k), 0.0);
      acc += (1.0 - in.p_direct) * in.delay_w[k] * (shifted * shifted);
    }
    in.ion_mix_in[i] = acc;
  }
  return in;
}

JointDensity compute_density(const DensityInputs& in,
                             const SpectralModel& spectrum, const TauGrid& grid,
                             int threads, MixtureCoherence coherence) {
  if (!(grid.step_ns > 0.0) || !(grid.hi_ns > grid.lo_ns))
    throw ParameterError("invalid tau grid");
  auto n_tau = static_cast<std::size_t>(
                   std::llround((grid.hi_ns - grid.lo_ns) / grid.step_ns)) +
               1;

  JointDensity dens(in.t_lo, in.dt, in.n_t, grid.lo_ns, grid.step_ns, n_tau);
  auto& full = dens.mutable_full();
  auto& diag = dens.mutable_diag();
  const std::size_t n_t = in.n_t;
  const double p = in.p_direct;
  const bool pure = in.delay_w.empty();

  parallel_for(n_tau, threads, [&](std::size_t j) {
    double tau = grid.lo_ns + grid.step_ns * static_cast<double>(j);
    double coh = spectrum.coherence(tau);
    double off = tau / in.dt;
    double kf = std::floor(off);
    long k = static_cast<long>(kf);
    double frac = off - kf;

    double* frow = full.data() + j * n_t;
    double* drow = diag.data() + j * n_t;
    for (std::size_t i = 0; i < n_t; ++i) {
      double aa0 = in.atom.a[i];
      double aas = in.atom.shifted(i, k, frac);
      double ai0 = in.ion.a[i];
      double ais = in.ion.shifted(i, k, frac);

      double d_term, cross_env;
      if (pure) {
        d_term = (aa0 * aa0) * (ais * ais) + (aas * aas) * (ai0 * ai0);
        cross_env = (aa0 * aas) * (ai0 * ais);
      } else {
        // mixture-averaged intensity on the shifted coordinate
        double mix_s;
        {
          long jj = static_cast<long>(i) + k;
          auto n = static_cast<long>(n_t);
          if (jj < 0 || jj >= n) {
            mix_s = 0.0;
          } else if (frac == 0.0) {
            mix_s = in.ion_mix_in[jj];
          } else {
            double lo = in.ion_mix_in[jj];
            double hi = (jj + 1 < n) ? in.ion_mix_in[jj + 1] : 0.0;
            mix_s = lo * (1.0 - frac) + hi * frac;
          }
        }
        d_term = (aa0 * aa0) * mix_s + (aas * aas) * in.ion_mix_in[i];

        if (coherence == MixtureCoherence::TwoCurveSum) {
          // delayed photons interfere with the atom photon through their
          // shifted envelopes; direct and delayed cases add incoherently
          double g = p * (ai0 * ais);
          for (std::size_t m = 0; m < in.delay_w.size(); ++m) {
            long dk = -static_cast<long>(m);
            double a1 = in.ion.shifted(i, dk, 0.0);
            double a2 = in.ion.shifted(i, dk + k, frac);
            g += (1.0 - p) * in.delay_w[m] * (a1 * a2);
          }
          cross_env = (aa0 * aas) * g;
        } else {
          // coherent superposition of direct and delayed amplitudes per delay
          double sq = std::sqrt(p);
          double sqd = std::sqrt(1.0 - p);
          double g = 0.0;
          double dsum = 0.0, dsum_s = 0.0;
          for (std::size_t m = 0; m < in.delay_w.size(); ++m) {
            long dk = -static_cast<long>(m);
            double a1 = sq * ai0 + sqd * in.ion.shifted(i, dk, 0.0);
            double a2 = sq * ais + sqd * in.ion.shifted(i, dk + k, frac);
            g += in.delay_w[m] * (a1 * a2);
            double b1 = sq * ai0 + sqd * in.ion.shifted(i, dk, 0.0);
            dsum += in.delay_w[m] * b1 * b1;
            double b2 = sq * ais + sqd * in.ion.shifted(i, dk + k, frac);
            dsum_s += in.delay_w[m] * b2 * b2;
          }
          cross_env = (aa0 * aas) * g;
          d_term = (aa0 * aa0) * dsum_s + (aas * aas) * dsum;
        }
      }

      drow[i] = 0.25 * d_term;
      frow[i] = 0.25 * (d_term - 2.0 * coh * cross_env);
    }
  });
  return dens;
}

}  // namespace

GateWindow::GateWindow(double start, double end)
    : start_ns(start), end_ns(end) {
  if (!(end_ns > start_ns)) throw ParameterError("gate window must have end > start");
}

JointDensity::JointDensity(double t_lo_ns, double dt_ns, std::size_t n_t,
                           double tau_lo_ns, double dtau_ns, std::size_t n_tau)
    : t_lo_ns_(t_lo_ns),
      dt_ns_(dt_ns),
      n_t_(n_t),
      tau_lo_ns_(tau_lo_ns),
      dtau_ns_(dtau_ns),
      n_tau_(n_tau),
      full_(n_t * n_tau, 0.0),
      diag_(n_t * n_tau, 0.0) {}

double JointDensity::value_at(double t0_ns, double tau_ns) const {
  double x = (t0_ns - t_lo_ns_) / dt_ns_;
  double y = (tau_ns - tau_lo_ns_) / dtau_ns_;
  if (x < 0 || y < 0 || x > static_cast<double>(n_t_ - 1) ||
      y > static_cast<double>(n_tau_ - 1))
    return 0.0;
  auto i = std::min(static_cast<std::size_t>(x), n_t_ - 2);
  auto j = std::min(static_cast<std::size_t>(y), n_tau_ - 2);
  double fx = x - static_cast<double>(i);
  double fy = y - static_cast<double>(j);
  double v00 = value(j, i), v01 = value(j, i + 1);
  double v10 = value(j + 1, i), v11 = value(j + 1, i + 1);
  return (1 - fy) * ((1 - fx) * v00 + fx * v01) +
         fy * ((1 - fx) * v10 + fx * v11);
}

double JointDensity::total_integral() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < n_tau_; ++j) {
    double wj = (j == 0 || j + 1 == n_tau_) ? 0.5 : 1.0;
    double row = 0.0;
    const double* r = full_.data() + j * n_t_;
    for (std::size_t i = 0; i < n_t_; ++i) {
      double wi = (i == 0 || i + 1 == n_t_) ? 0.5 : 1.0;
      row += wi * r[i];
    }
    acc += wj * row;
  }
  return acc * dt_ns_ * dtau_ns_;
}

JointDensity joint_density(const TemporalEnvelope& atom,
                           const TemporalEnvelope& ion, double delta_omega,
                           const TauGrid& grid, int threads) {
  SpectralModel single({{0.0, 1.0}}, delta_omega, 0.0);
  auto in = build_inputs(atom, EmissionMixture(ion));
  return compute_density(in, single, grid, threads,
                         MixtureCoherence::TwoCurveSum);
}

JointDensity joint_density_full(const TemporalEnvelope& atom,
                                const EmissionMixture& ion,
                                const SpectralModel& spectrum,
                                const TauGrid& grid, int threads,
                                MixtureCoherence coherence) {
  auto in = build_inputs(atom, ion);
  return compute_density(in, spectrum, grid, threads, coherence);
}

GateWindow gate_window_of_profile(const std::vector<double>& intensity,
                                  double t0_ns, double dt_ns,
                                  double area_fraction) {
  if (!(area_fraction > 0.0) || !(area_fraction < 1.0))
    throw ParameterError("area fraction must lie in (0, 1)");
  std::size_t n = intensity.size();
  if (n < 2) throw ParameterError("profile too short");

  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    cum[i] = cum[i - 1] + 0.5 * (intensity[i - 1] + intensity[i]) * dt_ns;
  double target = area_fraction * cum.back();
  if (!(cum.back() > 0.0)) throw ParameterError("profile has no area");

  double best_len = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0, best_j = n - 1;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < i) j = i;
    while (j < n && cum[j] - cum[i] < target) ++j;
    if (j >= n) break;
    double len = dt_ns * static_cast<double>(j - i);
    if (len < best_len - 1e-12) {
      best_len = len;
      best_i = i;
      best_j = j;
    }
  }
  if (!std::isfinite(best_len))
    throw ParameterError("no window reaches the requested area fraction");
  return GateWindow(t0_ns + dt_ns * static_cast<double>(best_i),
                    t0_ns + dt_ns * static_cast<double>(best_j));
}

GateWindow gate_window(const TemporalEnvelope& profile, double area_fraction) {
  return gate_window_of_profile(profile.intensity_samples(), profile.t0(),
                                profile.dt(), area_fraction);
}

namespace {

TheoryCurve integrate_layer(const JointDensity& d, const GateWindow& gate,
                            bool diagonal, CurveNormalization norm) {
  TheoryCurve curve;
  curve.tau_ns.resize(d.n_tau());
  curve.value.resize(d.n_tau());
  double t_hi = d.t_at(d.n_t() - 1);
  if (gate.end_ns <= d.t_lo() || gate.start_ns >= t_hi) {
    for (std::size_t j = 0; j < d.n_tau(); ++j) curve.tau_ns[j] = d.tau_at(j);
    curve.degenerate = true;
    curve.normalization = norm;
    return curve;
  }

  std::vector<double> row(d.n_t());
  double non_peak = 0.0;
  std::vector<double> non_values;
  if (norm == CurveNormalization::UnitPeakNoninterfering)
    non_values.resize(d.n_tau());
  for (std::size_t j = 0; j < d.n_tau(); ++j) {
    curve.tau_ns[j] = d.tau_at(j);
    for (std::size_t i = 0; i < d.n_t(); ++i)
      row[i] = diagonal ? d.diagonal(j, i) : d.value(j, i);
    curve.value[j] = integrate_sampled(row.data(), d.n_t(), d.t_lo(), d.dt(),
                                       gate.start_ns, gate.end_ns);
    if (norm == CurveNormalization::UnitPeakNoninterfering) {
      for (std::size_t i = 0; i < d.n_t(); ++i) row[i] = d.diagonal(j, i);
      non_values[j] = integrate_sampled(row.data(), d.n_t(), d.t_lo(), d.dt(),
                                        gate.start_ns, gate.end_ns);
      non_peak = std::max(non_peak, non_values[j]);
    }
  }
  if (norm == CurveNormalization::UnitPeakNoninterfering) {
    if (!(non_peak > 0.0))
      throw NormalizationError("non-interfering reference peak is zero");
    for (double& v : curve.value) v /= non_peak;
  }
  curve.normalization = norm;
  return curve;
}

}  // namespace

TheoryCurve coincidence_curve(const JointDensity& density,
                              const GateWindow& gate, CurveNormalization norm) {
  return integrate_layer(density, gate, false, norm);
}

TheoryCurve noninterfering_curve(const JointDensity& density,
                                 const GateWindow& gate,
                                 CurveNormalization norm) {
  return integrate_layer(density, gate, true, norm);
}

TheoryCurve noninterfering_curve(const TemporalEnvelope& atom,
                                 const EmissionMixture& ion,
                                 const GateWindow& gate, const TauGrid& grid,
                                 CurveNormalization norm, int threads) {
  auto in = build_inputs(atom, ion);
  SpectralModel ideal;
  JointDensity d = compute_density(in, ideal, grid, threads,
                                   MixtureCoherence::TwoCurveSum);
  return integrate_layer(d, gate, true, norm);
}

double dip_fwhm(const TheoryCurve& interfering,
                const TheoryCurve& noninterfering) {
  if (interfering.tau_ns.size() != noninterfering.tau_ns.size())
    throw DomainError("curves must share a tau grid");
  std::size_t n = interfering.tau_ns.size();
  std::vector<double> dip(n);
  for (std::size_t i = 0; i < n; ++i)
    dip[i] = noninterfering.value[i] - interfering.value[i];
  auto imax = static_cast<std::size_t>(
      std::max_element(dip.begin(), dip.end()) - dip.begin());
  double half = dip[imax] / 2.0;
  if (!(half > 0.0)) throw DomainError("no suppression dip present");

  const auto& tau = interfering.tau_ns;
  double lo = tau.front(), hi = tau.back();
  for (std::size_t i = imax; i-- > 0;) {
    if (dip[i] < half) {
      double f = (half - dip[i]) / (dip[i + 1] - dip[i]);
      lo = tau[i] + f * (tau[i + 1] - tau[i]);
      break;
    }
  }
  for (std::size_t i = imax; i + 1 < n; ++i) {
    if (dip[i + 1] < half) {
      double f = (dip[i] - half) / (dip[i] - dip[i + 1]);
      hi = tau[i] + f * (tau[i + 1] - tau[i]);
      break;
    }
  }
  return hi - lo;
}

}  // namespace homwb
