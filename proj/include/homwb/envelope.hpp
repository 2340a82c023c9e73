#pragma once

#include <cstddef>
#include <vector>

namespace homwb {

// Real, nonnegative single-photon amplitude envelope a(t) on a uniform time
// grid. Normalised so the trapezoidal integral of a(t)^2 equals 1; with that
// convention a(t)^2 is the arrival-time probability density in 1/ns. Any
// spectral phase is carried separately by SpectralModel.
class TemporalEnvelope {
 public:
  TemporalEnvelope(double t0_ns, double dt_ns, std::vector<double> samples);

  double t0() const { return t0_ns_; }
  double dt() const { return dt_ns_; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }

  double time_at(std::size_t i) const { return t0_ns_ + dt_ns_ * static_cast<double>(i); }
  double t_end() const { return time_at(samples_.size() - 1); }

  // Linear interpolation, zero outside the grid.
  double amplitude(double t_ns) const;
  double intensity(double t_ns) const {
    double a = amplitude(t_ns);
    return a * a;
  }

  std::vector<double> intensity_samples() const;

  // Trapezoidal integral of a(t)^2 over the grid.
  double intensity_integral() const;

  // First moment of the intensity: mean photon arrival time.
  double mean_arrival_time() const;

  // 1/e decay time of the intensity tail: least-squares slope of ln(a^2)
  // between the first crossings below peak/e and peak/e^4. Exact for
  // exponential profiles; for driven profiles it reads the asymptotic decay,
  // skipping the initial transient.
  double intensity_efold_time() const;

 private:
  double t0_ns_;
  double dt_ns_;
  std::vector<double> samples_;
};

// Decaying-exponential envelope: amplitude ~ exp(-t / (2 decay)) for t >= 0,
// so the intensity 1/e time equals `decay_ns`. A linear ramp over `rise_ns`
// smooths the onset when nonzero. Span must cover >= 6 decay constants.
TemporalEnvelope exponential_envelope(double decay_ns, double rise_ns,
                                      double span_ns, double dt_ns);

// Flat-top envelope on [t0, t0 + width); mostly useful in tests.
TemporalEnvelope rectangular_envelope(double t0_ns, double width_ns, double dt_ns);

// Resamples onto a new grid step by linear interpolation and renormalises.
TemporalEnvelope resample(const TemporalEnvelope& env, double dt_ns);

}  // namespace homwb
