#include "homwb/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "homwb/errors.hpp"

namespace homwb {

namespace {

double trapz(const std::vector<double>& y, double dx) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * dx;
}

void normalize_intensity(std::vector<double>& amp, double dt) {
  std::vector<double> in(amp.size());
  for (std::size_t i = 0; i < amp.size(); ++i) in[i] = amp[i] * amp[i];
  double total = trapz(in, dt);
  if (!(total > 0.0)) throw ParameterError("envelope has zero total intensity");
  double scale = 1.0 / std::sqrt(total);
  for (double& a : amp) a *= scale;
}

}  // namespace

TemporalEnvelope::TemporalEnvelope(double t0_ns, double dt_ns,
                                   std::vector<double> samples)
    : t0_ns_(t0_ns), dt_ns_(dt_ns), samples_(std::move(samples)) {
  if (!(dt_ns_ > 0.0)) throw ParameterError("envelope grid step must be > 0");
  if (samples_.size() < 8)
    throw ParameterError("envelope needs at least 8 samples");
  for (double a : samples_) {
    if (!(a >= 0.0) || !std::isfinite(a))
      throw ParameterError("envelope amplitudes must be finite and >= 0");
  }
  normalize_intensity(samples_, dt_ns_);
}

double TemporalEnvelope::amplitude(double t_ns) const {
  double x = (t_ns - t0_ns_) / dt_ns_;
  if (x < 0.0 || x > static_cast<double>(samples_.size() - 1)) return 0.0;
  auto i = static_cast<std::size_t>(x);
  if (i >= samples_.size() - 1) return samples_.back();
  double f = x - static_cast<double>(i);
  return samples_[i] * (1.0 - f) + samples_[i + 1] * f;
}

std::vector<double> TemporalEnvelope::intensity_samples() const {
  std::vector<double> in(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i)
    in[i] = samples_[i] * samples_[i];
  return in;
}

double TemporalEnvelope::intensity_integral() const {
  return trapz(intensity_samples(), dt_ns_);
}

double TemporalEnvelope::mean_arrival_time() const {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    double w = (i == 0 || i + 1 == samples_.size()) ? 0.5 : 1.0;
    double in = samples_[i] * samples_[i];
    num += w * in * time_at(i);
    den += w * in;
  }
  return num / den;
}

double TemporalEnvelope::intensity_efold_time() const {
  auto in = intensity_samples();
  std::size_t ipk = static_cast<std::size_t>(
      std::max_element(in.begin(), in.end()) - in.begin());
  double peak = in[ipk];
  double hi = peak * std::exp(-1.0);
  double lo = peak * std::exp(-4.0);

  std::size_t i0 = in.size(), i1 = in.size() - 1;
  for (std::size_t j = ipk; j < in.size(); ++j) {
    if (i0 == in.size() && in[j] <= hi) i0 = j;
    if (in[j] <= lo && in[j] > 0.0) {
      i1 = j;
      break;
    }
    if (in[j] <= 0.0) {
      i1 = j == 0 ? 0 : j - 1;
      break;
    }
  }
  if (i0 == in.size() || i1 <= i0 + 2)
    throw DomainError("envelope tail too short to fit a decay time");

  // least-squares slope of ln I(t)
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = i0; j <= i1; ++j) {
    double x = time_at(j);
    double y = std::log(in[j]);
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (!(slope < 0.0)) throw DomainError("envelope tail is not decaying");
  return -1.0 / slope;
}

TemporalEnvelope exponential_envelope(double decay_ns, double rise_ns,
                                      double span_ns, double dt_ns) {
  if (!(decay_ns > 0.0)) throw ParameterError("decay constant must be > 0");
  if (!(dt_ns > 0.0)) throw ParameterError("grid step must be > 0");
  if (rise_ns < 0.0) throw ParameterError("rise time must be >= 0");
  if (span_ns < 6.0 * decay_ns)
    throw ParameterError("span must cover at least 6 decay constants");

  auto n = static_cast<std::size_t>(std::floor(span_ns / dt_ns)) + 1;
  std::vector<double> amp(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = dt_ns * static_cast<double>(i);
    double a = std::exp(-t / (2.0 * decay_ns));
    if (rise_ns > 0.0 && t < rise_ns) a *= t / rise_ns;
    amp[i] = a;
  }
  return TemporalEnvelope(0.0, dt_ns, std::move(amp));
}

TemporalEnvelope rectangular_envelope(double t0_ns, double width_ns,
                                      double dt_ns) {
  if (!(width_ns > 0.0) || !(dt_ns > 0.0))
    throw ParameterError("rectangular envelope needs positive width and step");
  auto n = static_cast<std::size_t>(std::floor(width_ns / dt_ns)) + 1;
  std::vector<double> amp(std::max<std::size_t>(n, 8), 1.0);
  return TemporalEnvelope(t0_ns, dt_ns, std::move(amp));
}

TemporalEnvelope resample(const TemporalEnvelope& env, double dt_ns) {
  if (!(dt_ns > 0.0)) throw ParameterError("grid step must be > 0");
  double span = env.t_end() - env.t0();
  auto n = static_cast<std::size_t>(std::floor(span / dt_ns)) + 1;
  std::vector<double> amp(n);
  for (std::size_t i = 0; i < n; ++i)
    amp[i] = env.amplitude(env.t0() + dt_ns * static_cast<double>(i));
  return TemporalEnvelope(env.t0(), dt_ns, std::move(amp));
}

}  // namespace homwb
