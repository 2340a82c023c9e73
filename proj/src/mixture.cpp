#include "homwb/mixture.hpp"

#include <cmath>

#include "homwb/errors.hpp"

namespace homwb {

namespace {

double trapz_weight(std::size_t i, std::size_t n) {
  return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

}  // namespace

double DelayDistribution::mean() const {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    double w = trapz_weight(i, density.size());
    double t = t0_ns + dt_ns * static_cast<double>(i);
    num += w * density[i] * t;
    den += w * density[i];
  }
  return num / den;
}

EmissionMixture::EmissionMixture(TemporalEnvelope direct, double direct_weight,
                                 DelayDistribution delay)
    : direct_(std::move(direct)),
      direct_weight_(direct_weight),
      delay_(std::move(delay)) {
  if (direct_weight_ < 0.0 || direct_weight_ > 1.0)
    throw ParameterError("mixture weights must lie in [0, 1]");
  if (direct_weight_ < 1.0) {
    if (delay_.density.size() < 2 || !(delay_.dt_ns > 0.0))
      throw ParameterError("delay distribution needs a valid grid");
    double total = 0.0;
    for (std::size_t i = 0; i < delay_.density.size(); ++i) {
      if (delay_.density[i] < 0.0)
        throw ParameterError("delay density must be >= 0");
      total += trapz_weight(i, delay_.density.size()) * delay_.density[i];
    }
    total *= delay_.dt_ns;
    if (!(total > 0.0)) throw ParameterError("delay density must not vanish");
    for (double& d : delay_.density) d /= total;
  }
}

EmissionMixture::EmissionMixture(TemporalEnvelope direct)
    : direct_(std::move(direct)), direct_weight_(1.0) {}

EmissionMixture::IntensityProfile EmissionMixture::averaged_intensity() const {
  const double dt = direct_.dt();
  auto direct_in = direct_.intensity_samples();
  if (is_pure_direct()) {
    return {direct_.t0(), dt, std::move(direct_in)};
  }

  // delayed profile: direct intensity convolved with the delay density,
  // both resampled to the direct grid step
  std::size_t nd = static_cast<std::size_t>(
                       std::floor((delay_.dt_ns * static_cast<double>(delay_.density.size() - 1)) / dt)) +
                   1;
  std::vector<double> w(nd);
  for (std::size_t k = 0; k < nd; ++k) {
    double t = delay_.t0_ns + dt * static_cast<double>(k);
    double x = (t - delay_.t0_ns) / delay_.dt_ns;
    auto j = static_cast<std::size_t>(x);
    if (j + 1 < delay_.density.size()) {
      double f = x - static_cast<double>(j);
      w[k] = delay_.density[j] * (1.0 - f) + delay_.density[j + 1] * f;
    } else {
      w[k] = delay_.density.back();
    }
  }
  double wsum = 0.0;
  for (std::size_t k = 0; k < nd; ++k) wsum += trapz_weight(k, nd) * w[k] * dt;
  for (double& v : w) v /= wsum;

  std::size_t n_out = direct_in.size() + nd - 1;
  std::vector<double> out(n_out, 0.0);
  double p = direct_weight_;
  for (std::size_t i = 0; i < direct_in.size(); ++i) out[i] += p * direct_in[i];
  for (std::size_t k = 0; k < nd; ++k) {
    double wk = (1.0 - p) * trapz_weight(k, nd) * w[k] * dt;
    if (wk == 0.0) continue;
    for (std::size_t i = 0; i < direct_in.size(); ++i)
      out[i + k] += wk * direct_in[i];
  }
  return {direct_.t0() + delay_.t0_ns, dt, std::move(out)};
}

double EmissionMixture::mean_arrival_time() const {
  auto prof = averaged_intensity();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < prof.intensity.size(); ++i) {
    double wt = trapz_weight(i, prof.intensity.size());
    double t = prof.t0_ns + prof.dt_ns * static_cast<double>(i);
    num += wt * prof.intensity[i] * t;
    den += wt * prof.intensity[i];
  }
  return num / den;
}

EmissionMixture branching_mixture(const TemporalEnvelope& direct,
                                  double branch_back) {
  if (branch_back < 0.0 || branch_back >= 1.0)
    throw ParameterError("branch_back must lie in [0, 1)");
  if (branch_back == 0.0) return EmissionMixture(direct);
  DelayDistribution delay;
  delay.t0_ns = 0.0;  // delay measured from the would-be direct emission
  delay.dt_ns = direct.dt();
  delay.density = direct.intensity_samples();
  return EmissionMixture(direct, 1.0 - branch_back, std::move(delay));
}

}  // namespace homwb
