#pragma once

#include "homwb/envelope.hpp"

namespace homwb {

// Probability density over an emission delay, on a uniform grid.
// Integrates to 1 (trapezoidal rule).
struct DelayDistribution {
  double t0_ns = 0.0;
  double dt_ns = 1.0;
  std::vector<double> density;

  double mean() const;
};

// Statistical mixture of a direct (first-pass) photon and a temporally
// displaced copy: with weight `direct_weight` the photon has the direct
// envelope, otherwise the same envelope shifted by a random delay drawn from
// `delay`. The average (incoherent) intensity profile is the direct intensity
// convolved into the delay tail.
class EmissionMixture {
 public:
  EmissionMixture(TemporalEnvelope direct, double direct_weight,
                  DelayDistribution delay);

  // Pure direct photon (weight 1).
  explicit EmissionMixture(TemporalEnvelope direct);

  const TemporalEnvelope& direct() const { return direct_; }
  double direct_weight() const { return direct_weight_; }
  const DelayDistribution& delay() const { return delay_; }
  bool is_pure_direct() const { return direct_weight_ >= 1.0; }

  // Mixture-averaged intensity profile on an extended grid, integral 1.
  struct IntensityProfile {
    double t0_ns;
    double dt_ns;
    std::vector<double> intensity;
  };
  IntensityProfile averaged_intensity() const;

  double mean_arrival_time() const;

 private:
  TemporalEnvelope direct_;
  double direct_weight_;
  DelayDistribution delay_;
};

// Mixture for an emitter that scatters back to the initial manifold with
// probability `branch_back` before emitting. The delay distribution is the
// waiting-time density of the first emission attempt, i.e. the normalised
// direct intensity profile. Higher-order re-scattering is ignored, so the
// weights are (1 - branch_back, branch_back).
EmissionMixture branching_mixture(const TemporalEnvelope& direct,
                                  double branch_back);

}  // namespace homwb
