#include "homwb/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "homwb/errors.hpp"
#include "homwb/units.hpp"

namespace homwb {

SpectralModel::SpectralModel() : lines_{{0.0, 1.0}} {}

SpectralModel::SpectralModel(std::vector<SpectralLine> lines,
                             double offset_rad_ns, double drift_sigma_rad_ns)
    : lines_(std::move(lines)),
      offset_rad_ns_(offset_rad_ns),
      drift_sigma_rad_ns_(drift_sigma_rad_ns) {
  if (lines_.empty()) throw ParameterError("spectral model needs >= 1 line");
  if (drift_sigma_rad_ns_ < 0.0)
    throw ParameterError("drift width must be >= 0");
  double total = 0.0;
  for (const auto& l : lines_) {
    if (l.weight < 0.0) throw ParameterError("line weights must be >= 0");
    total += l.weight;
  }
  if (!(total > 0.0)) throw ParameterError("line weights must not all vanish");
  for (auto& l : lines_) l.weight /= total;
}

bool SpectralModel::is_ideal() const {
  return lines_.size() == 1 && lines_[0].detuning_rad_ns == 0.0 &&
         offset_rad_ns_ == 0.0 && drift_sigma_rad_ns_ == 0.0;
}

double SpectralModel::coherence(double tau_ns) const {
  double s = 0.0;
  for (const auto& l : lines_)
    s += l.weight * std::cos((l.detuning_rad_ns + offset_rad_ns_) * tau_ns);
  double st = drift_sigma_rad_ns_ * tau_ns;
  return s * std::exp(-0.5 * st * st);
}

SpectralModel zeeman_lines(double b_field_gauss, double g_upper, double g_lower,
                           const std::vector<ZeemanTransition>& transitions,
                           double offset_rad_ns, double drift_sigma_rad_ns) {
  if (transitions.empty())
    throw ParameterError("zeeman_lines: empty transition list");
  double k = units::mu_b_over_hbar_rad_ns_per_gauss * b_field_gauss;
  std::vector<SpectralLine> raw;
  raw.reserve(transitions.size());
  for (const auto& tr : transitions) {
    if (tr.weight < 0.0)
      throw ParameterError("zeeman_lines: weights must be >= 0");
    raw.push_back({k * (g_lower * tr.m_lower - g_upper * tr.m_upper), tr.weight});
  }

  // merge degenerate lines
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    return a.detuning_rad_ns < b.detuning_rad_ns;
  });
  double scale = std::max(1.0, std::abs(k));
  std::vector<SpectralLine> merged;
  for (const auto& l : raw) {
    if (!merged.empty() &&
        std::abs(l.detuning_rad_ns - merged.back().detuning_rad_ns) <=
            1e-12 * scale) {
      merged.back().weight += l.weight;
    } else {
      merged.push_back(l);
    }
  }
  return SpectralModel(std::move(merged), offset_rad_ns, drift_sigma_rad_ns);
}

SpectralModel barium_zeeman_lines(double b_field_gauss, double offset_rad_ns,
                                  double drift_sigma_rad_ns) {
  // (m_D, m_S) pairs reachable with sigma excitation and sigma emission
  const std::vector<ZeemanTransition> paths = {
      {-1.5, +0.5, 1.0},
      {-0.5, -0.5, 1.0},
      {+0.5, +0.5, 1.0},
      {+1.5, -0.5, 1.0},
  };
  return zeeman_lines(b_field_gauss, barium::g_5d32, barium::g_6s12, paths,
                      offset_rad_ns, drift_sigma_rad_ns);
}

}  // namespace homwb
