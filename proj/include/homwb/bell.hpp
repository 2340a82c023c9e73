#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace homwb::bell {

using cplx = std::complex<double>;

enum class BellState { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

std::string to_string(BellState s);

// One photonic mode at the analyzer output: exit port, polarisation, and a
// distinguishability tag (main mode vs. everything orthogonal to it).
struct PhotonMode {
  uint8_t port = 0;  // 0, 1
  uint8_t pol = 0;   // 0 = H, 1 = V
  uint8_t tag = 0;   // 0 = main, 1 = orthogonal

  bool operator==(const PhotonMode&) const = default;
};

std::string to_string(const PhotonMode& m);

struct BellOutputTerm {
  cplx amplitude;  // amplitude of the normalised two-photon state
  std::array<PhotonMode, 2> photons;
};

// Action of the 50:50 splitter on a photonic Bell state, expanded over the
// normalised two-photon output states. Phi+/- bunch into a single port and
// are indistinguishable to the four-detector arrangement; psi+ bunches with
// opposite polarisations, psi- anti-bunches.
std::vector<BellOutputTerm> beamsplitter_bell_action(BellState state);

// Matter-photon amplitudes of the two sources:
//   (alpha |down>|H> + beta |up>|V>) (x) (gamma |down>|H> + delta |up>|V>)
struct AmplitudeSet {
  cplx alpha, beta, gamma, delta;

  AmplitudeSet(cplx a, cplx b, cplx g, cplx d);
  static AmplitudeSet balanced();
};

// Two-qubit density matrix over {dd, du, ud, uu}, row-major.
class MatterDensityMatrix {
 public:
  explicit MatterDensityMatrix(std::array<cplx, 16> m);

  const std::array<cplx, 16>& data() const { return m_; }
  cplx at(int r, int c) const { return m_[4 * r + c]; }

  double hermiticity_defect() const;       // max |rho - rho^dagger|
  double trace_real() const;
  std::array<double, 4> eigenvalues() const;  // ascending

  // Hermitian within 1e-12, unit trace within 1e-12, eigenvalues >= -1e-10.
  bool is_physical() const;

 private:
  std::array<cplx, 16> m_;
};

// Post-measurement matter state after heralding on psi+ or psi-, for mode
// overlap c. Computed numerically over the explicit two-photon mode basis
// (ports x polarisation x distinguishability tag).
MatterDensityMatrix heralded_state(const AmplitudeSet& amps, double overlap_c,
                                   BellState herald);

// <target| rho |target> for target psi+ or psi-.
double fidelity(const MatterDensityMatrix& rho, BellState target);

struct ImprovementFactor {
  std::string label;
  double factor = 1.0;
};

struct RateScenario {
  double coincidences = 0.0;
  double run_time_s = 0.0;
  double heralding_fraction = 1.0;
  std::vector<ImprovementFactor> improvements;
};

struct RateProjection {
  double current_per_s = 0.0;
  double projected_per_s = 0.0;
};

RateProjection entanglement_rate(const RateScenario& scenario);

}  // namespace homwb::bell
