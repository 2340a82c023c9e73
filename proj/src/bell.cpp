#include "homwb/bell.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "homwb/errors.hpp"

namespace homwb::bell {

namespace {

constexpr int kNumModes = 8;  // port * 4 + pol * 2 + tag

int mode_key(int port, int pol, int tag) { return port * 4 + pol * 2 + tag; }
PhotonMode mode_of(int key) {
  return PhotonMode{static_cast<uint8_t>(key / 4),
                    static_cast<uint8_t>((key / 2) % 2),
                    static_cast<uint8_t>(key % 2)};
}

// degree-1 polynomial in creation operators
using Single = std::array<cplx, kNumModes>;
// degree-2: coefficient of a_k^dag a_l^dag with k <= l
using Pair = std::map<std::pair<int, int>, cplx>;

const cplx kI(0.0, 1.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// in-port operators onto out-port operators of the 50:50 splitter:
//   a (port 0) -> (x + i y)/sqrt(2),  b (port 1) -> (i x + y)/sqrt(2)
Single splitter(const Single& in) {
  Single out{};
  for (int key = 0; key < kNumModes; ++key) {
    cplx c = in[key];
    if (c == cplx(0.0, 0.0)) continue;
    auto m = mode_of(key);
    int k0 = mode_key(0, m.pol, m.tag);
    int k1 = mode_key(1, m.pol, m.tag);
    if (m.port == 0) {
      out[k0] += c * kInvSqrt2;
      out[k1] += c * kI * kInvSqrt2;
    } else {
      out[k0] += c * kI * kInvSqrt2;
      out[k1] += c * kInvSqrt2;
    }
  }
  return out;
}

Pair multiply(const Single& p, const Single& q) {
  Pair out;
  for (int k = 0; k < kNumModes; ++k) {
    if (p[k] == cplx(0.0, 0.0)) continue;
    for (int l = 0; l < kNumModes; ++l) {
      if (q[l] == cplx(0.0, 0.0)) continue;
      auto key = std::minmax(k, l);
      out[{key.first, key.second}] += p[k] * q[l];
    }
  }
  return out;
}

// <0| a_l a_k a_k^dag a_l^dag |0> for the monomial (k, l)
double monomial_norm_sq(const std::pair<int, int>& key) {
  return key.first == key.second ? 2.0 : 1.0;
}

bool herald_accepts(BellState herald, const std::pair<int, int>& key) {
  auto m1 = mode_of(key.first);
  auto m2 = mode_of(key.second);
  if (m1.pol == m2.pol) return false;  // need one H-type and one V-type
  bool same_port = m1.port == m2.port;
  if (herald == BellState::PsiPlus) return same_port;
  if (herald == BellState::PsiMinus) return !same_port;
  throw ParameterError("herald must be psi+ or psi-");
}

}  // namespace

std::string to_string(BellState s) {
  switch (s) {
    case BellState::PhiPlus: return "phi+";
    case BellState::PhiMinus: return "phi-";
    case BellState::PsiPlus: return "psi+";
    case BellState::PsiMinus: return "psi-";
  }
  return "?";
}

std::string to_string(const PhotonMode& m) {
  std::string s;
  s += m.pol == 0 ? 'H' : 'V';
  if (m.tag == 1) s += 'n';
  s += "@port";
  s += static_cast<char>('0' + m.port);
  return s;
}

std::vector<BellOutputTerm> beamsplitter_bell_action(BellState state) {
  Single a_h{}, a_v{}, b_h{}, b_v{};
  a_h[mode_key(0, 0, 0)] = 1.0;
  a_v[mode_key(0, 1, 0)] = 1.0;
  b_h[mode_key(1, 0, 0)] = 1.0;
  b_v[mode_key(1, 1, 0)] = 1.0;

  auto x_ah = splitter(a_h), x_av = splitter(a_v);
  auto x_bh = splitter(b_h), x_bv = splitter(b_v);

  Pair poly;
  auto add = [&](const Pair& p, double sign) {
    for (const auto& [key, c] : p) poly[key] += sign * kInvSqrt2 * c;
  };
  switch (state) {
    case BellState::PhiPlus:
      add(multiply(x_ah, x_bh), 1.0);
      add(multiply(x_av, x_bv), 1.0);
      break;
    case BellState::PhiMinus:
      add(multiply(x_ah, x_bh), 1.0);
      add(multiply(x_av, x_bv), -1.0);
      break;
    case BellState::PsiPlus:
      add(multiply(x_ah, x_bv), 1.0);
      add(multiply(x_av, x_bh), 1.0);
      break;
    case BellState::PsiMinus:
      add(multiply(x_ah, x_bv), 1.0);
      add(multiply(x_av, x_bh), -1.0);
      break;
  }

  std::vector<BellOutputTerm> terms;
  for (const auto& [key, c] : poly) {
    if (std::abs(c) < 1e-15) continue;
    // amplitude of the normalised state = coefficient * sqrt(norm^2)
    cplx amp = c * std::sqrt(monomial_norm_sq(key));
    terms.push_back({amp, {mode_of(key.first), mode_of(key.second)}});
  }
  return terms;
}

AmplitudeSet::AmplitudeSet(cplx a, cplx b, cplx g, cplx d)
    : alpha(a), beta(b), gamma(g), delta(d) {
  double n1 = std::norm(alpha) + std::norm(beta);
  double n2 = std::norm(gamma) + std::norm(delta);
  if (std::abs(n1 - 1.0) > 1e-12 || std::abs(n2 - 1.0) > 1e-12)
    throw ParameterError("amplitude pairs must each be normalised");
}

AmplitudeSet AmplitudeSet::balanced() {
  double v = 1.0 / std::sqrt(2.0);
  return AmplitudeSet(v, v, v, v);
}

MatterDensityMatrix::MatterDensityMatrix(std::array<cplx, 16> m) : m_(m) {}

double MatterDensityMatrix::hermiticity_defect() const {
  double worst = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      worst = std::max(worst, std::abs(at(r, c) - std::conj(at(c, r))));
  return worst;
}

double MatterDensityMatrix::trace_real() const {
  double t = 0.0;
  for (int r = 0; r < 4; ++r) t += at(r, r).real();
  return t;
}

std::array<double, 4> MatterDensityMatrix::eigenvalues() const {
  // cyclic Jacobi on the Hermitian matrix
  std::array<cplx, 16> a = m_;
  auto idx = [](int r, int c) { return 4 * r + c; };
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) off += std::norm(a[idx(p, q)]);
    if (off < 1e-30) break;
    for (int p = 0; p < 4; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        cplx apq = a[idx(p, q)];
        if (std::abs(apq) < 1e-18) continue;
        double app = a[idx(p, p)].real();
        double aqq = a[idx(q, q)].real();
        // unitary 2x2 rotation that zeroes a_pq
        double theta = 0.5 * std::atan2(2.0 * std::abs(apq), aqq - app);
        cplx phase = apq / std::abs(apq);
        double cth = std::cos(theta), sth = std::sin(theta);
        // columns
        for (int r = 0; r < 4; ++r) {
          cplx arp = a[idx(r, p)], arq = a[idx(r, q)];
          a[idx(r, p)] = cth * arp - sth * std::conj(phase) * arq;
          a[idx(r, q)] = sth * phase * arp + cth * arq;
        }
        // rows
        for (int c = 0; c < 4; ++c) {
          cplx apc = a[idx(p, c)], aqc = a[idx(q, c)];
          a[idx(p, c)] = cth * apc - sth * phase * aqc;
          a[idx(q, c)] = sth * std::conj(phase) * apc + cth * aqc;
        }
      }
    }
  }
  std::array<double, 4> ev{a[0].real(), a[5].real(), a[10].real(), a[15].real()};
  std::sort(ev.begin(), ev.end());
  return ev;
}

bool MatterDensityMatrix::is_physical() const {
  if (hermiticity_defect() >= 1e-12) return false;
  if (std::abs(trace_real() - 1.0) >= 1e-12) return false;
  return eigenvalues()[0] >= -1e-10;
}

MatterDensityMatrix heralded_state(const AmplitudeSet& amps, double overlap_c,
                                   BellState herald) {
  if (overlap_c < 0.0 || overlap_c > 1.0)
    throw ParameterError("overlap c must lie in [0, 1]");
  if (herald != BellState::PsiPlus && herald != BellState::PsiMinus)
    throw ParameterError("herald must be psi+ or psi-");

  double sc = std::sqrt(overlap_c);
  double sn = std::sqrt(1.0 - overlap_c);

  // photon 1 (port 0) carries the main/orthogonal split
  std::array<Single, 2> photon1{};  // matter of source 1: 0 = down, 1 = up
  photon1[0][mode_key(0, 0, 0)] = amps.alpha * sc;
  photon1[0][mode_key(0, 0, 1)] = amps.alpha * sn;
  photon1[1][mode_key(0, 1, 0)] = amps.beta * sc;
  photon1[1][mode_key(0, 1, 1)] = amps.beta * sn;
  std::array<Single, 2> photon2{};
  photon2[0][mode_key(1, 0, 0)] = amps.gamma;
  photon2[1][mode_key(1, 1, 0)] = amps.delta;

  // matter basis index m = 2 * m1 + m2 over {dd, du, ud, uu}
  std::array<Pair, 4> out_polys;
  for (int m1 = 0; m1 < 2; ++m1)
    for (int m2 = 0; m2 < 2; ++m2)
      out_polys[2 * m1 + m2] =
          multiply(splitter(photon1[m1]), splitter(photon2[m2]));

  std::array<cplx, 16> rho{};
  // collect the herald-accepted monomials across all matter components
  std::map<std::pair<int, int>, std::array<cplx, 4>> herald_coeffs;
  for (int m = 0; m < 4; ++m) {
    for (const auto& [key, c] : out_polys[m]) {
      if (!herald_accepts(herald, key)) continue;
      herald_coeffs[key][m] = c;
    }
  }
  for (const auto& [key, coeffs] : herald_coeffs) {
    double mult = monomial_norm_sq(key);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        rho[4 * r + c] += mult * coeffs[r] * std::conj(coeffs[c]);
  }

  double trace = 0.0;
  for (int r = 0; r < 4; ++r) trace += rho[4 * r + r].real();
  if (!(trace > 1e-15))
    throw ParameterError("degenerate herald: no amplitude reaches psi+-");
  for (auto& v : rho) v /= trace;
  return MatterDensityMatrix(rho);
}

double fidelity(const MatterDensityMatrix& rho, BellState target) {
  if (target != BellState::PsiPlus && target != BellState::PsiMinus)
    throw ParameterError("fidelity target must be psi+ or psi-");
  double sign = target == BellState::PsiPlus ? 1.0 : -1.0;
  // |psi+-> = (|du> +- |ud>)/sqrt(2): components at indices 1 and 2
  cplx f = 0.5 * (rho.at(1, 1) + rho.at(2, 2) + sign * rho.at(1, 2) +
                  sign * rho.at(2, 1));
  return f.real();
}

RateProjection entanglement_rate(const RateScenario& scenario) {
  if (!(scenario.run_time_s > 0.0))
    throw ParameterError("run time must be > 0");
  if (scenario.heralding_fraction < 0.0)
    throw ParameterError("heralding fraction must be >= 0");
  RateProjection out;
  out.current_per_s = scenario.coincidences / scenario.run_time_s *
                      scenario.heralding_fraction;
  double product = 1.0;
  for (const auto& f : scenario.improvements) {
    if (f.factor < 0.0) throw ParameterError("improvement factors must be >= 0");
    product *= f.factor;
  }
  out.projected_per_s = out.current_per_s * product;
  return out;
}

}  // namespace homwb::bell
