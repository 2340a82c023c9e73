#pragma once

#include <numbers>

// Unit conventions used throughout the library:
//   time               ns      (timestamps in integer ps where noted)
//   angular frequency  rad/ns  (2*pi*0.001 rad/ns == 2*pi * 1 MHz)
//   rates              counts/s for sources and detectors
//   envelopes          amplitude in ns^(-1/2), so intensity integrates to 1

namespace homwb::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// rad/ns per MHz of ordinary frequency
inline constexpr double rad_ns_per_mhz = two_pi * 1.0e-3;

inline constexpr double ps_per_ns = 1000.0;
inline constexpr double ns_per_us = 1000.0;
inline constexpr double ns_per_s = 1.0e9;
inline constexpr double ps_per_s = 1.0e12;

// Bohr magneton over hbar: 2*pi x 1.3996 MHz per gauss.
inline constexpr double mu_b_over_hbar_rad_ns_per_gauss = two_pi * 1.3996e-3;

}  // namespace homwb::units

namespace homwb::barium {

// 138Ba+ 6P1/2 radiative data: A(493 nm, P->S) = 9.53e7 /s,
// A(650 nm, P->D) = 3.10e7 /s.
inline constexpr double p12_decay_rate_inv_ns = 0.1263;
inline constexpr double p12_branching_to_ground = 0.754;

// Lande g-factors of the levels bracketing the 493-nm emission.
inline constexpr double g_6s12 = 2.0;
inline constexpr double g_5d32 = 0.8;

}  // namespace homwb::barium
