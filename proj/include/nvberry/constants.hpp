#pragma once

#include <numbers>

namespace nvberry {

// all frequencies are angular (rad/s); hbar = 1 internally, so energies are rad/s too
struct PhysicalConstants {
  double zero_field_splitting = 2.0 * std::numbers::pi * 2.88e9;  // rad/s
  double g_factor = 2.0;
  // mu_B / hbar, rad s^-1 T^-1 (CODATA: 9.2740100783e-24 J/T over 1.054571817e-34 J s)
  double muB_over_hbar = 9.2740100783e-24 / 1.054571817e-34;

  // gyromagnetic prefactor g * mu_B / hbar
  double gamma() const { return g_factor * muB_over_hbar; }
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace nvberry
