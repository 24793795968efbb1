#pragma once

#include <functional>
#include <span>

#include "nvberry/eigenstates.hpp"
#include "nvberry/spin.hpp"
#include "nvberry/trajectory.hpp"

namespace nvberry {

enum class PropagationMethod { PiecewiseExponential, RK4 };

struct PropagationConfig {
  PropagationMethod method = PropagationMethod::PiecewiseExponential;
  double dt = 0.0;          // step size; 0 picks one from `tolerance`
  double tolerance = 1e-5;  // phase accuracy target used when dt = 0
};

// margin below which trajectory-following results are refused
inline constexpr double kMinAdiabaticMargin = 10.0;
// reported when the sweep rate vanishes identically
inline constexpr double kAdiabaticMarginCap = 1e300;

// 2 D^2 over the peak squared sweep rate (theta_dot^2 + sin^2 theta phi_dot^2)
double adiabaticity_margin(const Trajectory& traj, const PhysicalConstants& c);

// Schrodinger propagation of a spin-1 state under H(t), hbar = 1.
// PiecewiseExponential applies the exact exponential of the midpoint
// Hamiltonian per step (unitary, 2nd order); RK4 is classical 4th order with a
// per-step projection back to the unit sphere.
SpinState propagate(const std::function<SpinOperator(double)>& h_of_t, const SpinState& psi0,
                    double t0, double t1, const PropagationConfig& cfg);

struct PhaseDecomposition {
  double total = 0.0;      // rad, dynamic + geometric
  double dynamic = 0.0;    // D m^2 (t1 - t0), removed analytically during tracking
  double geometric = 0.0;  // rad
  double margin = 0.0;     // adiabaticity margin of the run
  long checkpoints = 0;
};

// propagates the m eigenstate along the axis trajectory under the zero-field
// Hamiltonian alone and reads the geometric part of the accumulated phase off
// the overlap with the instantaneous reference state in the chosen gauge.
// A non-empty pulse schedule applies the same alternating segment signs as the
// rectified line integral.
PhaseDecomposition extract_geometric_phase(const Trajectory& traj, MagneticQuantumNumber m,
                                           GaugeChoice gauge, const PropagationConfig& cfg,
                                           const PhysicalConstants& c,
                                           std::span<const double> pulse_schedule = {});

}  // namespace nvberry
