#pragma once

#include <optional>
#include <span>

#include "nvberry/spin.hpp"
#include "nvberry/trajectory.hpp"

namespace nvberry {

// Raw: axis eigenstates with the azimuth-dependent phases left in place.
// MicrowaveFixed: each level rotated by exp(-i m phi), locking the basis to the
// drive so pulse action is azimuth-independent.
enum class GaugeChoice { Raw, MicrowaveFixed };

// magnetic quantum number along the NV axis; valid values are -1, 0, +1
using MagneticQuantumNumber = int;
void require_valid_m(MagneticQuantumNumber m);

// closed-form eigenstate of the zero-field term at orientation o, as a lab-basis
// column; eigenvalue is D m^2
SpinState analytic_eigenstate(const Orientation& o, MagneticQuantumNumber m, GaugeChoice gauge);

// lab-basis matrix whose columns are the m = +1, 0, -1 eigenstates;
// maps NVPrime components to lab components
Matrix3cd eigenbasis(const Orientation& o, GaugeChoice gauge);

SpinState to_lab(const SpinState& s, GaugeChoice gauge);
SpinState to_nv_prime(const SpinState& s, const Orientation& o, GaugeChoice gauge);

// phase accumulated per unit azimuth at fixed polar angle:
//   Raw            m (1 - cos theta)
//   MicrowaveFixed m cos theta
double berry_connection(MagneticQuantumNumber m, double theta, GaugeChoice gauge);

struct PhaseResult {
  double geometric = 0.0;               // rad
  GaugeChoice gauge = GaugeChoice::Raw;
  MagneticQuantumNumber m = 0;
  bool rectified = false;
  std::optional<double> solid_angle;    // closed loops only
  double quadrature_error = 0.0;
};

// integral of the gauge connection along the path. A non-empty pulse schedule
// rectifies the accumulation: segment signs alternate at each pulse instant,
// referenced so that the signed total matches the refocused-readout phase
// (first inter-pulse segment counts negative).
PhaseResult geometric_phase(const Trajectory& traj, MagneticQuantumNumber m, GaugeChoice gauge,
                            std::span<const double> pulse_schedule = {});

// signed solid angle swept by a closed path, via the line integral of
// (1 - cos theta) d phi
double solid_angle(const Trajectory& traj);

}  // namespace nvberry
