#pragma once

#include <vector>

#include "nvberry/constants.hpp"
#include "nvberry/spin.hpp"
#include "nvberry/trajectory.hpp"

namespace nvberry {

enum class PulseKind { HalfPi, Pi, Readout };

struct PulseEvent {
  double time = 0.0;        // seconds from protocol start
  PulseKind kind = PulseKind::HalfPi;
  double axis_phase = 0.0;  // drive-axis angle in the equatorial plane, rad
};

// fringe envelope applied to the readout contrast
struct DecoherenceModel {
  enum Kind { None, GaussianT2Star, ExponentialT2 } kind = None;
  double timescale = 0.0;  // seconds; unused for None

  double envelope(double duration) const;
};

struct ProtocolResult {
  double phase_estimate = 0.0;    // rad
  double population_m0 = 0.0;     // fringe value, (1 + coherence cos(phase + retard)) / 2
  double coherence_factor = 1.0;  // envelope at the protocol duration
  double duration = 0.0;          // seconds of free evolution
  double margin = 0.0;            // adiabaticity margin of the swept path
  std::vector<PulseEvent> pulses;
};

// free precession at fixed polar angle while the azimuth advances by phi0;
// the drive-locked relative phase between the m = 0 and m = +1 branches is
// phi0 cos(theta)
ProtocolResult run_ramsey(double omega, double theta, double phi0, double retard,
                          const DecoherenceModel& model, const PhysicalConstants& c);

// n spindle rotations with refocusing pulses at every equator crossing; the
// per-rotation rectified phase is 4 * tilt
ProtocolResult run_echo(const SpindleConfig& cfg, int rotations, double retard,
                        const DecoherenceModel& model, const PhysicalConstants& c);

// ideal instantaneous pulse on the m = 0 <-> +1 pair of the axis eigenbasis the
// state is expressed in; the drive couples through the lab z field component,
// so it dies out as sin(theta) -> 0
SpinState apply_pulse(const SpinState& state, PulseKind kind, double axis_phase);

// same rotation built as a finite-duration resonant drive window and routed
// through the generic propagator; agrees with apply_pulse and exists to check it
SpinState apply_pulse_finite(const SpinState& state, PulseKind kind, double axis_phase,
                             double rabi_rate);

}  // namespace nvberry
