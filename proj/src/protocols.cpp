#include "nvberry/protocols.hpp"

#include <cmath>
#include <sstream>

#include "nvberry/evolution.hpp"

namespace nvberry {

namespace {

constexpr complexd kI{0.0, 1.0};
constexpr double kDriveFloor = 1e-6;   // sin(theta) below this cannot be driven
constexpr double kDeadFactor = 5.0;    // refuse runs longer than 5 envelope times

void check_alive(double duration, const DecoherenceModel& model) {
  if (model.kind == DecoherenceModel::None) return;
  if (duration > kDeadFactor * model.timescale) {
    std::ostringstream msg;
    msg << "free evolution of " << duration << " s exceeds " << kDeadFactor
        << " envelope times (" << model.timescale << " s); no signal survives";
    throw SignalDead(msg.str());
  }
}

void check_margin(const Trajectory& traj, const PhysicalConstants& c, double& margin_out) {
  margin_out = adiabaticity_margin(traj, c);
  if (margin_out < kMinAdiabaticMargin) {
    std::ostringstream msg;
    msg << "adiabaticity margin " << margin_out << " below " << kMinAdiabaticMargin;
    throw NotAdiabatic(msg.str());
  }
}

double fringe(double phase, double retard, double coherence) {
  return 0.5 * (1.0 + coherence * std::cos(phase + retard));
}

// two-level rotation on the (m = +1, m = 0) pair, conjugated by the azimuth
// phases of the basis columns so the drive axis is stated in the lab frame
Matrix3cd pulse_unitary(double angle, double axis_phase, double phi) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const complexd off = -kI * s * std::exp(kI * (axis_phase + phi));
  Matrix3cd u = Matrix3cd::Identity();
  u(0, 0) = c;
  u(1, 1) = c;
  u(0, 1) = off;
  u(1, 0) = -kI * s * std::exp(-kI * (axis_phase + phi));
  return u;
}

}  // namespace

double DecoherenceModel::envelope(double duration) const {
  switch (kind) {
    case None: return 1.0;
    case GaussianT2Star: {
      const double x = duration / timescale;
      return std::exp(-x * x);
    }
    case ExponentialT2: return std::exp(-duration / timescale);
  }
  return 1.0;
}

ProtocolResult run_ramsey(double omega, double theta, double phi0, double retard,
                          const DecoherenceModel& model, const PhysicalConstants& c) {
  Trajectory traj = ramsey_trajectory(omega, theta, phi0);
  ProtocolResult out;
  check_margin(traj, c, out.margin);
  out.duration = traj.t1;
  check_alive(out.duration, model);

  out.phase_estimate = phi0 * std::cos(theta);
  out.coherence_factor = model.envelope(out.duration);
  out.population_m0 = fringe(out.phase_estimate, retard, out.coherence_factor);
  out.pulses = {{0.0, PulseKind::HalfPi, 0.0},
                {out.duration, PulseKind::HalfPi, retard},
                {out.duration, PulseKind::Readout, 0.0}};
  return out;
}

ProtocolResult run_echo(const SpindleConfig& cfg, int rotations, double retard,
                        const DecoherenceModel& model, const PhysicalConstants& c) {
  validate(cfg);
  if (rotations < 1) throw ValidationError("rotation count must be at least 1");
  if (cfg.tilt >= kPi / 2.0)
    throw ValidationError("echo tilt must be below pi/2");

  Trajectory traj = echo_trajectory(cfg, rotations);
  ProtocolResult out;
  check_margin(traj, c, out.margin);
  out.duration = traj.t1;
  check_alive(out.duration, model);

  out.phase_estimate = 4.0 * static_cast<double>(rotations) * cfg.tilt;
  out.coherence_factor = model.envelope(out.duration);
  out.population_m0 = fringe(out.phase_estimate, retard, out.coherence_factor);

  out.pulses.push_back({0.0, PulseKind::HalfPi, 0.0});
  for (double t : pi_pulse_times(cfg, rotations))
    out.pulses.push_back({t, PulseKind::Pi, 0.0});
  out.pulses.push_back({out.duration, PulseKind::HalfPi, retard});
  out.pulses.push_back({out.duration, PulseKind::Readout, 0.0});
  return out;
}

SpinState apply_pulse(const SpinState& state, PulseKind kind, double axis_phase) {
  if (state.basis.kind != Basis::NVPrime)
    throw BasisMismatch("pulses act on states expressed in the axis eigenbasis");
  if (kind == PulseKind::Readout)
    throw ValidationError("readout marker is not a unitary pulse");
  const Orientation& o = state.basis.orientation;
  if (std::sin(o.theta) <= kDriveFloor)
    throw NoDrive("axis aligned with the drive field; no transverse coupling");

  const double angle = kind == PulseKind::HalfPi ? kPi / 2.0 : kPi;
  return {pulse_unitary(angle, axis_phase, o.phi) * state.amplitudes, state.basis};
}

SpinState apply_pulse_finite(const SpinState& state, PulseKind kind, double axis_phase,
                             double rabi_rate) {
  if (state.basis.kind != Basis::NVPrime)
    throw BasisMismatch("pulses act on states expressed in the axis eigenbasis");
  if (kind == PulseKind::Readout)
    throw ValidationError("readout marker is not a unitary pulse");
  if (!(rabi_rate > 0.0)) throw ValidationError("Rabi rate must be positive");
  const Orientation& o = state.basis.orientation;
  if (std::sin(o.theta) <= kDriveFloor)
    throw NoDrive("axis aligned with the drive field; no transverse coupling");

  const double angle = kind == PulseKind::HalfPi ? kPi / 2.0 : kPi;
  const double duration = angle / rabi_rate;
  const complexd coupling = 0.5 * rabi_rate * std::exp(kI * (axis_phase + o.phi));

  Matrix3cd h = Matrix3cd::Zero();
  h(0, 1) = coupling;
  h(1, 0) = std::conj(coupling);
  auto h_of_t = [&](double) { return SpinOperator{h, state.basis}; };

  PropagationConfig cfg;
  cfg.dt = duration / 2048.0;
  return propagate(h_of_t, state, 0.0, duration, cfg);
}

}  // namespace nvberry
