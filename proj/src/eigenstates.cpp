#include "nvberry/eigenstates.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "nvberry/quadrature.hpp"

namespace nvberry {

namespace {

constexpr complexd kI{0.0, 1.0};
constexpr double kPoleGuard = 1e-6;     // Raw-gauge exclusion around theta = pi
constexpr double kClosureTol = 1e-9;
constexpr double kRelTol = 1e-9;

// the Raw m = +1 column picks up exp(2 i phi); its branch is undefined on the
// south pole, so Raw-gauge line integrals refuse paths that graze it
void check_raw_pole(const Trajectory& traj) {
  const int samples = 4096;
  for (int i = 0; i <= samples; ++i) {
    const double t = traj.t0 + (traj.t1 - traj.t0) * i / samples;
    if (traj.theta_of_t(t) > kPi - kPoleGuard) {
      std::ostringstream msg;
      msg << "Raw-gauge path reaches theta = " << traj.theta_of_t(t)
          << ", inside the excluded cap around theta = pi";
      throw GaugeSingularity(msg.str());
    }
  }
}

}  // namespace

void require_valid_m(MagneticQuantumNumber m) {
  if (m < -1 || m > 1)
    throw ValidationError("magnetic quantum number must be -1, 0, or +1");
}

SpinState analytic_eigenstate(const Orientation& o, MagneticQuantumNumber m, GaugeChoice gauge) {
  require_valid_m(m);
  const double th = o.theta;
  const double c2 = std::cos(th / 2.0) * std::cos(th / 2.0);
  const double s2 = std::sin(th / 2.0) * std::sin(th / 2.0);
  const double sr = std::sin(th) / std::sqrt(2.0);
  const complexd eip = std::exp(kI * o.phi);
  const complexd eim = std::conj(eip);

  Vector3cd v;
  switch (m) {
    case 1:
      v << c2, eip * sr, eip * eip * s2;
      break;
    case 0:
      v << -eim * sr, std::cos(th), eip * sr;
      break;
    default:  // m == -1
      v << eim * eim * s2, -eim * sr, c2;
      break;
  }
  if (gauge == GaugeChoice::MicrowaveFixed)
    v *= std::exp(-kI * (static_cast<double>(m) * o.phi));
  return {v, Basis::lab()};
}

Matrix3cd eigenbasis(const Orientation& o, GaugeChoice gauge) {
  Matrix3cd v;
  v.col(0) = analytic_eigenstate(o, +1, gauge).amplitudes;
  v.col(1) = analytic_eigenstate(o, 0, gauge).amplitudes;
  v.col(2) = analytic_eigenstate(o, -1, gauge).amplitudes;
  return v;
}

SpinState to_lab(const SpinState& s, GaugeChoice gauge) {
  if (s.basis.kind == Basis::LabZ) return s;
  return {eigenbasis(s.basis.orientation, gauge) * s.amplitudes, Basis::lab()};
}

SpinState to_nv_prime(const SpinState& s, const Orientation& o, GaugeChoice gauge) {
  if (s.basis.kind == Basis::NVPrime) {
    require_same_basis(s.basis, Basis::nv_prime(o), "to_nv_prime");
    return s;
  }
  return {eigenbasis(o, gauge).adjoint() * s.amplitudes, Basis::nv_prime(o)};
}

double berry_connection(MagneticQuantumNumber m, double theta, GaugeChoice gauge) {
  require_valid_m(m);
  const double dm = static_cast<double>(m);
  if (gauge == GaugeChoice::Raw) return dm * (1.0 - std::cos(theta));
  return dm * std::cos(theta);
}

namespace {

// integral of connection * dphi/dt over [a, b], by the grid when tabulated
QuadratureResult connection_integral(const Trajectory& traj, MagneticQuantumNumber m,
                                     GaugeChoice gauge, double a, double b) {
  auto integrand = [&](double t) {
    return berry_connection(m, traj.theta_of_t(t), gauge) * traj.dphi_dt(t);
  };
  if (!traj.sample_times.empty()) {
    std::vector<double> ts, fs;
    for (double t : traj.sample_times)
      if (t >= a - 1e-15 && t <= b + 1e-15) {
        ts.push_back(t);
        fs.push_back(integrand(t));
      }
    return integrate_sampled(ts, fs);
  }
  return integrate_adaptive(integrand, a, b, kRelTol);
}

}  // namespace

PhaseResult geometric_phase(const Trajectory& traj, MagneticQuantumNumber m, GaugeChoice gauge,
                            std::span<const double> pulse_schedule) {
  require_valid_m(m);
  if (gauge == GaugeChoice::Raw) check_raw_pole(traj);

  PhaseResult out;
  out.gauge = gauge;
  out.m = m;
  out.rectified = !pulse_schedule.empty();

  std::vector<double> edges{traj.t0};
  for (double tp : pulse_schedule) {
    if (tp <= traj.t0 || tp >= traj.t1)
      throw ValidationError("pulse instants must lie strictly inside the path interval");
    edges.push_back(tp);
  }
  edges.push_back(traj.t1);

  double phase = 0.0, err = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    QuadratureResult q = connection_integral(traj, m, gauge, edges[k], edges[k + 1]);
    const double sign = out.rectified ? (k % 2 == 0 ? -1.0 : 1.0) : 1.0;
    phase += sign * q.value;
    err += q.error;
  }
  out.geometric = phase;
  out.quadrature_error = err;

  if (traj.closed) out.solid_angle = solid_angle(traj);
  return out;
}

double solid_angle(const Trajectory& traj) {
  const double dth = traj.theta_of_t(traj.t1) - traj.theta_of_t(traj.t0);
  const double dph = traj.phi_of_t(traj.t1) - traj.phi_of_t(traj.t0);
  const double winding = std::round(dph / kTwoPi);
  if (!traj.closed || std::abs(dth) > kClosureTol ||
      std::abs(dph - kTwoPi * winding) > kClosureTol) {
    std::ostringstream msg;
    msg << "path endpoints differ by dtheta = " << dth << ", dphi mod 2pi = "
        << dph - kTwoPi * winding << "; not a closed loop";
    throw NotClosed(msg.str());
  }

  auto integrand = [&](double t) {
    return (1.0 - std::cos(traj.theta_of_t(t))) * traj.dphi_dt(t);
  };
  if (!traj.sample_times.empty()) {
    std::vector<double> fs;
    fs.reserve(traj.sample_times.size());
    for (double t : traj.sample_times) fs.push_back(integrand(t));
    return integrate_sampled(traj.sample_times, fs).value;
  }
  return integrate_adaptive(integrand, traj.t0, traj.t1, kRelTol).value;
}

}  // namespace nvberry
