#include "nvberry/evolution.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace nvberry {

namespace {

constexpr complexd kI{0.0, 1.0};
constexpr double kNormTol = 1e-8;
constexpr double kHermTol = 1e-10;

// exp(a) for a small 3x3 generator: scale down to norm <= 0.25, degree-12
// Taylor in Horner form, square back up
Matrix3cd expm_small(Matrix3cd a) {
  const double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (nrm > 0.25) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.25)));
    a *= std::ldexp(1.0, -squarings);
  }
  Matrix3cd e = Matrix3cd::Identity();
  for (int k = 12; k >= 1; --k)
    e = Matrix3cd::Identity() + (a / static_cast<double>(k)) * e;
  for (int s = 0; s < squarings; ++s) e = e * e;
  return e;
}

void check_hermitian(const Matrix3cd& h) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > kHermTol * scale)
    throw NonHermitian("sampled Hamiltonian is not Hermitian");
}

void check_norm(const Vector3cd& psi) {
  if (std::abs(psi.norm() - 1.0) > kNormTol) {
    std::ostringstream msg;
    msg << "state norm drifted to " << psi.norm();
    throw NormDrift(msg.str());
  }
}

double peak_sweep_rate_sq(const Trajectory& traj) {
  const double span = traj.t1 - traj.t0;
  const double rotations = std::abs(traj.phi_of_t(traj.t1) - traj.phi_of_t(traj.t0)) / kTwoPi;
  const long n = std::max(4096L, static_cast<long>(512.0 * std::ceil(rotations)));
  double peak = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double t = traj.t0 + span * static_cast<double>(i) / static_cast<double>(n);
    const double td = traj.theta_rate(t);
    const double s = std::sin(traj.theta_of_t(t));
    const double pd = traj.dphi_dt(t);
    peak = std::max(peak, td * td + s * s * pd * pd);
  }
  return peak;
}

// one unitary midpoint-exponential step
void step_exponential(const std::function<SpinOperator(double)>& h_of_t, Vector3cd& psi,
                      const Basis& basis, double t, double dt) {
  SpinOperator h = h_of_t(t + 0.5 * dt);
  require_same_basis(h.basis, basis, "propagate");
  check_hermitian(h.matrix);
  psi = expm_small((-kI * dt) * h.matrix) * psi;
}

// classical RK4 on psi' = -i H psi, then projection back to the unit sphere
// (RK4 leaks norm at sixth order per step; the projection leaves phases alone)
void step_rk4(const std::function<SpinOperator(double)>& h_of_t, Vector3cd& psi,
              const Basis& basis, double t, double dt) {
  auto rhs = [&](double tau, const Vector3cd& v) -> Vector3cd {
    SpinOperator h = h_of_t(tau);
    require_same_basis(h.basis, basis, "propagate");
    check_hermitian(h.matrix);
    return -kI * (h.matrix * v);
  };
  const Vector3cd k1 = rhs(t, psi);
  const Vector3cd k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1);
  const Vector3cd k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2);
  const Vector3cd k4 = rhs(t + dt, psi + dt * k3);
  psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  psi /= psi.norm();
}

long choose_steps(const PropagationConfig& cfg, double duration, double d, double sweep_rate) {
  if (cfg.dt > 0.0)
    return std::max(1L, static_cast<long>(std::ceil(duration / cfg.dt)));
  // midpoint-exponential phase error ~ duration dt^2 D^2 W / 12
  const double tol = cfg.tolerance > 0.0 ? cfg.tolerance : 1e-5;
  const double w = std::max(sweep_rate, 1.0 / duration);
  const double dt_target = std::sqrt(12.0 * tol / (duration * d * d * w));
  const double n = std::ceil(duration / dt_target);
  return static_cast<long>(std::clamp(n, 4096.0, 5e7));
}

}  // namespace

double adiabaticity_margin(const Trajectory& traj, const PhysicalConstants& c) {
  const double peak = peak_sweep_rate_sq(traj);
  const double d = c.zero_field_splitting;
  if (peak <= 0.0) return kAdiabaticMarginCap;
  return std::min(2.0 * d * d / peak, kAdiabaticMarginCap);
}

SpinState propagate(const std::function<SpinOperator(double)>& h_of_t, const SpinState& psi0,
                    double t0, double t1, const PropagationConfig& cfg) {
  if (std::abs(psi0.norm() - 1.0) > 1e-9)
    throw ValidationError("initial state must be normalized");
  if (!(t1 > t0)) throw ValidationError("propagation interval must have positive length");

  const double duration = t1 - t0;
  double hscale = h_of_t(t0).matrix.cwiseAbs().maxCoeff();
  const long steps = choose_steps(cfg, duration, std::max(hscale, 1.0 / duration), 0.0);
  const double dt = duration / static_cast<double>(steps);

  Vector3cd psi = psi0.amplitudes;
  for (long i = 0; i < steps; ++i) {
    const double t = t0 + dt * static_cast<double>(i);
    if (cfg.method == PropagationMethod::PiecewiseExponential)
      step_exponential(h_of_t, psi, psi0.basis, t, dt);
    else
      step_rk4(h_of_t, psi, psi0.basis, t, dt);
    if ((i & 63) == 0) check_norm(psi);
  }
  check_norm(psi);
  return {psi, psi0.basis};
}

PhaseDecomposition extract_geometric_phase(const Trajectory& traj, MagneticQuantumNumber m,
                                           GaugeChoice gauge, const PropagationConfig& cfg,
                                           const PhysicalConstants& c,
                                           std::span<const double> pulse_schedule) {
  require_valid_m(m);

  if (gauge == GaugeChoice::Raw) {
    for (int i = 0; i <= 4096; ++i) {
      const double t = traj.t0 + (traj.t1 - traj.t0) * i / 4096.0;
      if (traj.theta_of_t(t) > kPi - 1e-6)
        throw GaugeSingularity("Raw-gauge path enters the excluded cap around theta = pi");
    }
  }

  const double peak_sq = peak_sweep_rate_sq(traj);
  const double d = c.zero_field_splitting;
  const double margin =
      peak_sq <= 0.0 ? kAdiabaticMarginCap : std::min(2.0 * d * d / peak_sq, kAdiabaticMarginCap);
  if (margin < kMinAdiabaticMargin) {
    std::ostringstream msg;
    msg << "adiabaticity margin " << margin << " below the cutoff " << kMinAdiabaticMargin;
    throw NotAdiabatic(msg.str());
  }

  const double duration = traj.t1 - traj.t0;
  const long steps = choose_steps(cfg, duration, d, std::sqrt(peak_sq));
  const double dt = duration / static_cast<double>(steps);

  // checkpoints dense enough to keep the residual phase step well under pi:
  // at least 64 per rotation, and never fewer than 128 over the whole path
  const double rotations = std::abs(traj.phi_of_t(traj.t1) - traj.phi_of_t(traj.t0)) / kTwoPi;
  const long checkpoints = std::max(128L, static_cast<long>(std::ceil(64.0 * rotations)));
  const long stride = std::max(1L, steps / checkpoints);

  std::vector<double> edges{traj.t0};
  for (double tp : pulse_schedule) {
    if (tp <= traj.t0 || tp >= traj.t1)
      throw ValidationError("pulse instants must lie strictly inside the path interval");
    edges.push_back(tp);
  }
  edges.push_back(traj.t1);

  auto h_of_t = [&](double t) {
    return zero_field_hamiltonian({traj.theta_of_t(t), traj.phi_of_t(t)}, c);
  };
  auto reference = [&](double t) {
    return analytic_eigenstate({traj.theta_of_t(t), traj.phi_of_t(t)}, m, gauge);
  };

  const double e_m = d * static_cast<double>(m * m);
  Vector3cd psi = reference(traj.t0).amplitudes;
  const Basis lab = Basis::lab();

  double accumulated = 0.0;
  long used_checkpoints = 0;
  complexd r_prev{1.0, 0.0};  // overlap at t0 with dynamic factor removed
  double t = traj.t0;

  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double sign = pulse_schedule.empty() ? 1.0 : (seg % 2 == 0 ? -1.0 : 1.0);
    const double seg_end = edges[seg + 1];
    long since_checkpoint = 0;
    while (t < seg_end - 0.25 * dt) {
      const double step = std::min(dt, seg_end - t);
      if (cfg.method == PropagationMethod::PiecewiseExponential)
        step_exponential(h_of_t, psi, lab, t, step);
      else
        step_rk4(h_of_t, psi, lab, t, step);
      t += step;
      if (++since_checkpoint >= stride || t >= seg_end - 0.25 * dt) {
        since_checkpoint = 0;
        const complexd o = reference(t).amplitudes.dot(psi);
        if (std::abs(o) < 0.5)
          throw PhaseUnwrapFailure("overlap with the reference branch collapsed");
        const complexd r = o * std::exp(kI * (e_m * (t - traj.t0)));
        const double delta = std::arg(r * std::conj(r_prev));
        if (std::abs(delta) > 2.8)
          throw PhaseUnwrapFailure("phase step between checkpoints too close to the branch cut");
        accumulated += sign * delta;
        r_prev = r;
        ++used_checkpoints;
      }
    }
    check_norm(psi);
  }

  // the bare gauge reports the phase as it appears in exp(-i Phi), the
  // drive-locked gauge as exp(+i Phi); this matches the closed-form connections
  const double report_sign = gauge == GaugeChoice::Raw ? -1.0 : 1.0;

  PhaseDecomposition out;
  out.geometric = report_sign * accumulated;
  out.dynamic = e_m * duration;
  out.total = out.dynamic + out.geometric;
  out.margin = margin;
  out.checkpoints = used_checkpoints;
  return out;
}

}  // namespace nvberry
