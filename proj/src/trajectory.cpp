#include "nvberry/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nvberry {

double Trajectory::theta_rate(double t) const {
  if (dtheta_dt) return dtheta_dt(t);
  const double h = std::max(1e-9 * (t1 - t0), 1e-15);
  const double lo = std::max(t0, t - h);
  const double hi = std::min(t1, t + h);
  return (theta_of_t(hi) - theta_of_t(lo)) / (hi - lo);
}

void validate(const SpindleConfig& cfg) {
  if (!(cfg.omega > 0.0)) throw ValidationError("spindle omega must be positive");
  if (!(cfg.tilt >= 0.0 && cfg.tilt <= kPi / 2.0))
    throw ValidationError("spindle tilt must lie in [0, pi/2]");
  if (!std::isfinite(cfg.start_offset))
    throw ValidationError("spindle start offset must be finite");
}

Trajectory ramsey_trajectory(double omega, double theta, double phi0) {
  if (!(omega > 0.0)) throw ValidationError("omega must be positive");
  if (!(theta >= 0.0 && theta <= kPi)) throw ValidationError("theta must lie in [0, pi]");
  if (!(phi0 >= 0.0)) throw ValidationError("phi0 must be nonnegative");

  Trajectory tr;
  tr.theta_of_t = [theta](double) { return theta; };
  tr.phi_of_t = [omega](double t) { return omega * t; };
  tr.dphi_dt = [omega](double) { return omega; };
  tr.dtheta_dt = [](double) { return 0.0; };
  tr.t0 = 0.0;
  tr.t1 = phi0 / omega;
  const double turns = phi0 / kTwoPi;
  tr.closed = std::abs(turns - std::round(turns)) < 1e-9;
  return tr;
}

namespace {

// continuous azimuth of cos(u) e1 + sin(u) e2 around lab z, with
// e1 = (cos t0, 0, -sin t0), e2 = (0, 1, 0); winds once per turn
double unwrapped_phi(double u, double cos_tilt) {
  const double k = std::floor(u / kTwoPi);
  const double r = u - kTwoPi * k;
  double base = std::atan2(std::sin(r), cos_tilt * std::cos(r));
  if (base < 0.0) base += kTwoPi;
  return kTwoPi * k + base;
}

}  // namespace

Trajectory echo_trajectory(const SpindleConfig& cfg, int rotations) {
  validate(cfg);
  if (rotations < 1) throw ValidationError("rotation count must be at least 1");

  const double omega = cfg.omega;
  const double alpha = cfg.start_offset;
  const double st = std::sin(cfg.tilt);
  const double ct = std::cos(cfg.tilt);

  Trajectory tr;
  tr.theta_of_t = [omega, alpha, st](double t) {
    return std::acos(std::clamp(-st * std::cos(omega * t + alpha), -1.0, 1.0));
  };
  tr.phi_of_t = [omega, alpha, ct](double t) { return unwrapped_phi(omega * t + alpha, ct); };
  tr.dphi_dt = [omega, alpha, st, ct](double t) {
    const double c = std::cos(omega * t + alpha);
    return omega * ct / (1.0 - st * st * c * c);
  };
  tr.dtheta_dt = [omega, alpha, st](double t) {
    const double u = omega * t + alpha;
    const double c = std::cos(u);
    return -omega * st * std::sin(u) / std::sqrt(1.0 - st * st * c * c);
  };
  tr.t0 = 0.0;
  tr.t1 = rotations * kTwoPi / omega;
  tr.closed = true;
  tr.degenerate_tilt = (cfg.tilt == 0.0);
  return tr;
}

std::vector<double> pi_pulse_times(const SpindleConfig& cfg, int rotations) {
  validate(cfg);
  if (rotations < 1) throw ValidationError("rotation count must be at least 1");

  // equator crossings: cos(omega t + alpha) = 0
  const double t_end = rotations * kTwoPi / cfg.omega;
  std::vector<double> times;
  const double first_k = std::ceil((cfg.start_offset - kPi / 2.0) / kPi - 1e-12);
  for (int k = static_cast<int>(first_k);; ++k) {
    const double t = (kPi / 2.0 + k * kPi - cfg.start_offset) / cfg.omega;
    if (t <= 1e-15) continue;
    if (t >= t_end - 1e-15) break;
    times.push_back(t);
  }
  return times;
}

Trajectory trajectory_from_samples(std::vector<double> times, std::vector<double> thetas,
                                   std::vector<double> phis, bool closed) {
  if (times.size() < 3 || thetas.size() != times.size() || phis.size() != times.size())
    throw ValidationError("sampled trajectory needs >= 3 points with matching grids");
  if (!std::is_sorted(times.begin(), times.end()))
    throw ValidationError("sample times must be increasing");

  auto interp = [](const std::vector<double>& ts, const std::vector<double>& vs, double t) {
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t i = it == ts.begin() ? 1 : std::min(static_cast<std::size_t>(it - ts.begin()),
                                                    ts.size() - 1);
    const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return vs[i - 1] + w * (vs[i] - vs[i - 1]);
  };
  auto slope = [](const std::vector<double>& ts, const std::vector<double>& vs, double t) {
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t i = it == ts.begin() ? 1 : std::min(static_cast<std::size_t>(it - ts.begin()),
                                                    ts.size() - 1);
    return (vs[i] - vs[i - 1]) / (ts[i] - ts[i - 1]);
  };

  Trajectory tr;
  tr.t0 = times.front();
  tr.t1 = times.back();
  tr.closed = closed;
  tr.sample_times = times;
  tr.theta_of_t = [times, thetas, interp](double t) { return interp(times, thetas, t); };
  tr.phi_of_t = [times, phis, interp](double t) { return interp(times, phis, t); };
  tr.dphi_dt = [times, phis, slope](double t) { return slope(times, phis, t); };
  tr.dtheta_dt = [times, thetas, slope](double t) { return slope(times, thetas, t); };
  return tr;
}

}  // namespace nvberry
