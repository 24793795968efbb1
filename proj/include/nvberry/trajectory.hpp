#pragma once

#include <functional>
#include <vector>

#include "nvberry/constants.hpp"
#include "nvberry/errors.hpp"

namespace nvberry {

// path of the NV axis on the unit sphere, parametrized by time
struct Trajectory {
  std::function<double(double)> theta_of_t;
  std::function<double(double)> phi_of_t;   // continuous branch, not wrapped to [0, 2pi)
  std::function<double(double)> dphi_dt;
  std::function<double(double)> dtheta_dt;  // empty -> central differences
  double t0 = 0.0;
  double t1 = 0.0;
  bool closed = false;
  bool degenerate_tilt = false;

  // non-empty when the path is tabulated; integrals then use the sample grid
  std::vector<double> sample_times;

  double theta_rate(double t) const;
};

// rotating-spindle geometry: spindle axis tilted from lab z by `tilt`,
// NV axis mounted perpendicular to the spindle axis
struct SpindleConfig {
  double omega = 4000.0 * kPi;  // rotation rate, rad/s
  double tilt = 0.0;            // spindle tilt from lab z, [0, pi/2]
  double start_offset = 0.0;    // rotation angle at t = 0
};

void validate(const SpindleConfig& cfg);

// fixed polar angle, azimuth swept at omega from 0 to phi0
Trajectory ramsey_trajectory(double omega, double theta, double phi0);

// n full turns of the NV axis about the tilted spindle axis; theta0 = 0 is
// returned flagged degenerate (the path collapses to the equatorial great circle)
Trajectory echo_trajectory(const SpindleConfig& cfg, int rotations);

// instants where the NV axis crosses the lab equator, two per rotation
std::vector<double> pi_pulse_times(const SpindleConfig& cfg, int rotations);

// tabulated path; phi samples must already be on a continuous branch
Trajectory trajectory_from_samples(std::vector<double> times, std::vector<double> thetas,
                                   std::vector<double> phis, bool closed);

}  // namespace nvberry
