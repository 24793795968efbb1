// acceptance gate: one line per criterion, nonzero exit if any fail
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nvberry/eigenstates.hpp"
#include "nvberry/evolution.hpp"
#include "nvberry/measurement.hpp"
#include "nvberry/protocols.hpp"
#include "nvberry/spin.hpp"
#include "nvberry/trajectory.hpp"

using namespace nvberry;

namespace {

const double kOmega = 4000.0 * kPi;
int failures = 0;

void report(int index, const char* label, bool ok, const std::string& detail) {
  std::printf("criterion %d (%s): %s  %s\n", index, label, ok ? "PASS" : "FAIL", detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

PhysicalConstants scaled_constants(double ratio) {
  PhysicalConstants c;
  c.zero_field_splitting = ratio * kOmega;
  return c;
}

double wrap_to_pi(double x) { return std::remainder(x, kTwoPi); }

void criterion_noise_floor() {
  SensitivityParams echo;  // C 0.15, 4000 pi rad/s, 2 ms, overhead 2, 3 h
  SensitivityParams ramsey = echo;
  ramsey.coherence_time = 1e-5;

  const double s_echo = relative_sensitivity(echo);
  const double s_ramsey = relative_sensitivity(ramsey);
  const double u_echo = relative_uncertainty(echo);
  const double u_ramsey = relative_uncertainty(ramsey);

  const bool ok = std::abs(s_echo - 0.149) <= 0.010 && std::abs(s_ramsey - 2.11) <= 0.15 &&
                  u_echo >= 0.0013 && u_echo <= 0.0016 && u_ramsey >= 0.018 && u_ramsey <= 0.022;
  report(1, "noise-floor figures", ok,
         fmt("echo %.6f /sqrt(Hz) (0.149+-0.010), ramsey %.6f (2.11+-0.15); "
             "3 h: %.5f%% (0.13-0.16), %.4f%% (1.8-2.2)",
             s_echo, s_ramsey, 100.0 * u_echo, 100.0 * u_ramsey));
}

void criterion_echo_phase() {
  PhysicalConstants c;
  SpindleConfig cfg{kOmega, 0.25, 0.0};
  DecoherenceModel t2{DecoherenceModel::ExponentialT2, 2e-3};
  ProtocolResult r = run_echo(cfg, 4, 0.0, t2, c);

  const double quadrature =
      geometric_phase(echo_trajectory(cfg, 4), 1, GaugeChoice::MicrowaveFixed,
                      pi_pulse_times(cfg, 4))
          .geometric;

  const bool ok = std::abs(r.phase_estimate - 4.0) < 1e-12 &&
                  std::abs(r.duration - 2e-3) < 1e-12 && std::abs(quadrature - 4.0) < 1e-8;
  report(2, "spindle-echo phase", ok,
         fmt("protocol %.12f rad over %.6f ms, line integral %.12f (target 4 rad exactly)",
             r.phase_estimate, 1e3 * r.duration, quadrature));
}

void criterion_ramsey_law() {
  PhysicalConstants c;
  DecoherenceModel none{DecoherenceModel::None, 0.0};

  double worst = 0.0;
  for (double theta = 0.1; theta < 1.55; theta += 0.1) {
    for (double phi0 : {0.01, 0.1, 1.0, kPi, kTwoPi}) {
      ProtocolResult r = run_ramsey(kOmega, theta, phi0, 0.0, none, c);
      worst = std::max(worst, std::abs(r.phase_estimate - phi0 * std::cos(theta)));
    }
  }

  DecoherenceModel star{DecoherenceModel::GaussianT2Star, 1e-5};
  const double phi_limit = kOmega * 1e-5;
  double peak = 0.0;
  for (double theta = 0.1; theta < 1.55; theta += 0.1) {
    ProtocolResult r = run_ramsey(kOmega, theta, phi_limit, 0.0, star, c);
    peak = std::max(peak, std::abs(r.phase_estimate));
  }

  const bool ok = worst < 1e-10 && peak >= 0.010 && peak <= 0.130;
  report(3, "swept-phase law", ok,
         fmt("max law error %.2e rad (bound 1e-10); dephasing-limited peak %.1f mrad "
             "(window 10-130)",
             worst, 1e3 * peak));
}

void criterion_numeric_oracle() {
  PropagationConfig cfg;  // tolerance 1e-5
  struct Leg {
    std::string name;
    double err100 = 0.0, err1000 = 0.0;
  };
  std::vector<Leg> legs;

  auto loop_err = [&](double theta, GaugeChoice g, double ratio) {
    Trajectory loop = ramsey_trajectory(kOmega, theta, kTwoPi);
    const double analytic = geometric_phase(loop, 1, g).geometric;
    return std::abs(
        extract_geometric_phase(loop, 1, g, cfg, scaled_constants(ratio)).geometric - analytic);
  };

  struct LoopSpec {
    const char* name;
    double theta;
    GaugeChoice gauge;
  };
  for (const LoopSpec& s :
       {LoopSpec{"loop pi/6", kPi / 6.0, GaugeChoice::MicrowaveFixed},
        LoopSpec{"loop pi/3", kPi / 3.0, GaugeChoice::MicrowaveFixed},
        LoopSpec{"loop pi/2", kPi / 2.0, GaugeChoice::MicrowaveFixed},
        LoopSpec{"loop pi/2 bare", kPi / 2.0, GaugeChoice::Raw}}) {
    Leg leg;
    leg.name = s.name;
    leg.err100 = loop_err(s.theta, s.gauge, 100.0);
    leg.err1000 = loop_err(s.theta, s.gauge, 1000.0);
    legs.push_back(leg);
  }

  {
    Leg leg;
    leg.name = "open sweep";
    Trajectory path = ramsey_trajectory(kOmega, kPi / 3.0, 0.04 * kPi);
    const double analytic = 0.04 * kPi * 0.5;
    for (double ratio : {100.0, 1000.0}) {
      const double err = std::abs(extract_geometric_phase(path, 1, GaugeChoice::MicrowaveFixed,
                                                          cfg, scaled_constants(ratio))
                                      .geometric -
                                  analytic);
      (ratio == 100.0 ? leg.err100 : leg.err1000) = err;
    }
    legs.push_back(leg);
  }

  {
    Leg leg;
    leg.name = "rectified echo";
    SpindleConfig spindle{kOmega, 0.25, 0.0};
    Trajectory loop = echo_trajectory(spindle, 1);
    std::vector<double> pulses = pi_pulse_times(spindle, 1);
    for (double ratio : {100.0, 1000.0}) {
      const double err =
          std::abs(extract_geometric_phase(loop, 1, GaugeChoice::MicrowaveFixed, cfg,
                                           scaled_constants(ratio), pulses)
                       .geometric -
                   1.0);
      (ratio == 100.0 ? leg.err100 : leg.err1000) = err;
    }
    legs.push_back(leg);
  }

  bool ok = true;
  std::ostringstream detail;
  for (const Leg& leg : legs) {
    // the decrease check only binds while the coarse-ratio error sits above
    // the step-size noise floor
    const bool must_shrink = leg.err100 > 1e-4;
    const bool leg_ok = leg.err100 <= 5e-3 && leg.err1000 <= 5e-3 &&
                        (!must_shrink || leg.err1000 < leg.err100);
    if (!leg_ok) ok = false;
    detail << leg.name << " " << fmt("%.2e/%.2e", leg.err100, leg.err1000)
           << (leg_ok ? "; " : " [off]; ");
  }
  detail << "bound 5e-03 at splitting ratios 100/1000, decreasing";
  report(4, "propagated-vs-analytic agreement", ok, detail.str());
}

void criterion_gauge_geometry() {
  bool ok = true;
  std::ostringstream detail;

  double worst_pair = 0.0;
  for (double theta : {kPi / 3.0, kPi / 2.0, 2.0 * kPi / 3.0}) {
    Trajectory loop = ramsey_trajectory(kOmega, theta, kTwoPi);
    const double raw = geometric_phase(loop, 1, GaugeChoice::Raw).geometric;
    const double mw = geometric_phase(loop, 1, GaugeChoice::MicrowaveFixed).geometric;
    worst_pair = std::max(worst_pair, std::abs(wrap_to_pi(raw - mw)));
  }
  for (double tilt : {0.1, 0.25, 0.4}) {
    SpindleConfig cfg{kOmega, tilt, 0.0};
    Trajectory loop = echo_trajectory(cfg, 1);
    const double raw = geometric_phase(loop, 1, GaugeChoice::Raw).geometric;
    const double mw = geometric_phase(loop, 1, GaugeChoice::MicrowaveFixed).geometric;
    worst_pair = std::max(worst_pair, std::abs(wrap_to_pi(raw - mw)));
  }
  if (worst_pair >= 1e-8) ok = false;

  double worst_cone = 0.0;
  for (double theta : {0.3, 1.0, 2.0}) {
    Trajectory loop = ramsey_trajectory(kOmega, theta, kTwoPi);
    worst_cone =
        std::max(worst_cone, std::abs(solid_angle(loop) - kTwoPi * (1.0 - std::cos(theta))));
  }
  if (worst_cone >= 1e-9) ok = false;

  double worst_spindle = 0.0, worst_flat = 0.0;
  for (double tilt : {0.1, 0.25, 0.4}) {
    SpindleConfig cfg{kOmega, tilt, 0.0};
    Trajectory loop = echo_trajectory(cfg, 1);
    worst_spindle = std::max(worst_spindle, std::abs(solid_angle(loop) - kTwoPi));
    worst_flat = std::max(
        worst_flat, std::abs(geometric_phase(loop, 1, GaugeChoice::MicrowaveFixed).geometric));
  }
  if (worst_spindle >= 1e-8 || worst_flat >= 1e-9) ok = false;

  detail << fmt("gauge pair split %.1e (<1e-8); cone area error %.1e (<1e-9); "
                "spindle area error %.1e (<1e-8); unrectified spindle phase %.1e (<1e-9)",
                worst_pair, worst_cone, worst_spindle, worst_flat);
  report(5, "gauge pairs and swept areas", ok, detail.str());
}

void criterion_unitarity_eigenstructure() {
  PhysicalConstants scaled = scaled_constants(100.0);
  Trajectory loop = ramsey_trajectory(kOmega, kPi / 3.0, kTwoPi);
  SpinState psi0 = analytic_eigenstate({kPi / 3.0, 0.0}, 1, GaugeChoice::Raw);
  PropagationConfig cfg;
  cfg.dt = (loop.t1 - loop.t0) / 1e5;
  auto h_of_t = [&loop, &scaled](double t) {
    return zero_field_hamiltonian({loop.theta_of_t(t), loop.phi_of_t(t)}, scaled);
  };
  const double drift =
      std::abs(propagate(h_of_t, psi0, loop.t0, loop.t1, cfg).norm() - 1.0);

  PhysicalConstants c;
  const double d = c.zero_field_splitting;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_residual = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Orientation o{std::acos(2.0 * u(rng) - 1.0), kTwoPi * u(rng)};
    SpinOperator h = zero_field_hamiltonian(o, c);
    for (GaugeChoice g : {GaugeChoice::Raw, GaugeChoice::MicrowaveFixed}) {
      for (int m : {-1, 0, 1}) {
        SpinState psi = analytic_eigenstate(o, m, g);
        worst_residual = std::max(
            worst_residual,
            (h.matrix * psi.amplitudes - d * static_cast<double>(m * m) * psi.amplitudes).norm());
      }
    }
  }

  const bool ok = drift < 1e-10 && worst_residual < 1e-10 * d;
  report(6, "unitarity and eigenstructure", ok,
         fmt("norm drift %.1e over 1e5 steps (<1e-10); worst eigen-residual %.2e of the "
             "splitting (<1e-10)",
             drift, worst_residual / d));
}

void criterion_readout_statistics() {
  auto variance_over_seeds = [](const ReadoutParams& p, int n_seeds) {
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n_seeds; ++i) {
      const double s = sample_signal(0.5, p, 5000 + static_cast<std::uint64_t>(i));
      sum += s;
      sum_sq += s * s;
    }
    const double mean = sum / n_seeds;
    return sum_sq / n_seeds - mean * mean;
  };

  ReadoutParams gaussian;
  const double target = 1.0 / (2.0 * 0.15 * 0.15 * 10000.0);
  const double var_g = variance_over_seeds(gaussian, 2000);

  ReadoutParams poisson = gaussian;
  poisson.noise = ReadoutParams::Poisson;
  const double var_p = variance_over_seeds(poisson, 2000);

  ReadoutParams fine;
  fine.repetitions = 100000;
  std::vector<ProtocolResult> reps(1000);
  for (ProtocolResult& r : reps) {
    r.phase_estimate = 0.7;
    r.population_m0 = 0.5;
    r.coherence_factor = 1.0;
  }
  EstimateResult est = end_to_end_estimate(reps, fine, 42);
  const double ratio = est.phase_std / phase_uncertainty(fine);

  const bool ok = std::abs(var_g / target - 1.0) <= 0.10 &&
                  std::abs(var_p / target - 1.0) <= 0.10 && ratio >= 0.9 && ratio <= 1.1;
  report(7, "readout statistics", ok,
         fmt("averaged variance / target: %.3f (gaussian), %.3f (counting), both within 10%%; "
             "pooled scatter / resolution %.3f (0.9-1.1)",
             var_g / target, var_p / target, ratio));
}

}  // namespace

int main() {
  criterion_noise_floor();
  criterion_echo_phase();
  criterion_ramsey_law();
  criterion_numeric_oracle();
  criterion_gauge_geometry();
  criterion_unitarity_eigenstructure();
  criterion_readout_statistics();
  if (failures > 0) {
    std::printf("%d of 7 criteria failing\n", failures);
    return 1;
  }
  std::printf("all 7 criteria passing\n");
  return 0;
}
