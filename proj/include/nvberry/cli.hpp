#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "nvberry/constants.hpp"
#include "nvberry/eigenstates.hpp"
#include "nvberry/errors.hpp"
#include "nvberry/evolution.hpp"

namespace nvberry {

enum class Command { Berry, Ramsey, Echo, Sensitivity, Sweep };

// all angles are radians, all rates rad/s, all times seconds
struct GeometrySettings {
  double omega = 4000.0 * kPi;  // rotation rate, rad/s
  double theta = kPi / 3.0;     // cone angle for berry and ramsey
  double theta0 = 0.25;         // echo spindle tilt
  double phi0 = 0.04 * kPi;     // ramsey azimuth advance
  int rotations = 4;            // echo rotation count
  double start_offset = 0.0;    // spindle angle at t = 0
  double retard = 0.0;          // closing-pulse phase
  int m = 1;                    // probed sublevel for berry
};

struct NumericSettings {
  GaugeChoice gauge = GaugeChoice::MicrowaveFixed;
  PropagationMethod method = PropagationMethod::PiecewiseExponential;
  double dt = 0.0;                 // s; 0 picks a step from `tolerance`
  double tolerance = 1e-5;         // rad, phase accuracy target of the propagated check
  double splitting_ratio = 100.0;  // level splitting over rotation rate for that check
};

struct DecoherenceSettings {
  enum Kind { Auto, None, T2Star, T2 };
  Kind model = Auto;   // Auto picks t2star for ramsey, t2 for echo
  double t2star = 1e-5;
  double t2 = 2e-3;
};

struct ReadoutSettings {
  std::uint64_t repetitions = 10000;
  double efficiency = 0.15;
  std::string noise = "gaussian";  // gaussian or poisson
  double dark_to_bright = 0.7;
  std::uint64_t seed = 42;
  std::uint64_t estimate_repetitions = 200;
};

struct SensitivitySettings {
  double overhead = 2.0;
  double measurement_time = 0.0;  // s; 0 selects overhead * coherence time
  double total_time = 10800.0;    // s
};

struct ProtocolSettings {
  double splitting_field = 5e-3;  // T, bias field isolating the driven pair
};

struct SweepSettings {
  std::string parameter;          // dotted key, e.g. geometry.theta0
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  std::string target = "ramsey";  // berry, ramsey, echo or sensitivity
};

struct RunConfig {
  Command command = Command::Ramsey;
  GeometrySettings geometry;
  NumericSettings numeric;
  DecoherenceSettings decoherence;
  ReadoutSettings readout;
  SensitivitySettings sensitivity;
  ProtocolSettings protocol;
  SweepSettings sweep;
  bool json = false;       // emit one JSON object per row instead of CSV
  std::string out_path;    // empty writes to the provided stream
};

Command parse_command(const std::string& name);

// key=value file with [section] headers; unknown sections or keys are rejected
// with the offending line
void apply_config_file(RunConfig& cfg, const std::string& path);

// "section.key=value" override; a bare key is accepted when unambiguous
void apply_override(RunConfig& cfg, const std::string& key_value);

void validate(const RunConfig& cfg);

// executes the configured command and emits a header plus one row per record;
// errors are reported on `diag` and mapped to the exit code
int run(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

}  // namespace nvberry
