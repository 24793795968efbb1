#pragma once

#include <cstdint>
#include <span>

#include "nvberry/errors.hpp"
#include "nvberry/protocols.hpp"

namespace nvberry {

// photon-counting readout of the m = 0 population
struct ReadoutParams {
  enum NoiseKind { Gaussian, Poisson };
  std::uint64_t repetitions = 10000;  // shots averaged per signal point
  double efficiency = 0.15;           // fringe contrast of the optical readout
  NoiseKind noise = Gaussian;
  double dark_to_bright = 0.7;        // dark-state photon yield over bright-state yield
};

struct SensitivityParams {
  double efficiency = 0.15;       // readout contrast
  double omega = 4000.0 * kPi;    // rotation rate, rad/s
  double coherence_time = 2e-3;   // envelope time of the chosen protocol, s
  double overhead = 2.0;          // cycle time as a multiple of coherence_time
  double measurement_time = 0.0;  // cycle time, s; 0 selects overhead * coherence_time
  double total_time = 10800.0;    // averaging time, s
};

struct EstimateResult {
  double phase_mean;  // rad
  double phase_std;   // rad, sample standard deviation over repetitions
};

void validate(const ReadoutParams& p);
void validate(const SensitivityParams& p);

// one-sigma width of the averaged population signal
double signal_uncertainty(const ReadoutParams& p);

// phase resolution at the half-fringe operating point, rad
double phase_uncertainty(const ReadoutParams& p);

// mean photons per bright shot that reproduces signal_uncertainty at
// population 1/2 for the counting noise model
double bright_yield(const ReadoutParams& p);

// draw one noisy population estimate; identical seeds give identical draws
double sample_signal(double population, const ReadoutParams& p, std::uint64_t seed);

// fractional rotation-rate noise floor per root hertz of averaging bandwidth
double relative_sensitivity(const SensitivityParams& p);

// fractional rotation-rate error after averaging for total_time
double relative_uncertainty(const SensitivityParams& p);

// simulate readout of each repetition (seeded seed + index), invert the fringe
// around its operating point, and pool the per-repetition phase estimates
EstimateResult end_to_end_estimate(std::span<const ProtocolResult> repetitions,
                                   const ReadoutParams& p, std::uint64_t seed);

}  // namespace nvberry
