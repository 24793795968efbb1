#include "nvberry/measurement.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace nvberry {

void validate(const ReadoutParams& p) {
  if (p.repetitions < 1) throw ValidationError("readout repetitions must be at least 1");
  if (!(p.efficiency > 0.0 && p.efficiency <= 1.0))
    throw ValidationError("readout efficiency must lie in (0, 1]");
  if (!(p.dark_to_bright >= 0.0 && p.dark_to_bright < 1.0))
    throw ValidationError("dark_to_bright must lie in [0, 1)");
}

void validate(const SensitivityParams& p) {
  if (!(p.efficiency > 0.0 && p.efficiency <= 1.0))
    throw ValidationError("readout efficiency must lie in (0, 1]");
  if (!(p.omega > 0.0)) throw ValidationError("rotation rate must be positive");
  if (!(p.coherence_time > 0.0)) throw ValidationError("coherence time must be positive");
  if (!(p.overhead > 1.0)) throw ValidationError("overhead must exceed 1");
  if (p.measurement_time < 0.0) throw ValidationError("measurement time must be nonnegative");
  if (!(p.total_time > 0.0)) throw ValidationError("total averaging time must be positive");
}

double signal_uncertainty(const ReadoutParams& p) {
  validate(p);
  const double n = static_cast<double>(p.repetitions);
  return 1.0 / (p.efficiency * std::sqrt(2.0 * n));
}

double phase_uncertainty(const ReadoutParams& p) {
  return 2.0 * signal_uncertainty(p);
}

double bright_yield(const ReadoutParams& p) {
  validate(p);
  const double c = p.efficiency;
  const double r = p.dark_to_bright;
  return 2.0 * c * c * (1.0 + r) / ((1.0 - r) * (1.0 - r) * (2.0 - c * c));
}

double sample_signal(double population, const ReadoutParams& p, std::uint64_t seed) {
  validate(p);
  if (!(population >= 0.0 && population <= 1.0))
    throw ValidationError("population must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  if (p.noise == ReadoutParams::Gaussian) {
    std::normal_distribution<double> noise(0.0, signal_uncertainty(p));
    return population + noise(rng);
  }
  const double n0 = bright_yield(p);
  const double n1 = p.dark_to_bright * n0;
  std::binomial_distribution<std::uint64_t> split(p.repetitions, population);
  const std::uint64_t bright = split(rng);
  const double mean_counts = static_cast<double>(bright) * n0 +
                             static_cast<double>(p.repetitions - bright) * n1;
  std::poisson_distribution<std::uint64_t> counts(mean_counts);
  const double k = static_cast<double>(counts(rng));
  const double n = static_cast<double>(p.repetitions);
  return (k / n - n1) / (n0 - n1);
}

namespace {

double cycle_time(const SensitivityParams& p) {
  return p.measurement_time > 0.0 ? p.measurement_time : p.overhead * p.coherence_time;
}

}  // namespace

double relative_sensitivity(const SensitivityParams& p) {
  validate(p);
  return kTwoPi * std::sqrt(2.0 * cycle_time(p)) /
         (p.efficiency * p.omega * p.coherence_time);
}

double relative_uncertainty(const SensitivityParams& p) {
  return relative_sensitivity(p) / std::sqrt(p.total_time);
}

EstimateResult end_to_end_estimate(std::span<const ProtocolResult> repetitions,
                                   const ReadoutParams& p, std::uint64_t seed) {
  validate(p);
  if (repetitions.size() < 100)
    throw ValidationError("phase estimation needs at least 100 repetitions");

  std::vector<double> estimates;
  estimates.reserve(repetitions.size());
  for (std::size_t i = 0; i < repetitions.size(); ++i) {
    const ProtocolResult& r = repetitions[i];
    if (!(r.coherence_factor > 0.0))
      throw SignalDead("zero fringe contrast leaves the phase unconstrained");
    const double s = sample_signal(r.population_m0, p, seed + i);
    estimates.push_back(r.phase_estimate -
                        2.0 * (s - r.population_m0) / r.coherence_factor);
  }

  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(estimates.size());
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= static_cast<double>(estimates.size() - 1);
  return {mean, std::sqrt(var)};
}

}  // namespace nvberry
