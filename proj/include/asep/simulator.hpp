#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "asep/model.hpp"

namespace asep {

/// Monte Carlo run description. The infinite step configuration is truncated
/// to particles at 1..N.
struct SimConfig {
  ModelParams params{0.5};
  int m = 1;
  double t = 0;
  long trials = 1;
  std::uint64_t seed = 0;
  std::optional<int> particles;  ///< unset: particle_count_heuristic(m, t)
  double confidence = 0.9999;

  int particle_count() const;
  void validate() const;
};

/// N = m + ceil(3t) + 20.
int particle_count_heuristic(int m, double t);

/// Seed of the RNG stream owned by one trial (splitmix64 of seed and index).
std::uint64_t trial_stream_seed(std::uint64_t seed, std::uint64_t trial_index);

using PositionObserver = std::function<void(std::span<const long>)>;

/// One exact trajectory to time t by uniformization at total rate N; returns
/// x_m(t). `observer`, when set, sees the sorted positions after every event.
long run_trial(const SimConfig& config, std::uint64_t trial_index,
               const PositionObserver& observer = {});

struct EmpiricalCdf {
  std::vector<long> x_values;
  std::vector<double> p_hat;
  std::vector<double> halfwidth;  ///< z * sqrt(p_hat (1 - p_hat) / trials)
  std::vector<double> wilson_lo;
  std::vector<double> wilson_hi;
  long trials = 0;
  std::uint64_t seed = 0;
  double confidence = 0;
  double z = 0;
};

/// Two-sided standard normal critical value for a confidence level.
double normal_critical_value(double confidence);

EmpiricalCdf empirical_cdf(const SimConfig& config, std::span<const long> x_values);

/// Same counts as empirical_cdf, from precomputed trial outcomes.
EmpiricalCdf empirical_cdf_from_samples(const SimConfig& config, std::vector<long> samples,
                                        std::span<const long> x_values);

}  // namespace asep
