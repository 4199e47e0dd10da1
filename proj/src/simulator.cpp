#include "asep/simulator.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <random>

#include "asep/error.hpp"
#include "asep/kernels.hpp"

namespace asep {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(std::mt19937_64& eng, std::size_t n) {
  const unsigned __int128 prod = static_cast<unsigned __int128>(eng()) * n;
  return static_cast<std::size_t>(prod >> 64);
}

}  // namespace

int particle_count_heuristic(int m, double t) {
  return m + static_cast<int>(std::ceil(3 * t)) + 20;
}

int SimConfig::particle_count() const {
  return particles ? *particles : particle_count_heuristic(m, t);
}

void SimConfig::validate() const {
  if (m < 1) throw Error(ErrorKind::invalid_argument, "particle rank m must be >= 1");
  if (!(t >= 0)) throw Error(ErrorKind::invalid_argument, "time t must be >= 0");
  if (trials < 1) throw Error(ErrorKind::invalid_argument, "trials must be >= 1");
  if (particle_count() < m) throw Error(ErrorKind::invalid_argument, "particle count below m");
  if (!(confidence > 0 && confidence < 1))
    throw Error(ErrorKind::invalid_argument, "confidence must lie in (0, 1)");
}

std::uint64_t trial_stream_seed(std::uint64_t seed, std::uint64_t trial_index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(trial_index + 0x632be59bd9b4e019ULL));
}

long run_trial(const SimConfig& config, std::uint64_t trial_index,
               const PositionObserver& observer) {
  const std::size_t n = static_cast<std::size_t>(config.particle_count());
  std::vector<long> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = static_cast<long>(i) + 1;

  std::mt19937_64 eng(trial_stream_seed(config.seed, trial_index));
  const double rate = static_cast<double>(n);
  const double p = config.params.p();
  double clock = 0;
  for (;;) {
    clock += -std::log1p(-uniform01(eng)) / rate;
    if (clock > config.t) break;
    const std::size_t i = uniform_index(eng, n);
    // Blocked attempts are no-ops: the clock is memoryless.
    if (uniform01(eng) < p) {
      if (i + 1 == n || pos[i + 1] != pos[i] + 1) ++pos[i];
    } else {
      if (i == 0 || pos[i - 1] != pos[i] - 1) --pos[i];
    }
    if (observer) observer(pos);
  }
  return pos[static_cast<std::size_t>(config.m - 1)];
}

double normal_critical_value(double confidence) {
  boost::math::normal standard;
  return boost::math::quantile(standard, 1 - (1 - confidence) / 2);
}

EmpiricalCdf empirical_cdf_from_samples(const SimConfig& config, std::vector<long> samples,
                                        std::span<const long> x_values) {
  if (!std::is_sorted(x_values.begin(), x_values.end()))
    throw Error(ErrorKind::invalid_argument, "x_values must be sorted");
  std::sort(samples.begin(), samples.end());

  EmpiricalCdf out;
  out.x_values.assign(x_values.begin(), x_values.end());
  out.trials = static_cast<long>(samples.size());
  out.seed = config.seed;
  out.confidence = config.confidence;
  out.z = normal_critical_value(config.confidence);
  const double n = static_cast<double>(samples.size());
  const double z2 = out.z * out.z;
  for (long x : x_values) {
    const auto count = std::upper_bound(samples.begin(), samples.end(), x) - samples.begin();
    const double ph = static_cast<double>(count) / n;
    out.p_hat.push_back(ph);
    out.halfwidth.push_back(out.z * std::sqrt(ph * (1 - ph) / n));
    const double denom = 1 + z2 / n;
    const double centre = (ph + z2 / (2 * n)) / denom;
    const double half = out.z / denom * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n));
    out.wilson_lo.push_back(std::clamp(centre - half, 0.0, ph));
    out.wilson_hi.push_back(std::clamp(centre + half, ph, 1.0));
  }
  return out;
}

EmpiricalCdf empirical_cdf(const SimConfig& config, std::span<const long> x_values) {
  config.validate();
  return empirical_cdf_from_samples(config, kernels::parallel::simulate_trials(config), x_values);
}

}  // namespace asep
