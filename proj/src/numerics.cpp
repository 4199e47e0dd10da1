#include "asep/numerics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace asep {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::pole_at_origin: return "pole-at-origin";
    case ErrorKind::kernel_singularity: return "kernel-singularity";
    case ErrorKind::bad_contour: return "bad-contour";
    case ErrorKind::precision_regime: return "precision-regime";
    case ErrorKind::degenerate_tau: return "degenerate-tau";
    case ErrorKind::singular: return "singular-to-working-precision";
    case ErrorKind::no_left_drift: return "no-left-drift";
    case ErrorKind::inner_quadrature_failure: return "inner-quadrature-failure";
    case ErrorKind::empty_sum: return "empty-sum";
    case ErrorKind::degenerate_sample: return "degenerate-sample";
    case ErrorKind::outside_convergence_disk: return "outside-convergence-disk";
  }
  return "unknown";
}

bool is_numerical_failure(ErrorKind kind) noexcept {
  return kind == ErrorKind::precision_regime || kind == ErrorKind::singular ||
         kind == ErrorKind::inner_quadrature_failure;
}

TauPowers::TauPowers(double tau, int max_power) : tau_(tau) {
  if (!(tau > 0)) throw Error(ErrorKind::invalid_argument, "tau must be positive");
  if (max_power < 0) throw Error(ErrorKind::invalid_argument, "negative max power");
  powers_.resize(static_cast<std::size_t>(max_power) + 1);
  double v = 1;
  for (auto& p : powers_) {
    p = v;
    v *= tau;
  }
}

cplx tau_pochhammer(cplx lambda, double tau, int m) {
  if (m < 0) throw Error(ErrorKind::invalid_argument, "tau_pochhammer needs m >= 0");
  cplx prod = 1;
  double tp = 1;
  for (int j = 0; j < m; ++j) {
    prod *= 1.0 - lambda * tp;
    tp *= tau;
  }
  return prod;
}

double tau_binomial(int N, int n, double tau) {
  if (std::abs(tau - 1) < 1e-12)
    throw Error(ErrorKind::degenerate_tau, "tau-binomial at tau = 1");
  if (n < 0 || n > N) return 0;
  double r = 1;
  for (int i = 0; i < n; ++i)
    r *= (1 - std::pow(tau, N - i)) / (1 - std::pow(tau, i + 1));
  return r;
}

CircleRule circle_rule(double radius, int n) {
  if (!(radius > 0)) throw Error(ErrorKind::invalid_argument, "circle radius must be positive");
  if (n < 8 || n % 2 != 0)
    throw Error(ErrorKind::invalid_argument, "circle rule needs an even node count >= 8");
  CircleRule rule;
  rule.radius = radius;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double theta = 2 * std::numbers::pi * j / n;
    const cplx xi = std::polar(radius, theta);
    rule.nodes[static_cast<std::size_t>(j)] = xi;
    rule.weights[static_cast<std::size_t>(j)] = xi / static_cast<double>(n);
  }
  return rule;
}

IntervalRule legendre_rule(double a, double b, int n) {
  if (!(a < b)) throw Error(ErrorKind::invalid_argument, "legendre_rule needs a < b");
  if (n < 2) throw Error(ErrorKind::invalid_argument, "legendre_rule needs n >= 2");
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) {
        // refresh the derivative at the converged node
        p0 = 1;
        p1 = 0;
        for (int j = 1; j <= n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j - 1) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1);
        break;
      }
    }
    const double wi = 2 / ((1 - z * z) * dp * dp);
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0;

  IntervalRule rule;
  rule.a = a;
  rule.b = b;
  rule.nodes.resize(x.size());
  rule.weights.resize(x.size());
  const double mid = 0.5 * (a + b);
  const double half_len = 0.5 * (b - a);
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.nodes[i] = mid + half_len * x[i];
    rule.weights[i] = half_len * w[i];
  }
  return rule;
}

cplx det_complex(const ComplexMatrix& m) {
  for (const auto& v : m.data())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorKind::invalid_argument, "non-finite matrix entry");
  return lu_determinant(m);
}

double hermite_poly(int i, double u) {
  if (i < 0) throw Error(ErrorKind::invalid_argument, "hermite_poly needs i >= 0");
  if (i == 0) return 1;
  double h0 = 1, h1 = 2 * u;
  for (int k = 1; k < i; ++k) {
    const double h2 = 2 * u * h1 - 2 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace asep
