#include "asep/identities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <boost/multiprecision/complex128.hpp>

#include "asep/error.hpp"
#include "asep/fredholm.hpp"
#include "asep/numerics.hpp"

namespace asep {

using boost::multiprecision::complex128;
using boost::multiprecision::float128;

namespace {

double rel_err(cplx a, cplx b) {
  const double den = std::abs(a) + std::abs(b);
  return den == 0 ? 0 : std::abs(a - b) / den;
}

void degenerate(const char* what) { throw Error(ErrorKind::degenerate_sample, what); }

void require_distinct(std::span<const cplx> z) {
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j)
      if (z[i] == z[j]) degenerate("sample points must be distinct");
}

double min_pairwise(std::span<const cplx> z) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) d = std::min(d, std::abs(z[i] - z[j]));
  return d;
}

// Right side of the xi-determinant identity.
cplx xi_product(const ModelParams& params, std::span<const cplx> xi) {
  const double p = params.p(), q = params.q();
  const auto k = static_cast<int>(xi.size());
  cplx r = (k % 2 == 0 ? 1.0 : -1.0) * std::pow(p * q, k * (k - 1) / 2.0);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    r /= (1.0 - xi[i]) * (q * xi[i] - p);
    for (std::size_t j = 0; j < xi.size(); ++j)
      if (i != j) r *= (xi[j] - xi[i]) / (p + q * xi[i] * xi[j] - xi[i]);
  }
  return r;
}

IdentityReport make_report(std::string name, double tol) {
  IdentityReport r;
  r.name = std::move(name);
  r.tolerance = tol;
  return r;
}

void record(IdentityReport& r, double err, std::span<const cplx> input) {
  const double e = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
  if (++r.sample_count == 1 || e > r.max_relative_error) {
    r.max_relative_error = e;
    r.worst_case_input = describe(input);
  }
}

void close(IdentityReport& r) { r.pass = r.max_relative_error < r.tolerance; }

std::string fmt(const char* pattern, double a, double b = 0) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

}  // namespace

std::string describe(std::span<const cplx> points) {
  std::string s = "[";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) s += ", ";
    s += fmt("%.17g%+.17gi", points[i].real(), points[i].imag());
  }
  return s + "]";
}

IdentityCheck check_det_identity(const ModelParams& params, std::span<const cplx> xi,
                                 Precision precision) {
  const double p = params.p(), q = params.q();
  if (xi.empty()) throw Error(ErrorKind::invalid_argument, "need at least one point");
  require_distinct(xi);
  for (const auto& z : xi) {
    if (std::abs(z - 1.0) < 1e-14 || std::abs(q * z - p) < 1e-14)
      degenerate("xi must avoid 1 and p/q");
  }
  const std::size_t k = xi.size();
  ComplexMatrix a(k, k);
  Matrix<complex128> wide(k, k);
  const float128 p128 = p, q128 = float128(1) - p128;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const cplx den = p + q * xi[i] * xi[j] - xi[i];
      if (std::abs(den) < 1e-14) degenerate("vanishing denominator p + q xi_i xi_j - xi_i");
      a(i, j) = 1.0 / den;
      const complex128 zi(xi[i].real(), xi[i].imag()), zj(xi[j].real(), xi[j].imag());
      wide(i, j) = complex128(1) / (complex128(p128) + complex128(q128) * zi * zj - zi);
    }
  IdentityCheck c;
  if (precision == Precision::extended) {
    const complex128 d = lu_determinant(std::move(wide));
    c.lhs = {static_cast<double>(d.real()), static_cast<double>(d.imag())};
  } else {
    c.lhs = det_complex(a);
  }
  c.rhs = xi_product(params, xi);
  c.rel_err = rel_err(c.lhs, c.rhs);
  return c;
}

IdentityCheck cauchy_closed_form(std::span<const cplx> eta, double tau) {
  if (eta.empty()) throw Error(ErrorKind::invalid_argument, "need at least one point");
  require_distinct(eta);
  const std::size_t k = eta.size();
  ComplexMatrix a(k, k);
  cplx den = 1;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const cplx d = eta[i] - tau * eta[j];
      if (std::abs(d) < 1e-14) degenerate("eta_i == tau eta_j");
      a(i, j) = 1.0 / d;
      den *= d;
    }
  cplx num = 1;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) num *= (eta[i] - eta[j]) * (tau * eta[j] - tau * eta[i]);
  IdentityCheck c;
  c.lhs = det_complex(a);
  c.rhs = num / den;
  c.rel_err = rel_err(c.lhs, c.rhs);
  return c;
}

IdentityCheck check_eta_substitution(const ModelParams& params, std::span<const cplx> eta) {
  const double p = params.p(), tau = params.tau();
  if (std::abs(tau - 1) < 1e-12) throw Error(ErrorKind::degenerate_tau, "substitution needs tau != 1");
  const auto k = static_cast<int>(eta.size());
  require_distinct(eta);
  std::vector<cplx> xi;
  cplx eta_side = (k % 2 == 0 ? 1.0 : -1.0) * std::pow(tau, k * (k - 1) / 2.0) /
                  (std::pow(p, k) * std::pow(1 - tau, 2 * k));
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (std::abs(eta[i]) < 1e-14 || std::abs(eta[i] + 1 / tau) < 1e-14)
      degenerate("eta must avoid 0 and -1/tau");
    xi.push_back((eta[i] + 1.0) / (eta[i] + 1 / tau));
    const cplx b = 1.0 + tau * eta[i];
    eta_side *= b * b / eta[i];
    for (std::size_t j = 0; j < eta.size(); ++j)
      if (i != j) eta_side *= (eta[i] - eta[j]) / (eta[i] - tau * eta[j]);
  }
  IdentityCheck c;
  c.lhs = eta_side;
  c.rhs = xi_product(params, xi);
  c.rel_err = rel_err(c.lhs, c.rhs);
  return c;
}

GenFunctionCheck check_gen_function(int m, double tau, cplx z, int k_trunc) {
  if (m < 1) throw Error(ErrorKind::invalid_argument, "m must be >= 1");
  if (k_trunc < m) throw Error(ErrorKind::invalid_argument, "k_trunc must be >= m");
  if (!(tau > 0)) throw Error(ErrorKind::invalid_argument, "tau must be positive");
  const double disk = std::min(1.0, std::pow(tau, -(m - 1))) / 2;
  if (!(std::abs(z) < disk))
    throw Error(ErrorKind::outside_convergence_disk,
                "|z| must be below min(1, tau^{-(m-1)}) / 2 = " + std::to_string(disk));
  const bool flat = std::abs(tau - 1) < 1e-12;
  auto coef = [&](int k) {
    if (!flat) return tau_binomial(k - 1, k - m, tau);
    double r = 1;
    for (int i = 1; i <= m - 1; ++i) r = r * (k - m + i) / i;
    return r;
  };
  GenFunctionCheck g;
  double magnitude = 0;
  for (int k = m; k <= k_trunc; ++k) {
    const cplx term = coef(k) * std::pow(z, k);
    g.lhs_partial += term;
    magnitude += std::abs(term);
  }
  g.rounding = 64 * std::numeric_limits<double>::epsilon() * magnitude;
  g.rhs = 1;
  for (int j = 1; j <= m; ++j) g.rhs *= z / (1.0 - std::pow(tau, m - j) * z);
  g.error = std::abs(g.lhs_partial - g.rhs);

  // Coefficient ratio c_{k+1}/c_k = (1 - tau^k)/(1 - tau^{k-m+1}), bounded for k > k_trunc.
  const int k1 = k_trunc + 1;
  double ratio;
  if (flat) {
    ratio = static_cast<double>(k1) / (k1 - m + 1);
  } else {
    const double hi = std::max(1.0, tau), lo = std::min(tau, 1 / tau);
    ratio = std::pow(hi, m - 1) / (1 - std::pow(lo, k1 - m + 1));
  }
  const double rho = std::abs(z) * ratio;
  const double next = std::abs(coef(k1)) * std::pow(std::abs(z), k1);
  g.bound = rho < 1 ? next / (1 - rho) : std::numeric_limits<double>::infinity();
  return g;
}

double eigenfunction_residual(const ModelParams& params, int i, int nodes) {
  if (i < 0 || i > 8) throw Error(ErrorKind::invalid_argument, "eigenfunction index must be 0..8");
  const auto op = nystrom_K0(params, std::nullopt, nodes);
  const auto& rule = std::get<IntervalRule>(op.rule);
  const double p = params.p(), q = params.q();
  const double c = q * q - p * p;
  const double lambda = std::pow(params.tau(), i) / q;
  std::vector<double> f(rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double z = rule.nodes[j];
    f[j] = std::exp(-c * z * z / 4) * hermite_poly(i, std::sqrt(c / 2) * z);
  }
  double num = 0, den = 0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    double kf = 0;
    for (std::size_t k = 0; k < rule.size(); ++k) kf += op.matrix(j, k).real() * f[k];
    const double r = kf - lambda * f[j];
    num += rule.weights[j] * r * r;
    den += rule.weights[j] * f[j] * f[j];
  }
  return std::sqrt(num / den);
}

IdentitySampler::IdentitySampler(std::uint64_t seed) : rng_(seed) {}

double IdentitySampler::uniform() { return std::uniform_real_distribution<double>(0, 1)(rng_); }

std::vector<cplx> IdentitySampler::circle_points(const ModelParams& params, int k) {
  const double r = default_radius(params);
  for (;;) {
    std::vector<cplx> z;
    for (int i = 0; i < k; ++i) z.push_back(std::polar(r, 2 * std::numbers::pi * uniform()));
    if (min_pairwise(z) >= 1e-3) return z;
  }
}

std::vector<cplx> IdentitySampler::annulus_points(int k, double tau) {
  for (;;) {
    std::vector<cplx> z;
    for (int i = 0; i < k; ++i)
      z.push_back(std::polar(0.5 + 1.5 * uniform(), 2 * std::numbers::pi * uniform()));
    bool ok = min_pairwise(z) >= 1e-3;
    for (const auto& a : z) {
      ok = ok && std::abs(a + 1 / tau) >= 1e-3;
      for (const auto& b : z) ok = ok && std::abs(a - tau * b) >= 1e-3;
    }
    if (ok) return z;
  }
}

std::vector<IdentityReport> run_identity_suite(std::uint64_t seed) {
  std::vector<IdentityReport> out;
  IdentitySampler sampler(seed);
  constexpr int samples = 100;

  for (double p : {0.2, 0.45}) {
    const ModelParams params(p);
    for (int k = 1; k <= 5; ++k) {
      auto r = make_report(fmt("det_identity k=%g p=%g", k, p), 1e-10);
      for (int s = 0; s < samples; ++s) {
        const auto xi = sampler.circle_points(params, k);
        record(r, check_det_identity(params, xi).rel_err, xi);
      }
      close(r);
      out.push_back(std::move(r));
    }
  }

  for (int k = 1; k <= 6; ++k) {
    auto r = make_report(fmt("cauchy k=%g tau=%g", k, 0.5), 1e-10);
    for (int s = 0; s < samples; ++s) {
      const auto eta = sampler.annulus_points(k, 0.5);
      record(r, cauchy_closed_form(eta, 0.5).rel_err, eta);
    }
    close(r);
    out.push_back(std::move(r));
  }

  for (double p : {0.2, 0.45}) {
    const ModelParams params(p);
    auto r = make_report(fmt("eta_substitution k<=5 p=%g", p), 1e-10);
    for (int k = 1; k <= 5; ++k)
      for (int s = 0; s < samples; ++s) {
        const auto eta = sampler.annulus_points(k, params.tau());
        record(r, check_eta_substitution(params, eta).rel_err, eta);
      }
    close(r);
    out.push_back(std::move(r));
  }

  for (int m = 1; m <= 4; ++m) {
    auto r = make_report(fmt("gen_function m=%g z=%g K=60", m, 0.1), 1e-12);
    const cplx z = 0.1;
    const auto g = check_gen_function(m, 0.5, z, 60);
    record(r, g.error, std::span<const cplx>(&z, 1));
    close(r);
    out.push_back(std::move(r));
  }
  {
    // error measured against the declared tail plus rounding allowance; pass iff ratio < 1
    auto r = make_report("gen_function tail bound m=3 z=0.2 K=80", 1.0);
    const cplx z = 0.2;
    const auto g = check_gen_function(3, 0.5, z, 80);
    record(r, g.error / (g.bound + g.rounding), std::span<const cplx>(&z, 1));
    close(r);
    out.push_back(std::move(r));
  }

  const ModelParams mehler(0.3);
  for (int i = 0; i <= 5; ++i) {
    auto r = make_report(fmt("eigenfunction i=%g p=%g", i, 0.3), 1e-5);
    r.sample_count = 1;
    r.max_relative_error = eigenfunction_residual(mehler, i);
    r.worst_case_input = "n=200";
    close(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<IdentityReport> run_engine_invariants() {
  std::vector<IdentityReport> out;
  const ModelParams params(0.3);
  const double q = params.q();

  {
    auto r = make_report("det at mu=0 is exactly 1", 1e-300);
    const auto op = nystrom_K(params, -2, 1.0);
    const double e = std::abs(fredholm_det(op, 0) - 1.0) + std::abs(DeterminantSweep(op)(0) - 1.0);
    r.sample_count = 1;
    r.max_relative_error = e;
    r.pass = e == 0;
    out.push_back(std::move(r));
  }
  {
    auto radius = make_report("contour radius independence (R vs 1.3R)", 1e-8);
    auto nodes = make_report("node doubling 128 -> 256", 1e-8);
    auto sweep = make_report("Hessenberg sweep vs LU", 1e-10);
    for (double t : {0.5, 2.0, 5.0})
      for (long x = -6; x <= 6; x += 3) {
        const cplx in[2] = {cplx(static_cast<double>(x)), cplx(t)};
        const auto base = nystrom_K(params, x, t);
        const cplx d = fredholm_det(base, q);
        KOptions wide;
        wide.radius = 1.3 * default_radius(params);
        record(radius, std::abs(fredholm_det(nystrom_K(params, x, t, wide), q) - d), in);
        KOptions fine;
        fine.nodes = 256;
        record(nodes, std::abs(fredholm_det(nystrom_K(params, x, t, fine), q) - d), in);
        record(sweep, std::abs(DeterminantSweep(base)(q) - d), in);
      }
    for (auto* r : {&radius, &nodes, &sweep}) {
      close(*r);
      out.push_back(std::move(*r));
    }
  }
  {
    // log det(I - mu A) = -sum_n mu^n tr(A^n) / n, with |mu| ||A||_F = 0.1 and 12 terms
    auto r = make_report("trace expansion of log det", 1e-10);
    const auto op = nystrom_K(params, 1, 1.0, KOptions{std::nullopt, 64, Precision::binary64});
    double fro = 0;
    for (const auto& v : op.matrix.data()) fro += std::norm(v);
    const cplx mu = std::polar(0.1 / std::sqrt(fro), 0.7);
    cplx series = 0;
    for (int n = 1; n <= 12; ++n) series -= std::pow(mu, n) * trace_power(op, n) / double(n);
    const cplx direct = std::log(fredholm_det(op, mu));
    const cplx in[1] = {mu};
    record(r, std::abs(series - direct), in);
    close(r);
    out.push_back(std::move(r));
  }
  {
    auto r = make_report("K0 eigenvalues tau^i/q, i<=6 (relative)", 1e-6);
    const auto es = k0_eigensystem(nystrom_K0(params, std::nullopt));
    for (int i = 0; i <= 6; ++i) {
      const double expect = std::pow(params.tau(), i) / q;
      const cplx in[1] = {cplx(i)};
      record(r, std::abs(es.values[static_cast<std::size_t>(i)] - expect) / expect, in);
    }
    close(r);
    out.push_back(std::move(r));
  }
  {
    auto r = make_report("det(I - q tau^-i K0) = 0, i<=3", 1e-6);
    const auto op = nystrom_K0(params, std::nullopt);
    for (int i = 0; i <= 3; ++i) {
      const cplx in[1] = {cplx(i)};
      record(r, std::abs(fredholm_det(op, q * std::pow(params.tau(), -i))), in);
    }
    close(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace asep
