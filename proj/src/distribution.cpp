#include "asep/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "asep/error.hpp"
#include "asep/kernels.hpp"

namespace asep {

namespace {

void check_rank(int m) {
  if (m < 1) throw Error(ErrorKind::invalid_argument, "m must be >= 1");
}

CdfResult finish(CdfResult r) {
  r.presentation = std::clamp(r.value, 0.0, 1.0);
  return r;
}

// (1/2 pi i) * contour integral of det(I - lambda q A) / ((lambda; tau)_m lambda).
cplx lambda_integral(const NystromOperator& op, const LambdaContour& contour, int m) {
  const double q = op.params.q(), tau = op.params.tau();
  const auto rule = circle_rule(contour.radius, contour.nodes);
  std::vector<cplx> mus(rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) mus[j] = q * rule.nodes[j];
  const auto dets = DeterminantSweep(op).evaluate(mus);
  cplx s = 0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const cplx lambda = rule.nodes[j];
    s += rule.weights[j] * dets[j] / (tau_pochhammer(lambda, tau, m) * lambda);
  }
  return s;
}

LambdaContour contour_for(const ModelParams& params, int m, const CdfOptions& options) {
  auto c = LambdaContour::for_rank(params, m, options.lambda_nodes);
  if (options.lambda_radius) c.radius = *options.lambda_radius;
  c.validate(params, m);
  return c;
}

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

LambdaContour LambdaContour::for_rank(const ModelParams& params, int m, int nodes) {
  check_rank(m);
  LambdaContour c;
  c.radius = 1.5 * std::max(1.0, std::pow(params.tau(), -(m - 1)));
  c.nodes = nodes;
  return c;
}

void LambdaContour::validate(const ModelParams& params, int m) const {
  const double outer_pole = std::max(1.0, std::pow(params.tau(), -(m - 1)));
  if (!(radius > outer_pole))
    throw Error(ErrorKind::bad_contour, "lambda radius must enclose every pole tau^{-j}, j < m");
  if (nodes < 64) throw Error(ErrorKind::invalid_argument, "lambda contour needs >= 64 nodes");
}

std::string to_string(CdfMethod method) {
  switch (method) {
    case CdfMethod::contour: return "contour";
    case CdfMethod::residue: return "residue";
    case CdfMethod::series_partial: return "series";
    case CdfMethod::limit: return "limit";
  }
  return "unknown";
}

CdfResult cdf_contour(const ModelParams& params, int m, long x, double t,
                      const CdfOptions& options) {
  ObservationPoint{m, x, t}.validate();
  const auto contour = contour_for(params, m, options);
  const auto op = nystrom_K(params, x, t, options.engine);
  const cplx v = lambda_integral(op, contour, m);

  CdfResult r;
  r.method = CdfMethod::contour;
  r.value = v.real();
  r.err_estimate = std::abs(v.imag());
  r.diagnostics["imag_residue"] = std::abs(v.imag());
  r.diagnostics["xi_radius"] = std::get<CircleRule>(op.rule).radius;
  r.diagnostics["xi_nodes"] = static_cast<double>(op.size());
  r.diagnostics["lambda_radius"] = contour.radius;
  r.diagnostics["lambda_nodes"] = contour.nodes;
  r.diagnostics["max_entry"] = op.info.max_entry;
  if (options.estimate_error) {
    auto fine_engine = options.engine;
    fine_engine.nodes = 2 * static_cast<int>(op.size());
    auto fine_contour = contour;
    fine_contour.nodes *= 2;
    const auto fine = lambda_integral(nystrom_K(params, x, t, fine_engine), fine_contour, m);
    const double delta = std::abs(fine.real() - r.value);
    r.diagnostics["doubling_delta"] = delta;
    r.err_estimate = std::max(r.err_estimate, delta);
  }
  return finish(r);
}

double residue_weight(double tau, int m, int i) {
  double d = 1;
  for (int j = 0; j < m; ++j)
    if (j != i) d *= 1 - std::pow(tau, j - i);
  return 1 / d;
}

CdfResult cdf_residue(const ModelParams& params, int m, long x, double t,
                      const CdfOptions& options) {
  ObservationPoint{m, x, t}.validate();
  const double tau = params.tau(), q = params.q();
  if (std::abs(tau - 1) <= 1e-8)
    throw Error(ErrorKind::degenerate_tau, "use the contour method when tau == 1");

  auto tail = [&](const NystromOperator& op) {
    cplx s = 0;
    for (int i = 0; i < m; ++i)
      s += residue_weight(tau, m, i) * fredholm_det(op, q * std::pow(tau, -i));
    return s;
  };
  const auto op = nystrom_K(params, x, t, options.engine);
  const cplx above = tail(op);

  CdfResult r;
  r.method = CdfMethod::residue;
  r.value = 1 - above.real();
  r.err_estimate = std::abs(above.imag());
  r.diagnostics["imag_residue"] = std::abs(above.imag());
  r.diagnostics["xi_radius"] = std::get<CircleRule>(op.rule).radius;
  r.diagnostics["xi_nodes"] = static_cast<double>(op.size());
  if (options.estimate_error) {
    auto fine_engine = options.engine;
    fine_engine.nodes = 2 * static_cast<int>(op.size());
    const double delta = std::abs(tail(nystrom_K(params, x, t, fine_engine)).real() - above.real());
    r.diagnostics["doubling_delta"] = delta;
    r.err_estimate = std::max(r.err_estimate, delta);
  }
  return finish(r);
}

double series_coefficient(const ModelParams& params, int m, int k) {
  const double p = params.p(), q = params.q(), tau = params.tau();
  const int d = k - m;
  const double binom =
      std::abs(tau - 1) < 1e-12 ? binomial(k - 1, d) : tau_binomial(k - 1, d, tau);
  double factorial = 1;
  for (int i = 2; i <= k; ++i) factorial *= i;
  const double sign = m % 2 == 0 ? 1.0 : -1.0;
  return sign * binom / factorial * std::pow(p, d * (d + 1) / 2.0) *
         std::pow(q, k * m + d * (k + m - 1) / 2.0);
}

CdfResult cdf_series_partial(const ModelParams& params, int m, long x, double t, int k_max,
                             const SeriesOptions& options) {
  ObservationPoint{m, x, t}.validate();
  if (k_max < m) throw Error(ErrorKind::empty_sum, "the series starts at k = m");
  if (k_max > 4) throw Error(ErrorKind::invalid_argument, "series is implemented for k_max <= 4");
  const double radius = options.radius.value_or(default_radius(params));
  if (!is_admissible_radius(params, radius))
    throw Error(ErrorKind::bad_contour, "inadmissible xi radius for the series");
  static const int default_nodes[4] = {128, 128, 64, 32};
  const double p = params.p(), q = params.q();

  CdfResult r;
  r.method = CdfMethod::series_partial;
  r.diagnostics["xi_radius"] = radius;
  cplx total = 0;
  double last = 0;
  for (int k = m; k <= k_max; ++k) {
    const auto idx = static_cast<std::size_t>(k - 1);
    const int n = idx < options.nodes_per_order.size() ? options.nodes_per_order[idx]
                                                       : default_nodes[idx];
    const auto rule = circle_rule(radius, n);
    std::vector<cplx> single(rule.size());
    ComplexMatrix pair(rule.size(), rule.size());
    for (std::size_t a = 0; a < rule.size(); ++a) {
      const cplx xi = rule.nodes[a];
      single[a] = rule.weights[a] * std::pow(xi, static_cast<double>(x)) *
                  std::exp(epsilon(params, xi) * t) / ((1.0 - xi) * (q * xi - p));
      for (std::size_t b = 0; b < rule.size(); ++b)
        if (a != b) pair(a, b) = (rule.nodes[b] - xi) / (p + q * xi * rule.nodes[b] - xi);
    }
    const cplx term = series_coefficient(params, m, k) *
                      kernels::parallel::tensor_series_sum(pair, single, k);
    total += term;
    last = std::abs(term);
    r.diagnostics["term_" + std::to_string(k)] = term.real();
    r.diagnostics["nodes_" + std::to_string(k)] = n;
  }
  r.value = total.real();
  r.diagnostics["imag_residue"] = std::abs(total.imag());
  r.diagnostics["last_term"] = last;
  r.diagnostics["k_max"] = k_max;
  r.err_estimate = std::max(std::abs(total.imag()), last);
  return finish(r);
}

CdfResult limit_cdf(const ModelParams& params, int m, double y, const LimitOptions& options) {
  check_rank(m);
  if (!params.left_drift()) throw Error(ErrorKind::no_left_drift, "limit requires p < q");
  const auto contour = LambdaContour::for_rank(params, m, options.lambda_nodes);
  contour.validate(params, m);
  const auto op = nystrom_K0(params, y, options.nodes);
  const cplx v = lambda_integral(op, contour, m);

  CdfResult r;
  r.method = CdfMethod::limit;
  r.value = v.real();
  r.err_estimate = std::abs(v.imag());
  r.diagnostics["imag_residue"] = std::abs(v.imag());
  r.diagnostics["z_nodes"] = options.nodes;
  r.diagnostics["z_lower"] = op.info.lower;
  r.diagnostics["z_upper"] = op.info.upper;
  r.diagnostics["lambda_radius"] = contour.radius;
  if (options.estimate_error) {
    const auto fine = lambda_integral(nystrom_K0(params, y, 2 * options.nodes), contour, m);
    const double delta = std::abs(fine.real() - r.value);
    r.diagnostics["doubling_delta"] = delta;
    r.err_estimate = std::max(r.err_estimate, delta);
  }
  return finish(r);
}

double limit_trace(const ModelParams& params, int n, double y, int nodes) {
  if (!params.left_drift()) throw Error(ErrorKind::no_left_drift, "limit requires p < q");
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  if (n == 1) {
    const double c = params.q() - params.p();
    return normal_cdf(c * y) / c;
  }
  return trace_power(nystrom_K0(params, y, nodes), n).real();
}

}  // namespace asep
