#include "asep/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "asep/error.hpp"

namespace asep {

ModelParams::ModelParams(double p) : p_(p) {
  if (!(p > 0 && p < 1))
    throw Error(ErrorKind::invalid_argument, "p must lie in (0, 1), got " + std::to_string(p));
}

void ObservationPoint::validate() const {
  if (m < 1) throw Error(ErrorKind::invalid_argument, "particle rank m must be >= 1");
  if (!(t >= 0)) throw Error(ErrorKind::invalid_argument, "time t must be >= 0");
}

cplx epsilon(const ModelParams& params, cplx xi) {
  if (xi == cplx(0)) throw Error(ErrorKind::pole_at_origin, "eps(xi) at xi = 0");
  return params.p() / xi + params.q() * xi - 1.0;
}

cplx kernel_K(const ModelParams& params, long x, double t, cplx xi, cplx xi_prime) {
  const double p = params.p(), q = params.q();
  const cplx qxx = q * xi * xi_prime;
  const cplx den = p + qxx - xi;
  if (std::abs(den) < 1e-13 * (1 + std::abs(qxx)))
    throw Error(ErrorKind::kernel_singularity, "p + q xi xi' - xi vanishes (inadmissible contour)");
  if (xi == cplx(0)) {
    if (x < 0 || t > 0) throw Error(ErrorKind::pole_at_origin, "K(xi, xi') at xi = 0");
    return (x == 0 ? 1.0 : 0.0) / den;
  }
  const cplx eps = p / xi + q * xi - 1.0;
  const cplx power = x == 0 ? cplx(1) : std::pow(xi, static_cast<double>(x));
  return power * std::exp(eps * t) / den;
}

double kernel_K0(const ModelParams& params, double z, double z_prime) {
  const double p = params.p(), q = params.q();
  const double expo = -(p * p + q * q) * (z * z + z_prime * z_prime) / 4 + p * q * z * z_prime;
  return std::exp(expo) / std::sqrt(2 * std::numbers::pi);
}

double kernel_K3(const ModelParams& params, double z, double z_prime) {
  const double d = params.q() * z - params.p() * z_prime;
  return std::exp(-d * d / 2) / std::sqrt(2 * std::numbers::pi);
}

double similarity_exponent(const ModelParams& params) {
  const double p = params.p(), q = params.q();
  return (q * q - p * p) / 4;
}

long scaled_site(const ModelParams& params, const ScalingQuery& query) {
  if (!(query.t > 0)) throw Error(ErrorKind::invalid_argument, "scaled_site needs t > 0");
  const double p = params.p(), q = params.q();
  const double x = (p - q) * query.t + (q - p) * query.y * std::sqrt(query.t);
  return std::lround(x);
}

double scaled_coordinate(const ModelParams& params, long x, double t) {
  const double p = params.p(), q = params.q();
  return (static_cast<double>(x) - (p - q) * t) / ((q - p) * std::sqrt(t));
}

double critical_radius(const ModelParams& params) {
  const double p = params.p(), q = params.q();
  return (1 + std::sqrt(1 + 4 * p * q)) / (2 * q);
}

double default_radius(const ModelParams& params) { return 1.25 * critical_radius(params); }

bool is_admissible_radius(const ModelParams& params, double radius) {
  const double p = params.p(), q = params.q();
  return radius > 1 && q * radius * radius - radius - p > 0;
}

}  // namespace asep
