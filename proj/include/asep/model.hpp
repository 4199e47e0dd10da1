#pragma once

#include <complex>

#include "asep/matrix.hpp"

namespace asep {

/// Hop probabilities. q is derived from p so that p + q == 1 exactly as
/// constructed; tau = p / q is recomputed on access.
class ModelParams {
 public:
  explicit ModelParams(double p);

  double p() const noexcept { return p_; }
  double q() const noexcept { return 1.0 - p_; }
  double tau() const noexcept { return p_ / q(); }
  bool left_drift() const noexcept { return p_ < q(); }

 private:
  double p_;
};

/// Position of the m-th left-most particle, queried at site x and time t.
struct ObservationPoint {
  int m = 1;
  long x = 0;
  double t = 0;

  void validate() const;
};

/// Scaled position y at time t; maps to x = (p-q)t + (q-p) y sqrt(t).
struct ScalingQuery {
  double y = 0;
  double t = 1;
};

/// eps(xi) = p/xi + q xi - 1.
cplx epsilon(const ModelParams& params, cplx xi);

/// K(xi, xi') = xi^x e^{eps(xi) t} / (p + q xi xi' - xi).
cplx kernel_K(const ModelParams& params, long x, double t, cplx xi, cplx xi_prime);

/// Symmetrized Mehler kernel.
double kernel_K0(const ModelParams& params, double z, double z_prime);

/// Unsymmetrized Gaussian ridge kernel; similar to K0 via exp((q^2-p^2) z^2 / 4).
double kernel_K3(const ModelParams& params, double z, double z_prime);

/// Exponent coefficient c in K0(z,z') = e^{c z^2} K3(z,z') e^{-c z'^2}.
/// Equals (q^2 - p^2)/4, which coincides with (q - p)/4 because p + q = 1.
double similarity_exponent(const ModelParams& params);

/// Nearest lattice site to (p-q)t + (q-p) y sqrt(t), halves rounded away from zero.
long scaled_site(const ModelParams& params, const ScalingQuery& query);

/// Inverse of the scaling map at a lattice site.
double scaled_coordinate(const ModelParams& params, long x, double t);

/// Smallest radius keeping the zero set of p + q xi xi' - xi off C_R x C_R.
double critical_radius(const ModelParams& params);

/// 1.25 * critical_radius.
double default_radius(const ModelParams& params);

/// R > 1 and q R^2 - R - p > 0.
bool is_admissible_radius(const ModelParams& params, double radius);

namespace detail {

/// Unchecked kernel evaluation, generic over the complex scalar.
template <class C, class R>
C kernel_K_raw(const R& p, const R& q, long x, const R& t, const C& xi, const C& xi_prime) {
  using std::exp;
  using std::pow;
  const C eps = p / xi + q * xi - R(1);
  const C num = (x == 0 ? C(1) : pow(xi, R(x))) * exp(eps * t);
  return num / (p + q * xi * xi_prime - xi);
}

}  // namespace detail

}  // namespace asep
