#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "asep/matrix.hpp"

namespace asep {

/// Trapezoid rule on the circle |xi| = R, normalized so that
/// sum_j w_j f(xi_j) approximates (1/2 pi i) times the contour integral.
struct CircleRule {
  double radius = 0;
  std::vector<cplx> nodes;
  std::vector<cplx> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  cplx integrate(F&& f) const {
    cplx s = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) s += weights[j] * f(nodes[j]);
    return s;
  }
};

/// Gauss-Legendre nodes and weights mapped to [a, b].
struct IntervalRule {
  double a = 0;
  double b = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) s += weights[j] * f(nodes[j]);
    return s;
  }
};

/// Cached powers tau^0 .. tau^K.
class TauPowers {
 public:
  TauPowers(double tau, int max_power);

  double tau() const noexcept { return tau_; }
  int max_power() const noexcept { return static_cast<int>(powers_.size()) - 1; }
  double operator[](int k) const { return powers_.at(static_cast<std::size_t>(k)); }

 private:
  double tau_;
  std::vector<double> powers_;
};

/// (lambda; tau)_m = (1 - lambda)(1 - lambda tau) ... (1 - lambda tau^{m-1}).
cplx tau_pochhammer(cplx lambda, double tau, int m);

/// Gaussian (tau-)binomial coefficient, accumulated as a product of ratios.
/// Returns 0 outside 0 <= n <= N; throws degenerate_tau when tau == 1.
double tau_binomial(int N, int n, double tau);

CircleRule circle_rule(double radius, int n);
IntervalRule legendre_rule(double a, double b, int n);

/// Determinant via row-pivoted LU.
cplx det_complex(const ComplexMatrix& m);

/// Physicists' Hermite polynomial H_i(u).
double hermite_poly(int i, double u);

/// Standard normal distribution function.
double normal_cdf(double x);

}  // namespace asep
