#include <doctest.h>

#include <cmath>
#include <numbers>

#include "asep/error.hpp"
#include "asep/numerics.hpp"

using namespace asep;

namespace {

// Pascal rule for Gaussian binomials: [N,n] = [N-1,n-1] + tau^n [N-1,n].
double pascal_binomial(int N, int n, double tau) {
  if (n < 0 || n > N) return 0;
  if (n == 0 || n == N) return 1;
  return pascal_binomial(N - 1, n - 1, tau) + std::pow(tau, n) * pascal_binomial(N - 1, n, tau);
}

}  // namespace

TEST_CASE("tau_pochhammer expands the finite product") {
  CHECK(tau_pochhammer(0.3, 0.5, 0) == cplx(1));
  const cplx l(0.4, -1.2);
  const cplx expect = (1.0 - l) * (1.0 - 0.7 * l) * (1.0 - 0.49 * l);
  CHECK(std::abs(tau_pochhammer(l, 0.7, 3) - expect) < 1e-15);
  // zeros at tau^{-j}
  CHECK(std::abs(tau_pochhammer(1 / 0.49, 0.7, 3)) < 1e-14);
}

TEST_CASE("tau_binomial agrees with the Pascal recursion") {
  for (double tau : {0.25, 0.5, 0.9, 1.7})
    for (int N = 0; N <= 9; ++N)
      for (int n = -1; n <= N + 1; ++n) {
        const double ref = pascal_binomial(N, n, tau);
        CHECK(tau_binomial(N, n, tau) == doctest::Approx(ref).epsilon(1e-13));
      }
  CHECK(tau_binomial(4, 2, 0.5) == doctest::Approx(1 + 0.5 + 2 * 0.25 + 0.125 + 0.0625));
  CHECK_THROWS_AS(tau_binomial(3, 1, 1.0), Error);
}

TEST_CASE("circle rule integrates Laurent monomials exactly") {
  const auto rule = circle_rule(1.7, 32);
  CHECK(rule.size() == 32);
  for (int k = -10; k <= 10; ++k) {
    const cplx v = rule.integrate([k](cplx z) { return std::pow(z, k); });
    const cplx expect = k == -1 ? cplx(1) : cplx(0);
    CHECK(std::abs(v - expect) < 1e-14 * std::max(1.0, std::pow(1.7, std::abs(k))));
  }
  CHECK_THROWS_AS(circle_rule(1.0, 7), Error);
  CHECK_THROWS_AS(circle_rule(-1.0, 16), Error);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials and smooth functions") {
  const auto rule = legendre_rule(-1, 2, 10);
  double wsum = 0;
  for (double w : rule.weights) wsum += w;
  CHECK(wsum == doctest::Approx(3).epsilon(1e-14));
  // degree 19 exact
  const double v = rule.integrate([](double x) { return std::pow(x, 19); });
  CHECK(v == doctest::Approx((std::pow(2.0, 20) - 1) / 20).epsilon(1e-13));
  const auto g = legendre_rule(-8, 8, 80);
  CHECK(g.integrate([](double x) { return std::exp(-x * x); }) ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("det_complex handles permutations, singular matrices and non-finite entries") {
  ComplexMatrix a(3, 3);
  a(0, 1) = 2;
  a(1, 0) = cplx(0, 1);
  a(2, 2) = 3;
  CHECK(std::abs(det_complex(a) - cplx(0, -6)) < 1e-15);

  ComplexMatrix s(2, 2);
  s(0, 0) = 1;
  s(0, 1) = 2;
  s(1, 0) = 2;
  s(1, 1) = 4;
  CHECK_THROWS_AS(det_complex(s), Error);

  ComplexMatrix bad = ComplexMatrix::identity(2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(det_complex(bad), Error);
}

TEST_CASE("Hessenberg shifted determinants match LU") {
  ComplexMatrix a(7, 7);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j)
      a(i, j) = cplx(std::sin(1.0 + i * 7 + j), std::cos(2.0 * i - j)) * 0.3;
  ComplexMatrix h = a;
  hessenberg_reduce(h);
  for (std::size_t i = 2; i < 7; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) CHECK(h(i, j) == cplx(0));
  std::vector<cplx> work;
  for (cplx mu : {cplx(0), cplx(0.7), cplx(-1.3, 2.1), cplx(0, 5)}) {
    ComplexMatrix m = ComplexMatrix::identity(7);
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j) m(i, j) -= mu * a(i, j);
    const cplx ref = det_complex(m);
    CHECK(std::abs(hessenberg_shifted_det(h, mu, work) - ref) < 1e-12 * (1 + std::abs(ref)));
  }
}

TEST_CASE("physicists' Hermite polynomials") {
  CHECK(hermite_poly(0, 0.7) == 1);
  CHECK(hermite_poly(1, 0.7) == doctest::Approx(1.4));
  CHECK(hermite_poly(2, 0.7) == doctest::Approx(4 * 0.49 - 2));
  const double u = -1.3;
  CHECK(hermite_poly(5, u) ==
        doctest::Approx(32 * std::pow(u, 5) - 160 * std::pow(u, 3) + 120 * u).epsilon(1e-13));
}

TEST_CASE("normal_cdf") {
  CHECK(normal_cdf(0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
  CHECK(normal_cdf(-40) >= 0);
}
