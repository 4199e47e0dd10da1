#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "asep/error.hpp"
#include "asep/fredholm.hpp"
#include "asep/simulator.hpp"

using namespace asep;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::invalid_argument;
}

struct EnvGuard {
  explicit EnvGuard(const char* value) { setenv("ASEP_FREDHOLM_PRECISION", value, 1); }
  ~EnvGuard() { unsetenv("ASEP_FREDHOLM_PRECISION"); }
};

const ModelParams P3(0.3);

}  // namespace

TEST_CASE("nystrom_K matrix layout and trace at x = 0, t = 0") {
  const auto op = nystrom_K(P3, 0, 0, {std::nullopt, 64, Precision::binary64});
  REQUIRE(op.size() == 64);
  const auto& rule = std::get<CircleRule>(op.rule);
  CHECK(std::abs(op.matrix(3, 5) - kernel_K(P3, 0, 0, rule.nodes[3], rule.nodes[5]) * rule.weights[5]) <
        1e-15);
  // 1/(p + q xi^2 - xi) = 1/((q xi - p)(xi - 1)): both poles sit inside C_R and
  // their residues, 1/(q - p) and -1/(q - p), cancel.
  CHECK(std::abs(trace_power(op, 1)) < 1e-12);
}

TEST_CASE("determinant is exactly one at mu = 0") {
  const auto op = nystrom_K(P3, -2, 1);
  CHECK(fredholm_det(op, 0) == cplx(1));
  CHECK(DeterminantSweep(op)(0) == cplx(1));
}

TEST_CASE("rank-one operators obey the determinant lemma") {
  NystromOperator op;
  const std::size_t n = 9;
  op.matrix = ComplexMatrix(n, n);
  std::vector<cplx> u(n), v(n);
  cplx vu = 0;
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = cplx(0.1 * i, 0.3);
    v[i] = cplx(std::cos(1.0 * i), -0.2 * i);
    vu += v[i] * u[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) op.matrix(i, j) = u[i] * v[j];
  for (cplx mu : {cplx(0.4), cplx(-1, 2)}) {
    CHECK(std::abs(fredholm_det(op, mu) - (1.0 - mu * vu)) < 1e-13);
    CHECK(std::abs(DeterminantSweep(op)(mu) - (1.0 - mu * vu)) < 1e-13);
  }
}

TEST_CASE("node doubling converges at x = -2, t = 1") {
  const cplx a = fredholm_det(nystrom_K(P3, -2, 1, {std::nullopt, 64, Precision::binary64}), 0.7);
  const cplx b = fredholm_det(nystrom_K(P3, -2, 1, {std::nullopt, 128, Precision::binary64}), 0.7);
  CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("contour radius does not matter among admissible circles") {
  for (double t : {0.5, 5.0})
    for (long x : {-6L, -1L, 0L, 4L}) {
      KOptions wide;
      wide.radius = 1.3 * default_radius(P3);
      const cplx a = fredholm_det(nystrom_K(P3, x, t), P3.q());
      const cplx b = fredholm_det(nystrom_K(P3, x, t, wide), P3.q());
      CHECK(std::abs(a - b) < 1e-8);
    }
}

TEST_CASE("engine argument errors") {
  KOptions bad;
  bad.radius = 1.0;
  CHECK(kind_of([&] { nystrom_K(P3, 0, 1, bad); }) == ErrorKind::bad_contour);
  CHECK(kind_of([&] { nystrom_K(P3, 0, -1); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([&] { nystrom_K(P3, 0, 500); }) == ErrorKind::precision_regime);
  CHECK(kind_of([&] { nystrom_K0(ModelParams(0.5), std::nullopt); }) == ErrorKind::no_left_drift);
  CHECK(kind_of([&] { nystrom_K1(P3, 0, 5); }) == ErrorKind::bad_contour);
  CHECK(kind_of([&] { nystrom_K1(ModelParams(0.6), -2, 5); }) == ErrorKind::no_left_drift);
  CHECK(kind_of([&] { trace_power(nystrom_K(P3, 0, 1), 0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("extended precision agrees with binary64 where both work and reaches further") {
  KOptions ext, dbl;
  ext.precision = Precision::extended;
  dbl.precision = Precision::binary64;
  const auto a = nystrom_K(P3, -2, 5, dbl);
  const auto b = nystrom_K(P3, -2, 5, ext);
  REQUIRE(b.extended);
  CHECK(std::abs(fredholm_det(a, P3.q()) - fredholm_det(b, P3.q())) < 1e-11);
  CHECK(std::abs(DeterminantSweep(b)(P3.q()) - fredholm_det(b, P3.q())) < 1e-13);

  // t = 70 at the scaled site for y = 0 is out of reach in binary64
  CHECK(kind_of([&] { nystrom_K(P3, -28, 70, dbl); }) == ErrorKind::precision_regime);
  const cplx d = fredholm_det(nystrom_K(P3, -28, 70, ext), P3.q());
  CHECK(nystrom_K(P3, -28, 70, ext).size() >= 192);
  CHECK(d.real() > 0.2);
  CHECK(d.real() < 0.4);
  CHECK(std::abs(d.imag()) < 1e-8);
}

TEST_CASE("precision override from the environment") {
  {
    EnvGuard env("extended");
    CHECK(resolve_precision(Precision::binary64) == Precision::extended);
    CHECK(nystrom_K(P3, 0, 1, {std::nullopt, 16, Precision::binary64}).extended != nullptr);
  }
  {
    EnvGuard env("double");
    CHECK(resolve_precision(Precision::extended) == Precision::binary64);
  }
  {
    EnvGuard env("quad");
    CHECK_THROWS_AS(resolve_precision(Precision::binary64), Error);
  }
  CHECK(resolve_precision(Precision::extended) == Precision::extended);
  EnvGuard env("auto");
  CHECK(resolve_precision(Precision::binary64) == Precision::automatic);
}

TEST_CASE("automatic precision escalates only past the entry threshold") {
  const auto small = nystrom_K(P3, -2, 1);
  CHECK(small.precision == Precision::binary64);
  CHECK(small.info.max_entry <= kAutoExtendedEntry);
  CHECK(!small.extended);
  const auto big = nystrom_K(ModelParams(0.45), 8, 5);
  CHECK(big.precision == Precision::extended);
  CHECK(big.extended);
  CHECK(big.info.max_entry > kAutoExtendedEntry);
  // the CDF is 1 here; binary64 misses by ~1e-6 through cancellation near det = 0
  CHECK(std::abs(fredholm_det(big, 0.55)) < 1e-12);
  CHECK(to_string(parse_precision("auto")) == "auto");
  CHECK_THROWS_AS(parse_precision("quad"), Error);
}

TEST_CASE("trace powers") {
  const auto op = nystrom_K(P3, 1, 1, {std::nullopt, 32, Precision::binary64});
  cplx diag = 0, two = 0;
  for (std::size_t j = 0; j < op.size(); ++j) {
    diag += op.matrix(j, j);
    for (std::size_t k = 0; k < op.size(); ++k) two += op.matrix(j, k) * op.matrix(k, j);
  }
  CHECK(std::abs(trace_power(op, 1) - diag) < 1e-15);
  CHECK(std::abs(trace_power(op, 2) - two) < 1e-13);
}

TEST_CASE("log det matches the trace expansion for small mu") {
  const auto op = nystrom_K(P3, -1, 2, {std::nullopt, 64, Precision::binary64});
  double fro = 0;
  for (const auto& v : op.matrix.data()) fro += std::norm(v);
  for (double arg : {0.0, 1.0, 2.5}) {
    const cplx mu = std::polar(0.1 / std::sqrt(fro), arg);
    cplx series = 0;
    for (int n = 1; n <= 12; ++n) series -= std::pow(mu, n) * trace_power(op, n) / double(n);
    CHECK(std::abs(series - std::log(fredholm_det(op, mu))) < 1e-10);
  }
}

TEST_CASE("tr K at the y = 0 scaled site approaches 1.25 monotonically in t") {
  // the closed-form limit is Phi(0) / (q - p) = 1.25; convergence is O(t^{-1/2}),
  // and at t = 4 the trace is still near 0.57
  double prev = INFINITY;
  for (double t : {4.0, 10.0, 25.0, 50.0}) {
    const long x = scaled_site(P3, {0, t});
    const double dev = std::abs(trace_power(nystrom_K(P3, x, t), 1).real() - 1.25);
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("det(I - qK) matches the Monte Carlo law of x_1") {
  SimConfig cfg;
  cfg.params = P3;
  cfg.m = 1;
  cfg.t = 1;
  cfg.trials = 200000;
  cfg.seed = 2024;
  const long x = -2;
  const auto e = empirical_cdf(cfg, std::span<const long>(&x, 1));
  const double exact = 1 - fredholm_det(nystrom_K(P3, x, 1), P3.q()).real();
  CHECK(exact >= e.wilson_lo[0]);
  CHECK(exact <= e.wilson_hi[0]);
}

TEST_CASE("K0 Nystrom operator") {
  const auto op = nystrom_K0(P3, std::nullopt);
  const auto& rule = std::get<IntervalRule>(op.rule);
  CHECK(rule.a == doctest::Approx(-std::sqrt(160 / 0.4)));
  CHECK(k0_half_width(P3) == doctest::Approx(20).epsilon(1e-14));
  double asym = 0;
  for (std::size_t j = 0; j < op.size(); ++j)
    for (std::size_t k = 0; k < op.size(); ++k) {
      const double s = std::sqrt(rule.weights[j]) * op.matrix(j, k).real() / std::sqrt(rule.weights[k]);
      const double t = std::sqrt(rule.weights[k]) * op.matrix(k, j).real() / std::sqrt(rule.weights[j]);
      asym = std::max(asym, std::abs(s - t));
    }
  CHECK(asym < 1e-12);
  CHECK(std::abs(fredholm_det(op, P3.q())) < 1e-6);

  const auto restricted = nystrom_K0(P3, 1.5);
  CHECK(restricted.tag == KernelTag::K0_restricted);
  CHECK(restricted.info.lower == doctest::Approx(-1.5));
  CHECK(restricted.info.upper == doctest::Approx(-1.5 + 40));
}

TEST_CASE("K0 eigensystem") {
  const auto op = nystrom_K0(P3, std::nullopt);
  const auto es = k0_eigensystem(op);
  const double q = P3.q(), tau = P3.tau();
  CHECK(std::abs(es.values[0] - 1 / q) < 1e-8);
  CHECK(std::abs(es.values[1] - tau / q) < 1e-8);
  for (int i = 0; i <= 6; ++i) {
    const double expect = std::pow(tau, i) / q;
    CHECK(std::abs(es.values[static_cast<std::size_t>(i)] - expect) / expect < 1e-6);
  }
  for (std::size_t i = 0; i + 1 < es.values.size(); ++i) {
    CHECK(es.values[i] >= es.values[i + 1]);
    CHECK(es.values[i] >= -1e-10);
  }
  double trace = 0, sum = 0;
  for (std::size_t j = 0; j < op.size(); ++j) trace += op.matrix(j, j).real();
  for (double v : es.values) sum += v;
  CHECK(std::abs(sum - trace) < 1e-10);

  // leading eigenfunction is the Gaussian e^{-(q^2 - p^2) z^2 / 4}
  const double c = q * q - P3.p() * P3.p();
  double fg = 0, ff = 0, gg = 0;
  for (std::size_t j = 0; j < es.nodes.size(); ++j) {
    const double g = std::exp(-c * es.nodes[j] * es.nodes[j] / 4);
    const double f = es.vectors[0][j];
    fg += es.weights[j] * f * g;
    ff += es.weights[j] * f * f;
    gg += es.weights[j] * g * g;
  }
  CHECK(ff == doctest::Approx(1).epsilon(1e-12));
  CHECK(fg / std::sqrt(ff * gg) > 1 - 1e-8);

  CHECK_THROWS_AS(k0_eigensystem(nystrom_K0(P3, 0.0)), Error);
}

TEST_CASE("K1 on the vertical line reproduces det(I - qK)") {
  const long x = scaled_site(P3, {0, 5});
  REQUIRE(x == -2);
  const auto k1 = nystrom_K1(P3, x, 5);
  for (const auto& v : k1.matrix.data()) CHECK(std::abs(v.imag()) < 1e-10 * (1 + std::abs(v)));
  CHECK(k1.info.upper == doctest::Approx(50));

  const cplx d1 = fredholm_det(k1, P3.q());
  const cplx d = fredholm_det(nystrom_K(P3, x, 5), P3.q());
  CHECK(std::abs(d1 - d) < 1e-4);

  // shrinking the outer interval by a quarter barely moves it
  K1Options shorter;
  shorter.z_max = 0.75 * 50;
  shorter.verify_inner = false;
  CHECK(std::abs(fredholm_det(nystrom_K1(P3, x, 5, shorter), P3.q()) - d1) < 1e-6);
}

TEST_CASE("K1 inner quadrature failure is reported") {
  K1Options starved;
  starved.inner_nodes = 8;
  CHECK(kind_of([&] { nystrom_K1(P3, -2, 5, starved); }) == ErrorKind::inner_quadrature_failure);
}

TEST_CASE("det_curve reports node-doubling convergence") {
  const auto coarse = nystrom_K(P3, 0, 1, {std::nullopt, 64, Precision::binary64});
  const auto fine = nystrom_K(P3, 0, 1, {std::nullopt, 128, Precision::binary64});
  std::vector<cplx> mus{0, 0.35, 0.7, cplx(0, 0.7)};
  const auto curve = det_curve(coarse, mus, &fine);
  CHECK(curve.det[0] == cplx(1));
  CHECK(curve.convergence < 1e-9);
  for (std::size_t i = 0; i < mus.size(); ++i)
    CHECK(std::abs(curve.det[i] - fredholm_det(coarse, mus[i])) < 1e-12);
}

TEST_CASE("node floor grows with t so large-t determinants stay converged") {
  const double r = default_radius(P3);
  CHECK(circle_nodes_for(P3, r, 5) <= 128);
  CHECK(circle_nodes_for(P3, r, 70) >= 192);
  CHECK(circle_nodes_for(P3, r, 70) % 32 == 0);
  CHECK(nystrom_K(P3, -17, 50).size() == static_cast<std::size_t>(circle_nodes_for(P3, r, 50)));
  // binary64 cancellation near the entry limit is ~1e-4 here, so compare in extended
  KOptions base, fine;
  base.precision = fine.precision = Precision::extended;
  fine.nodes = 512;
  const cplx a = fredholm_det(nystrom_K(P3, -17, 50, base), P3.q());
  const cplx b = fredholm_det(nystrom_K(P3, -17, 50, fine), P3.q());
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("trace powers refuse to cancel silently and use float128 when available") {
  KOptions dbl;
  dbl.precision = Precision::binary64;
  CHECK(kind_of([&] { trace_power(nystrom_K(P3, -17, 50, dbl), 3); }) == ErrorKind::precision_regime);
  KOptions ext, fine;
  ext.precision = fine.precision = Precision::extended;
  fine.nodes = 512;
  const cplx a = trace_power(nystrom_K(P3, -17, 50, ext), 3);
  const cplx b = trace_power(nystrom_K(P3, -17, 50, fine), 3);
  CHECK(std::abs(a - b) < 1e-10);
  CHECK(a.real() > 1.0);
  CHECK(a.real() < 1.63);
}
