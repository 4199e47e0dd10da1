#include "asep/fredholm.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/complex128.hpp>
#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>

#include "asep/error.hpp"
#include "asep/kernels.hpp"

namespace asep {

using boost::multiprecision::complex128;
using boost::multiprecision::float128;

struct ExtendedMatrix {
  Matrix<complex128> m;
};

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

cplx to_double(const complex128& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

double max_abs(const ComplexMatrix& a) {
  double m = 0;
  for (const auto& v : a.data()) {
    const double mag = std::abs(v);
    if (!std::isfinite(mag)) return std::numeric_limits<double>::infinity();
    m = std::max(m, mag);
  }
  return m;
}

void require_left_drift(const ModelParams& params) {
  if (!params.left_drift())
    throw Error(ErrorKind::no_left_drift, "requires p < q");
}

// Extended-precision assembly of K; nodes are regenerated in float128.
Matrix<complex128> assemble_K_extended(const ModelParams& params, long x, double t, double radius,
                                       int n) {
  const float128 p = params.p();
  const float128 q = float128(1) - p;
  const float128 tt = t;
  const float128 pi = boost::math::constants::pi<float128>();
  std::vector<complex128> nodes(static_cast<std::size_t>(n));
  std::vector<complex128> weights(nodes.size());
  for (int j = 0; j < n; ++j) {
    const float128 theta = 2 * pi * j / n;
    const complex128 xi(float128(radius) * cos(theta), float128(radius) * sin(theta));
    nodes[static_cast<std::size_t>(j)] = xi;
    weights[static_cast<std::size_t>(j)] = xi / complex128(n);
  }
  Matrix<complex128> a(nodes.size(), nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const complex128 xi = nodes[j];
    const complex128 eps = complex128(p) / xi + complex128(q) * xi - complex128(1);
    complex128 power(1);
    if (x != 0) power = exp(complex128(static_cast<double>(x)) * log(xi));
    const complex128 factor = power * exp(eps * complex128(tt));
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const complex128 den = complex128(p) + complex128(q) * xi * nodes[k] - xi;
      a(j, k) = factor / den * weights[k];
    }
  }
  return a;
}

kernels::InnerContour k1_inner_contour(const ModelParams& params, long x, double t, double s_max,
                                       int segment_nodes) {
  const double p = params.p(), q = params.q();
  const double ray_length = 50 / (q * t) + 10;
  const cplx scale = (q - p) / (2 * std::numbers::pi * cplx(0, 1));
  kernels::InnerContour c;
  auto add = [&](cplx xi, cplx dxi) {
    const cplx eps = p / xi + q * xi - 1.0;
    const cplx den = q * xi - p;
    c.prefactor.push_back(scale * std::pow(xi, static_cast<double>(x)) * std::exp(eps * t) /
                          (den * den) * dxi);
    c.exponent.push_back((1.0 - xi) / den);
  };
  const auto ray = legendre_rule(0, ray_length, std::max(2, segment_nodes / 2));
  // lower ray, travelled left to right: xi = 1 - u - i s_max, dxi = -du with u decreasing
  for (std::size_t i = ray.size(); i-- > 0;) add(cplx(1 - ray.nodes[i], -s_max), ray.weights[i]);
  const auto seg = legendre_rule(-s_max, s_max, segment_nodes);
  for (std::size_t i = 0; i < seg.size(); ++i)
    add(cplx(1, seg.nodes[i]), cplx(0, seg.weights[i]));
  // upper ray, travelled right to left
  for (std::size_t i = 0; i < ray.size(); ++i) add(cplx(1 - ray.nodes[i], s_max), -ray.weights[i]);
  return c;
}

}  // namespace

std::string to_string(Precision p) {
  switch (p) {
    case Precision::binary64: return "double";
    case Precision::extended: return "extended";
    case Precision::automatic: return "auto";
  }
  return "?";
}

Precision parse_precision(const std::string& name) {
  if (name == "double") return Precision::binary64;
  if (name == "extended") return Precision::extended;
  if (name == "auto") return Precision::automatic;
  throw Error(ErrorKind::invalid_argument,
              "precision must be 'double', 'extended' or 'auto', got '" + name + "'");
}

Precision resolve_precision(Precision requested) {
  if (const char* env = std::getenv("ASEP_FREDHOLM_PRECISION")) return parse_precision(env);
  return requested;
}

int circle_nodes_for(const ModelParams& params, double radius, double t) {
  const double modes = 3 * t * (params.q() * radius + params.p() / radius);
  return 32 * static_cast<int>(std::ceil(std::min(modes, 1e5) / 32));
}

NystromOperator nystrom_K(const ModelParams& params, long x, double t, const KOptions& options) {
  if (!(t >= 0)) throw Error(ErrorKind::invalid_argument, "t must be >= 0");
  const double radius = options.radius.value_or(default_radius(params));
  if (!is_admissible_radius(params, radius))
    throw Error(ErrorKind::bad_contour,
                "radius " + sci(radius) + " violates R > 1 and q R^2 - R - p > 0");

  NystromOperator op;
  op.tag = KernelTag::K;
  op.params = params;
  const int nodes = std::max(options.nodes, circle_nodes_for(params, radius, t));
  auto rule = circle_rule(radius, nodes);
  op.precision = resolve_precision(options.precision);
  op.info.x = x;
  op.info.t = t;

  if (op.precision != Precision::extended) {
    op.matrix = kernels::parallel::assemble_K(params, x, t, rule);
    const double mx = max_abs(op.matrix);
    op.info.max_entry = mx;
    if (op.precision == Precision::binary64 || mx <= kAutoExtendedEntry) {
      op.precision = Precision::binary64;
      if (!(mx <= kOverflowLimit))
        throw Error(ErrorKind::precision_regime, "Nystrom entries overflow binary64");
      if (mx > kBinary64EntryLimit)
        throw Error(ErrorKind::precision_regime,
                    "max |A_jk| = " + sci(mx) +
                        " loses the determinant to cancellation in binary64; use extended "
                        "precision or a smaller t");
      op.rule = std::move(rule);
      return op;
    }
    op.precision = Precision::extended;
  }

  auto ext = std::make_shared<ExtendedMatrix>();
  ext->m = assemble_K_extended(params, x, t, radius, nodes);
  op.matrix = ComplexMatrix(ext->m.rows(), ext->m.cols());
  double mx = 0;
  for (std::size_t j = 0; j < ext->m.rows(); ++j)
    for (std::size_t k = 0; k < ext->m.cols(); ++k) {
      op.matrix(j, k) = to_double(ext->m(j, k));
      const double mag = std::abs(op.matrix(j, k));
      mx = std::isfinite(mag) ? std::max(mx, mag) : std::numeric_limits<double>::infinity();
    }
  op.info.max_entry = mx;
  if (!(mx <= kExtendedEntryLimit))
    throw Error(ErrorKind::precision_regime,
                "max |A_jk| = " + sci(mx) + " exceeds the extended-precision limit; reduce t or |x|");
  op.extended = std::move(ext);
  op.rule = std::move(rule);
  return op;
}

double k0_half_width(const ModelParams& params) {
  const double p = params.p(), q = params.q();
  return std::sqrt(160 / (q * q - p * p));
}

NystromOperator nystrom_K0(const ModelParams& params, std::optional<double> y, int nodes) {
  require_left_drift(params);
  const double half = k0_half_width(params);
  const double lo = y ? -*y : -half;
  const double hi = y ? -*y + 2 * half : half;
  NystromOperator op;
  op.tag = y ? KernelTag::K0_restricted : KernelTag::K0;
  op.params = params;
  auto rule = legendre_rule(lo, hi, nodes);
  op.matrix = kernels::parallel::assemble_K0(params, rule);
  op.info.y = y;
  op.info.lower = lo;
  op.info.upper = hi;
  op.info.max_entry = max_abs(op.matrix);
  op.rule = std::move(rule);
  return op;
}

NystromOperator nystrom_K1(const ModelParams& params, long x, double t, const K1Options& options) {
  require_left_drift(params);
  if (x >= 0)
    throw Error(ErrorKind::bad_contour, "the Re xi = 1 contour for K1 requires x < 0");
  if (!(t > 0)) throw Error(ErrorKind::invalid_argument, "K1 requires t > 0");
  if (!(options.s_max > 0) || options.inner_nodes < 4)
    throw Error(ErrorKind::invalid_argument, "bad K1 inner quadrature settings");
  const double p = params.p(), q = params.q();
  const double y = scaled_coordinate(params, x, t);
  const double z_max = options.z_max.value_or(std::abs(y) + 20 / (q - p));

  NystromOperator op;
  op.tag = KernelTag::K1;
  op.params = params;
  auto outer = legendre_rule(0, z_max, options.outer_nodes);
  const auto inner = k1_inner_contour(params, x, t, options.s_max, options.inner_nodes);
  op.matrix = kernels::parallel::assemble_K1(params, inner, outer);

  if (options.verify_inner) {
    const auto fine = k1_inner_contour(params, x, t, options.s_max, 2 * options.inner_nodes);
    const auto check = kernels::parallel::assemble_K1(params, fine, outer);
    for (std::size_t j = 0; j < check.rows(); ++j)
      for (std::size_t k = 0; k < check.cols(); ++k) {
        const double a = std::abs(op.matrix(j, k));
        const double d = std::abs(check(j, k) - op.matrix(j, k));
        if (!(d <= 1e-8 * std::max(1.0, a)))
          throw Error(ErrorKind::inner_quadrature_failure,
                      "doubling the inner nodes moved an entry by " + sci(d));
      }
  }

  double resid = 0;
  for (const auto& v : op.matrix.data()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorKind::precision_regime, "non-finite K1 entry");
    resid = std::max(resid, std::abs(v.imag()) / (1 + std::abs(v)));
  }
  op.info.x = x;
  op.info.t = t;
  op.info.y = y;
  op.info.lower = 0;
  op.info.upper = z_max;
  op.info.imag_residue = resid;
  op.info.max_entry = max_abs(op.matrix);
  op.rule = std::move(outer);
  return op;
}

cplx fredholm_det(const NystromOperator& op, cplx mu) {
  const std::size_t n = op.size();
  if (op.extended) {
    const complex128 m128(mu.real(), mu.imag());
    Matrix<complex128> a(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        complex128 v = -m128 * op.extended->m(j, k);
        if (j == k) v += complex128(1);
        a(j, k) = v;
      }
    return to_double(lu_determinant(std::move(a)));
  }
  ComplexMatrix a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) a(j, k) = (j == k ? 1.0 : 0.0) - mu * op.matrix(j, k);
  return det_complex(a);
}

DeterminantSweep::DeterminantSweep(const NystromOperator& op) {
  if (op.extended) {
    extended_ = std::make_unique<ExtendedMatrix>(*op.extended);
    hessenberg_reduce(extended_->m);
  } else {
    hessenberg_ = op.matrix;
    hessenberg_reduce(hessenberg_);
  }
}

DeterminantSweep::~DeterminantSweep() = default;
DeterminantSweep::DeterminantSweep(DeterminantSweep&&) noexcept = default;
DeterminantSweep& DeterminantSweep::operator=(DeterminantSweep&&) noexcept = default;

cplx DeterminantSweep::operator()(cplx mu) const {
  if (extended_) {
    std::vector<complex128> work;
    return to_double(hessenberg_shifted_det(extended_->m, complex128(mu.real(), mu.imag()), work));
  }
  std::vector<cplx> work;
  return hessenberg_shifted_det(hessenberg_, mu, work);
}

std::vector<cplx> DeterminantSweep::evaluate(std::span<const cplx> mus) const {
  if (extended_) {
    std::vector<cplx> out;
    out.reserve(mus.size());
    for (const auto& mu : mus) out.push_back((*this)(mu));
    return out;
  }
  return kernels::parallel::shifted_dets(hessenberg_, mus);
}

DetCurve det_curve(const NystromOperator& op, std::span<const cplx> mus,
                   const NystromOperator* refined) {
  DetCurve curve;
  curve.tag = op.tag;
  curve.mu.assign(mus.begin(), mus.end());
  curve.det = DeterminantSweep(op).evaluate(mus);
  if (refined) {
    const auto fine = DeterminantSweep(*refined).evaluate(mus);
    for (std::size_t i = 0; i < fine.size(); ++i)
      curve.convergence = std::max(curve.convergence, std::abs(fine[i] - curve.det[i]));
  }
  return curve;
}

namespace {

// tr(A^n) plus tr(|A|^n), the scale that bounds rounding in the sum.
template <class C>
std::pair<C, double> trace_power_of(const Matrix<C>& a, int n) {
  const std::size_t dim = a.rows();
  Matrix<double> mag(dim, dim);
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t k = 0; k < dim; ++k) mag(j, k) = static_cast<double>(detail::magnitude(a(j, k)));
  Matrix<C> b = a;
  Matrix<double> bm = mag;
  for (int i = 2; i < n; ++i) {
    b = multiply(b, a);
    bm = multiply(bm, mag);
  }
  C s = 0;
  double scale = 0;
  if (n == 1) {
    for (std::size_t j = 0; j < dim; ++j) s += a(j, j), scale += mag(j, j);
    return {s, scale};
  }
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t k = 0; k < dim; ++k) {
      s += b(j, k) * a(k, j);
      scale += bm(j, k) * mag(k, j);
    }
  return {s, scale};
}

}  // namespace

cplx trace_power(const NystromOperator& op, int n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "trace_power needs n >= 1");
  const double dim = static_cast<double>(op.size());
  if (op.extended) {
    const auto [s, scale] = trace_power_of(op.extended->m, n);
    (void)scale;
    return to_double(s);
  }
  const auto [s, scale] = trace_power_of(op.matrix, n);
  const double bound = n * std::sqrt(dim) * std::numeric_limits<double>::epsilon() * scale;
  if (bound > 1e-8 * std::max(1.0, std::abs(s)))
    throw Error(ErrorKind::precision_regime,
                "tr(A^" + std::to_string(n) + ") cancels: rounding bound " + sci(bound) +
                    "; use extended precision");
  return s;
}

K0Eigensystem k0_eigensystem(const NystromOperator& op) {
  if (op.tag != KernelTag::K0)
    throw Error(ErrorKind::invalid_argument, "k0_eigensystem needs the full-line K0 operator");
  const auto& rule = std::get<IntervalRule>(op.rule);
  const auto n = static_cast<Eigen::Index>(rule.size());
  std::vector<double> sw(rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) sw[j] = std::sqrt(rule.weights[j]);

  Eigen::MatrixXd s(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto jj = static_cast<std::size_t>(j), kk = static_cast<std::size_t>(k);
      s(j, k) = sw[jj] * kernel_K0(op.params, rule.nodes[jj], rule.nodes[kk]) * sw[kk];
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::singular, "symmetric eigensolver did not converge");

  K0Eigensystem out;
  out.nodes = rule.nodes;
  out.weights = rule.weights;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    out.values.push_back(solver.eigenvalues()(i));
    std::vector<double> f(rule.size());
    std::size_t peak = 0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      f[j] = solver.eigenvectors()(static_cast<Eigen::Index>(j), i) / sw[j];
      if (std::abs(f[j]) > std::abs(f[peak])) peak = j;
    }
    if (f[peak] < 0)
      for (auto& v : f) v = -v;
    out.vectors.push_back(std::move(f));
  }
  return out;
}

}  // namespace asep
