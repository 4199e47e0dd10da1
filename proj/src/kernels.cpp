#include "asep/kernels.hpp"

#include <cmath>

#include "asep/simulator.hpp"

namespace asep::kernels {
namespace {

// Row factor xi^x e^{eps(xi) t} of the K kernel.
std::vector<cplx> k_row_factors(const ModelParams& params, long x, double t,
                                const CircleRule& rule) {
  std::vector<cplx> f(rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const cplx xi = rule.nodes[j];
    const cplx eps = params.p() / xi + params.q() * xi - 1.0;
    const cplx power = x == 0 ? cplx(1) : std::pow(xi, static_cast<double>(x));
    f[j] = power * std::exp(eps * t);
  }
  return f;
}

inline void fill_K_row(const ModelParams& params, const CircleRule& rule,
                       const std::vector<cplx>& factor, std::size_t j, std::span<cplx> row) {
  const double p = params.p(), q = params.q();
  const cplx xi = rule.nodes[j];
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const cplx den = p + q * xi * rule.nodes[k] - xi;
    row[k] = factor[j] / den * rule.weights[k];
  }
}

inline void fill_K0_row(const ModelParams& params, const IntervalRule& rule, std::size_t j,
                        std::span<cplx> row) {
  for (std::size_t k = 0; k < rule.size(); ++k)
    row[k] = kernel_K0(params, rule.nodes[j], rule.nodes[k]) * rule.weights[k];
}

inline void fill_K1_row(const ModelParams& params, const InnerContour& inner,
                        const IntervalRule& outer, std::size_t j, std::span<cplx> row) {
  const double p = params.p(), q = params.q();
  for (std::size_t k = 0; k < outer.size(); ++k) {
    const double c = q * outer.nodes[j] - p * outer.nodes[k];
    cplx s = 0;
    for (std::size_t l = 0; l < inner.prefactor.size(); ++l)
      s += inner.prefactor[l] * std::exp(c * inner.exponent[l]);
    row[k] = s * outer.weights[k];
  }
}

// Sum over all (a_2..a_k) of the series integrand with a_1 fixed.
cplx series_slice(const ComplexMatrix& pair, std::span<const cplx> single, int k,
                  std::size_t a1) {
  const std::size_t n = single.size();
  const cplx g1 = single[a1];
  if (k == 1) return g1;
  cplx total = 0;
  for (std::size_t a2 = 0; a2 < n; ++a2) {
    const cplx w2 = g1 * single[a2] * pair(a1, a2) * pair(a2, a1);
    if (k == 2) {
      total += w2;
      continue;
    }
    if (w2 == cplx(0)) continue;
    for (std::size_t a3 = 0; a3 < n; ++a3) {
      const cplx w3 = w2 * single[a3] * pair(a1, a3) * pair(a3, a1) * pair(a2, a3) * pair(a3, a2);
      if (k == 3) {
        total += w3;
        continue;
      }
      if (w3 == cplx(0)) continue;
      for (std::size_t a4 = 0; a4 < n; ++a4) {
        total += w3 * single[a4] * pair(a1, a4) * pair(a4, a1) * pair(a2, a4) * pair(a4, a2) *
                 pair(a3, a4) * pair(a4, a3);
      }
    }
  }
  return total;
}

void check_series_order(int k) {
  if (k < 1 || k > 4) throw Error(ErrorKind::invalid_argument, "series order must be 1..4");
}

cplx ordered_sum(const std::vector<cplx>& parts) {
  cplx s = 0;
  for (const auto& v : parts) s += v;
  return s;
}

}  // namespace

namespace serial {

ComplexMatrix assemble_K(const ModelParams& params, long x, double t, const CircleRule& rule) {
  const auto factor = k_row_factors(params, x, t, rule);
  ComplexMatrix a(rule.size(), rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) fill_K_row(params, rule, factor, j, a.row(j));
  return a;
}

ComplexMatrix assemble_K0(const ModelParams& params, const IntervalRule& rule) {
  ComplexMatrix a(rule.size(), rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) fill_K0_row(params, rule, j, a.row(j));
  return a;
}

ComplexMatrix assemble_K1(const ModelParams& params, const InnerContour& inner,
                          const IntervalRule& outer) {
  ComplexMatrix a(outer.size(), outer.size());
  for (std::size_t j = 0; j < outer.size(); ++j) fill_K1_row(params, inner, outer, j, a.row(j));
  return a;
}

std::vector<cplx> shifted_dets(const ComplexMatrix& hessenberg, std::span<const cplx> mus) {
  std::vector<cplx> out(mus.size());
  std::vector<cplx> work;
  for (std::size_t i = 0; i < mus.size(); ++i)
    out[i] = hessenberg_shifted_det(hessenberg, mus[i], work);
  return out;
}

cplx tensor_series_sum(const ComplexMatrix& pair, std::span<const cplx> single, int k) {
  check_series_order(k);
  std::vector<cplx> parts(single.size());
  for (std::size_t a1 = 0; a1 < single.size(); ++a1)
    parts[a1] = series_slice(pair, single, k, a1);
  return ordered_sum(parts);
}

std::vector<long> simulate_trials(const SimConfig& config) {
  std::vector<long> out(static_cast<std::size_t>(config.trials));
  for (long i = 0; i < config.trials; ++i)
    out[static_cast<std::size_t>(i)] = run_trial(config, static_cast<std::uint64_t>(i));
  return out;
}

}  // namespace serial

namespace parallel {

ComplexMatrix assemble_K(const ModelParams& params, long x, double t, const CircleRule& rule) {
  const auto factor = k_row_factors(params, x, t, rule);
  const auto n = static_cast<std::ptrdiff_t>(rule.size());
  ComplexMatrix a(rule.size(), rule.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const auto row = static_cast<std::size_t>(j);
    fill_K_row(params, rule, factor, row, a.row(row));
  }
  return a;
}

ComplexMatrix assemble_K0(const ModelParams& params, const IntervalRule& rule) {
  const auto n = static_cast<std::ptrdiff_t>(rule.size());
  ComplexMatrix a(rule.size(), rule.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const auto row = static_cast<std::size_t>(j);
    fill_K0_row(params, rule, row, a.row(row));
  }
  return a;
}

ComplexMatrix assemble_K1(const ModelParams& params, const InnerContour& inner,
                          const IntervalRule& outer) {
  const auto n = static_cast<std::ptrdiff_t>(outer.size());
  ComplexMatrix a(outer.size(), outer.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const auto row = static_cast<std::size_t>(j);
    fill_K1_row(params, inner, outer, row, a.row(row));
  }
  return a;
}

std::vector<cplx> shifted_dets(const ComplexMatrix& hessenberg, std::span<const cplx> mus) {
  std::vector<cplx> out(mus.size());
  const auto n = static_cast<std::ptrdiff_t>(mus.size());
#pragma omp parallel
  {
    std::vector<cplx> work;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      out[idx] = hessenberg_shifted_det(hessenberg, mus[idx], work);
    }
  }
  return out;
}

cplx tensor_series_sum(const ComplexMatrix& pair, std::span<const cplx> single, int k) {
  check_series_order(k);
  std::vector<cplx> parts(single.size());
  const auto n = static_cast<std::ptrdiff_t>(single.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t a1 = 0; a1 < n; ++a1) {
    const auto idx = static_cast<std::size_t>(a1);
    parts[idx] = series_slice(pair, single, k, idx);
  }
  return ordered_sum(parts);
}

std::vector<long> simulate_trials(const SimConfig& config) {
  std::vector<long> out(static_cast<std::size_t>(config.trials));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < config.trials; ++i)
    out[static_cast<std::size_t>(i)] = run_trial(config, static_cast<std::uint64_t>(i));
  return out;
}

}  // namespace parallel
}  // namespace asep::kernels
