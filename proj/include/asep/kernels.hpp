#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// straightforward reference, `parallel` spreads the same per-element work over
// OpenMP threads. Both accumulate in the same canonical order, so results are
// bitwise identical for any thread count; the unit tests pin that down.

#include <cstdint>
#include <span>
#include <vector>

#include "asep/matrix.hpp"
#include "asep/model.hpp"
#include "asep/numerics.hpp"

namespace asep {
struct SimConfig;
}

namespace asep::kernels {

/// Discretized inner contour for the K1 kernel: K1 entry for the argument
/// c = q z - p z' is sum_l prefactor_l * exp(c * exponent_l).
struct InnerContour {
  std::vector<cplx> prefactor;
  std::vector<cplx> exponent;
};

namespace serial {

ComplexMatrix assemble_K(const ModelParams& params, long x, double t, const CircleRule& rule);
ComplexMatrix assemble_K0(const ModelParams& params, const IntervalRule& rule);
ComplexMatrix assemble_K1(const ModelParams& params, const InnerContour& inner,
                          const IntervalRule& outer);
std::vector<cplx> shifted_dets(const ComplexMatrix& hessenberg, std::span<const cplx> mus);
cplx tensor_series_sum(const ComplexMatrix& pair, std::span<const cplx> single, int k);
std::vector<long> simulate_trials(const SimConfig& config);

}  // namespace serial

namespace parallel {

ComplexMatrix assemble_K(const ModelParams& params, long x, double t, const CircleRule& rule);
ComplexMatrix assemble_K0(const ModelParams& params, const IntervalRule& rule);
ComplexMatrix assemble_K1(const ModelParams& params, const InnerContour& inner,
                          const IntervalRule& outer);
std::vector<cplx> shifted_dets(const ComplexMatrix& hessenberg, std::span<const cplx> mus);
cplx tensor_series_sum(const ComplexMatrix& pair, std::span<const cplx> single, int k);
std::vector<long> simulate_trials(const SimConfig& config);

}  // namespace parallel

}  // namespace asep::kernels
