#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asep/fredholm.hpp"
#include "asep/model.hpp"

namespace asep {

/// Circle |lambda| = radius carrying the outer integral of the CDF formula.
struct LambdaContour {
  double radius = 1.5;
  int nodes = 256;

  /// radius 1.5 * max(1, tau^{-(m-1)}), which encloses every pole tau^{-j}, j < m.
  static LambdaContour for_rank(const ModelParams& params, int m, int nodes = 256);
  void validate(const ModelParams& params, int m) const;
};

enum class CdfMethod { contour, residue, series_partial, limit };

std::string to_string(CdfMethod method);

/// P(x_m(t) <= x) with bookkeeping. `value` is never clamped.
struct CdfResult {
  double value = 0;
  double presentation = 0;  ///< value clamped to [0, 1]
  CdfMethod method = CdfMethod::contour;
  double err_estimate = 0;
  std::map<std::string, double> diagnostics;
};

struct CdfOptions {
  KOptions engine;
  int lambda_nodes = 256;
  std::optional<double> lambda_radius;
  bool estimate_error = true;  ///< re-run with doubled xi and lambda nodes
};

CdfResult cdf_contour(const ModelParams& params, int m, long x, double t,
                      const CdfOptions& options = {});

/// 1 - sum_i det(I - q tau^{-i} K) / prod_{j != i} (1 - tau^{j-i}). Needs |tau - 1| > 1e-8.
CdfResult cdf_residue(const ModelParams& params, int m, long x, double t,
                      const CdfOptions& options = {});

/// Weight of det(I - q tau^{-i} K) in the residue sum.
double residue_weight(double tau, int m, int i);

struct SeriesOptions {
  std::optional<double> radius;
  std::vector<int> nodes_per_order;  ///< entry k-1 used for order k; empty: 128,128,64,32
};

/// Terms k = m..k_max of the multiple-integral expansion (k_max <= 4).
CdfResult cdf_series_partial(const ModelParams& params, int m, long x, double t, int k_max,
                             const SeriesOptions& options = {});

/// Coefficient multiplying the k-fold integral, sign included.
double series_coefficient(const ModelParams& params, int m, int k);

struct LimitOptions {
  int nodes = 200;
  int lambda_nodes = 256;
  bool estimate_error = true;  ///< re-run with doubled z nodes
};

/// Conjectured t -> infinity limit of P(x_m(t) <= x) at scaled position y.
CdfResult limit_cdf(const ModelParams& params, int m, double y, const LimitOptions& options = {});

/// Limit of tr K^n at scaled position y: closed form for n = 1, K0 restricted to (-y, inf) otherwise.
double limit_trace(const ModelParams& params, int n, double y, int nodes = 200);

}  // namespace asep
