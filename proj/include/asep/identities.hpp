#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "asep/fredholm.hpp"
#include "asep/matrix.hpp"
#include "asep/model.hpp"

namespace asep {

struct IdentityCheck {
  cplx lhs;
  cplx rhs;
  double rel_err = 0;  ///< |lhs - rhs| / (|lhs| + |rhs|)
};

/// det(1 / (p + q xi_i xi_j - xi_i)) against its product formula.
/// For |xi| well above 1 the matrix is close to rank one (entries ~ 1/(q xi_i xi_j)),
/// so the determinant cancels to ~1e-18 at k = 5 and a binary64 LU keeps only a
/// few digits. The left side is therefore assembled and factored in float128 by
/// default; pass binary64 to see the plain route.
IdentityCheck check_det_identity(const ModelParams& params, std::span<const cplx> xi,
                                 Precision precision = Precision::extended);

/// det(1 / (eta_i - tau eta_j)) against the Cauchy product.
IdentityCheck cauchy_closed_form(std::span<const cplx> eta, double tau);

/// Product formula for the xi-determinant reached through xi = (eta + 1)/(eta + 1/tau):
/// lhs is the eta-side closed form, rhs the xi-side product at the mapped points.
IdentityCheck check_eta_substitution(const ModelParams& params, std::span<const cplx> eta);

struct GenFunctionCheck {
  cplx lhs_partial;
  cplx rhs;
  double bound = 0;  ///< rigorous bound on the omitted tail
  double error = 0;  ///< |lhs_partial - rhs|
  double rounding = 0;  ///< floating-point allowance, 64 eps * sum |terms|

  bool within_bound() const { return error <= bound + rounding; }
};

/// sum_{k=m}^{k_trunc} [k-1, k-m]_tau z^k against prod_{j=1}^m z / (1 - tau^{m-j} z).
GenFunctionCheck check_gen_function(int m, double tau, cplx z, int k_trunc);

/// ||K0 f_i - (tau^i / q) f_i|| / ||f_i|| on the full-line K0 rule.
double eigenfunction_residual(const ModelParams& params, int i, int nodes = 200);

struct IdentityReport {
  std::string name;
  int sample_count = 0;
  double max_relative_error = 0;
  double tolerance = 0;
  bool pass = false;
  std::string worst_case_input;
};

/// Samplers used by the suites; both reject configurations with a pairwise
/// distance below 1e-3.
class IdentitySampler {
 public:
  explicit IdentitySampler(std::uint64_t seed);
  /// k points on the default admissible xi circle.
  std::vector<cplx> circle_points(const ModelParams& params, int k);
  /// k points in the annulus 0.5 <= |eta| <= 2, also separated from tau * eta_j and -1/tau.
  std::vector<cplx> annulus_points(int k, double tau);

 private:
  std::mt19937_64 rng_;
  double uniform();
};

std::vector<IdentityReport> run_identity_suite(std::uint64_t seed);
std::vector<IdentityReport> run_engine_invariants();

std::string describe(std::span<const cplx> points);

}  // namespace asep
