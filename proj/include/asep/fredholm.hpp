#pragma once

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "asep/matrix.hpp"
#include <string>

#include "asep/model.hpp"
#include "asep/numerics.hpp"

namespace asep {

/// automatic: binary64 unless the largest Nystrom entry exceeds kAutoExtendedEntry,
/// then float128. The determinant near 0 loses about eps * max|A|^3 in binary64.
enum class Precision { binary64, extended, automatic };

std::string to_string(Precision p);
Precision parse_precision(const std::string& name);  ///< "double" | "extended" | "auto"

/// Applies the ASEP_FREDHOLM_PRECISION override (any name parse_precision accepts).
Precision resolve_precision(Precision requested);

/// Largest Nystrom entry tolerated in each precision before the determinant
/// is declared lost to cancellation.
inline constexpr double kBinary64EntryLimit = 1e6;
inline constexpr double kExtendedEntryLimit = 1e14;
inline constexpr double kOverflowLimit = 1e280;
inline constexpr double kAutoExtendedEntry = 5;

enum class KernelTag { K, K0, K0_restricted, K1 };

struct OperatorInfo {
  std::optional<long> x;
  std::optional<double> t;
  std::optional<double> y;
  double lower = 0;  ///< integration interval (interval rules)
  double upper = 0;
  double max_entry = 0;
  double imag_residue = 0;  ///< K1 only: max |Im A_jk| / (1 + |A_jk|)
};

struct ExtendedMatrix;

/// A kernel discretized on a quadrature rule: A_jk = kernel(node_j, node_k) * weight_k.
struct NystromOperator {
  KernelTag tag = KernelTag::K;
  ModelParams params{0.5};
  std::variant<CircleRule, IntervalRule> rule;
  ComplexMatrix matrix;
  Precision precision = Precision::binary64;
  std::shared_ptr<const ExtendedMatrix> extended;  ///< set in extended precision
  OperatorInfo info;

  std::size_t size() const noexcept { return matrix.rows(); }
};

struct KOptions {
  std::optional<double> radius;  ///< unset: default_radius(params)
  int nodes = 128;  ///< lower bound; nystrom_K uses max(nodes, circle_nodes_for(...))
  Precision precision = Precision::automatic;
};

/// Nodes needed on |xi| = R at time t: the integrand carries exp(t eps(xi)) whose
/// Fourier modes on the circle decay only past k ~ t (q R + p / R). Rounded up to 32.
int circle_nodes_for(const ModelParams& params, double radius, double t);

NystromOperator nystrom_K(const ModelParams& params, long x, double t, const KOptions& options = {});

/// Full-line K0 on [-L, L] when y is unset, else K0 restricted to (-y, inf)
/// truncated to [-y, -y + 2L], with L = sqrt(160 / (q^2 - p^2)).
NystromOperator nystrom_K0(const ModelParams& params, std::optional<double> y, int nodes = 200);

/// Half-width L of the K0 truncation interval.
double k0_half_width(const ModelParams& params);

struct K1Options {
  std::optional<double> z_max;  ///< unset: |y| + 20 / (q - p)
  int outer_nodes = 120;
  double s_max = 3;        ///< half-length of the Re xi = 1 segment
  int inner_nodes = 400;   ///< nodes on the segment; each leftward ray gets half
  bool verify_inner = true;
};

/// K1 on [0, z_max] for x < 0. The inner xi-integral runs up the segment
/// Re xi = 1, |Im xi| <= s_max, and is closed by horizontal rays from
/// 1 +/- i s_max to the left, where e^{q t xi} decays.
NystromOperator nystrom_K1(const ModelParams& params, long x, double t, const K1Options& options = {});

/// det(I - mu A) by direct LU.
cplx fredholm_det(const NystromOperator& op, cplx mu);

/// det(I - mu A) for many mu from one Hessenberg reduction of A.
class DeterminantSweep {
 public:
  explicit DeterminantSweep(const NystromOperator& op);
  ~DeterminantSweep();
  DeterminantSweep(DeterminantSweep&&) noexcept;
  DeterminantSweep& operator=(DeterminantSweep&&) noexcept;

  cplx operator()(cplx mu) const;
  std::vector<cplx> evaluate(std::span<const cplx> mus) const;

 private:
  ComplexMatrix hessenberg_;
  std::unique_ptr<ExtendedMatrix> extended_;
};

struct DetCurve {
  std::vector<cplx> mu;
  std::vector<cplx> det;
  KernelTag tag = KernelTag::K;
  double convergence = 0;  ///< max |det - det_refined|, 0 when no refined operator given
};

DetCurve det_curve(const NystromOperator& op, std::span<const cplx> mus,
                   const NystromOperator* refined = nullptr);

/// tr(A^n) by repeated multiplication.
cplx trace_power(const NystromOperator& op, int n);

struct K0Eigensystem {
  std::vector<double> values;                ///< descending
  std::vector<std::vector<double>> vectors;  ///< node samples, unit quadrature norm
  std::vector<double> nodes;
  std::vector<double> weights;
};

K0Eigensystem k0_eigensystem(const NystromOperator& op);

}  // namespace asep
