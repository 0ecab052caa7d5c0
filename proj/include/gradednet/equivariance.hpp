#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "gradednet/network.hpp"

namespace gradednet {

/// Probe configuration for the numerical equivariance checks.
struct ProbeOptions {
  /// Scales to test; empty selects the default {0.5, 2, 3}, plus -1 when both
  /// signatures have integer grades (negative scales are undefined otherwise).
  std::vector<double> lambdas;
  int probe_count = 8;  ///< full random probes, in addition to structured ones
  double tol = 1e-9;
  std::uint64_t seed = 0;
};

struct EquivarianceWitness {
  double lambda = 1.0;
  GradedVector v;
};

/// Outcome of a numerical equivariance check. The violation at (lambda, v) is
/// ||f(lambda*v) - lambda*f(v)|| / (1 + ||lambda*f(v)||), a scale-free
/// relative gap; max_violation is its supremum over all probes.
struct EquivarianceReport {
  bool equivariant = true;
  double max_violation = 0.0;
  EquivarianceWitness witness;
};

using VectorFn = std::function<GradedVector(const GradedVector&)>;

/// Test whether f commutes with the weighted scalar action on a probe set:
/// the zero vector, probe_count seeded random vectors, and per grade several
/// probes supported on that block alone (three random unit probes and one
/// normalized all-ones probe). Block-supported probes keep violations that
/// live at a single grade from being washed out by large spectator blocks.
/// Deterministic given opts.seed. Domain errors from the scalar action
/// propagate with added context.
EquivarianceReport check_map_equivariance(const VectorFn& f, const GradingSignature& domain,
                                          const ProbeOptions& opts = {});

/// A full kernel indexed by grade pairs: block (m, n) maps the component at
/// grade n into grade m, (KF)_m = sum_n k(m,n) F_n. The diagonality theorem
/// says such an operator is equivariant exactly when only the (m, m) blocks
/// are nonzero.
struct GradeKernel {
  GradeKernel(GradingSignature sig, std::map<std::pair<Grade, Grade>, Block> blocks);

  const GradingSignature& sig() const { return sig_; }
  const std::map<std::pair<Grade, Grade>, Block>& blocks() const { return blocks_; }

  GradedVector apply(const GradedVector& f) const;

 private:
  GradingSignature sig_;
  std::map<std::pair<Grade, Grade>, Block> blocks_;
};

struct KernelDiagonalityReport {
  bool ok = true;
  std::vector<std::pair<Grade, Grade>> offenders;  ///< (m, n), m != n, nonzero block
};

KernelDiagonalityReport check_kernel_diagonality(const GradeKernel& kernel);

/// Bias addition B_b(v) = v + b is equivariant only for b = 0: the two sides
/// differ by b vs lambda*b. The structural verdict (b exactly zero) is
/// confirmed numerically via check_map_equivariance on B_b.
struct BiasEquivarianceReport {
  bool ok = true;
  EquivarianceReport numeric;
};

BiasEquivarianceReport check_bias_equivariance(const GradedVector& b,
                                               const ProbeOptions& opts = {});

/// Max pooling over grade regions: output at grade m is the elementwise max
/// of the blocks in R_m (all of dim(m)). A grade without an entry pools over
/// just itself. Equivariant exactly when every region is the singleton {m}.
struct MaxPoolSpec {
  std::map<Grade, std::vector<Grade>> regions;
};

/// Weighted averaging across grades: output at grade m is
/// sum_n alpha[(m,n)] F_n over blocks of dim(m); missing weights are 0.
/// Equivariant exactly when alpha is diagonal.
struct AvgPoolSpec {
  std::map<std::pair<Grade, Grade>, double> alpha;
};

struct PoolingReport {
  bool ok = true;            ///< structural verdict
  EquivarianceReport numeric;  ///< confirmation on the induced map
};

PoolingReport check_pooling_equivariance(const GradingSignature& sig, const MaxPoolSpec& pool,
                                         const ProbeOptions& opts = {});
PoolingReport check_pooling_equivariance(const GradingSignature& sig, const AvgPoolSpec& pool,
                                         const ProbeOptions& opts = {});

/// Swap equivariance of one layer over a parity signature with equal even and
/// odd dims: phi(swap(x)) = swap(phi(x)) where swap exchanges the two blocks.
/// The diagnosis records whether the weight blocks and bias halves are tied,
/// which is exactly what makes a block-diagonal layer commute with the swap.
struct SwapEquivarianceReport {
  bool ok = true;
  double max_violation = 0.0;
  bool tied_weights = false;
  bool tied_bias = false;
};

SwapEquivarianceReport check_swap_equivariance(const GradedLayer& layer,
                                               const ProbeOptions& opts = {});

/// Exchange the even and odd blocks of a parity-graded vector.
GradedVector parity_swap(const GradedVector& v);

}  // namespace gradednet
