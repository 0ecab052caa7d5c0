#pragma once

#include <map>

#include "gradednet/gspace.hpp"

namespace gradednet {

/// Positive per-grade weights for the weighted norm and the graded loss,
/// keyed by the grades of the vectors they apply to. Distinct from the
/// grading weights: these encode importance, not scaling degree.
struct LossWeights {
  std::map<Grade, double> w;

  /// Uniform weight over the signature's grades.
  static LossWeights uniform(const GradingSignature& sig, double value = 1.0);

  /// Throws std::invalid_argument unless the key set equals the signature's
  /// grade set and every weight is positive.
  void validate_for(const GradingSignature& sig) const;

  double at(const Grade& g) const;
};

/// sqrt of the sum of squared coordinates over all blocks.
double euclidean_norm(const GradedVector& v);

/// Anisotropic norm (sum_i ||v_i||^{e_i})^{1/2r} over the r grade blocks in
/// ascending order, where ||.|| is the per-block euclidean norm. The exponent
/// for the i-th block (1-based) is e_i = 2r/i, descending from 2r on the first
/// block to 2 on the last, so the dilation v_i -> t^i v_i scales every term by
/// t^{2r} and the norm by |t|. Lower blocks are emphasized. Requires integer
/// or rational grades.
double homogeneous_norm(const GradedVector& v);

/// sqrt(sum_i w_i ||v_i||^2). Weight keys must match the signature.
double weighted_norm(const GradedVector& v, const LossWeights& w);

/// sum_i w_i sum_coords (pred - truth)^2 over grades i.
double graded_loss(const GradedVector& pred, const GradedVector& truth,
                   const LossWeights& w);

/// Gradient of graded_loss in pred: component at grade i is 2 w_i (pred - truth).
GradedVector graded_loss_gradient(const GradedVector& pred, const GradedVector& truth,
                                  const LossWeights& w);

}  // namespace gradednet
