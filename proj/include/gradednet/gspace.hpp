#pragma once

#include <map>
#include <span>
#include <vector>

#include "gradednet/grading.hpp"

namespace gradednet {

/// A vector in a graded space: one real coordinate block per grade of the
/// signature, stored flattened in canonical (ascending-grade) order. The
/// decomposition into blocks is unique; equality is exact and componentwise.
class GradedVector {
 public:
  GradedVector() = default;
  /// Zero vector over sig.
  explicit GradedVector(GradingSignature sig);
  /// From flattened coordinates (length must equal sig.total_dim()).
  GradedVector(GradingSignature sig, std::vector<double> flat);

  const GradingSignature& sig() const { return sig_; }
  const std::vector<double>& flat() const { return data_; }
  std::vector<double>& flat() { return data_; }
  int size() const { return static_cast<int>(data_.size()); }

  std::span<double> block(std::size_t grade_index);
  std::span<const double> block(std::size_t grade_index) const;
  std::span<double> block_of(const Grade& g);
  std::span<const double> block_of(const Grade& g) const;

  bool operator==(const GradedVector& o) const {
    return sig_ == o.sig_ && data_ == o.data_;
  }
  bool operator!=(const GradedVector& o) const { return !(*this == o); }

  GradedVector& operator+=(const GradedVector& o);
  GradedVector& operator-=(const GradedVector& o);
  GradedVector& operator*=(double s);
  friend GradedVector operator+(GradedVector a, const GradedVector& b) { return a += b; }
  friend GradedVector operator-(GradedVector a, const GradedVector& b) { return a -= b; }
  friend GradedVector operator*(double s, GradedVector v) { return v *= s; }

 private:
  GradingSignature sig_;
  std::vector<double> data_;
};

/// The weighted scalar action: the block at grade q is scaled by lambda^q.
/// Integer grades admit any lambda != 0; rational grades require lambda > 0
/// (fractional powers of negatives are undefined over the reals). Other
/// variants have no real exponent. Violations throw std::domain_error.
GradedVector scalar_action(double lambda, const GradedVector& v);

/// Graded inner product: sum over grades of the per-block dot products.
/// Throws std::invalid_argument on signature mismatch.
double inner_product(const GradedVector& u, const GradedVector& v);

/// Direct sum: grades present in either input appear with summed dims;
/// for shared grades u's coordinates precede v's. Requires one variant.
GradedVector direct_sum(const GradedVector& u, const GradedVector& v);

/// Component dimensions of the tensor product: for each grade i reachable as
/// j + k, dim(V (x) W)_i = sum over j+k=i of dim V_j * dim W_k. Output grades
/// may be new (the grade set need not be closed under addition).
std::map<Grade, std::int64_t> tensor_component_dims(const GradingSignature& a,
                                                    const GradingSignature& b);

}  // namespace gradednet
