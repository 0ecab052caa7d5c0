#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gradednet {

enum class GradeVariant { Integer, Rational, Pair, Parity };

std::string to_string(GradeVariant v);

/// A grade index. One of:
///   - integer n >= 0
///   - rational p/q, stored reduced with q >= 1
///   - pair (m, n) of non-negative integers, ordered lexicographically
///   - parity 0 (even) / 1 (odd)
///
/// Grades of different variants never compare equal; ordering across variants
/// exists only so Grade can key ordered containers.
class Grade {
 public:
  static Grade integer(std::int64_t n);
  static Grade rational(std::int64_t p, std::int64_t q);
  static Grade pair(std::int64_t m, std::int64_t n);
  static Grade parity(std::int64_t bit);
  static Grade even() { return parity(0); }
  static Grade odd() { return parity(1); }

  GradeVariant variant() const { return variant_; }
  std::int64_t first() const { return a_; }
  std::int64_t second() const { return b_; }
  std::int64_t numerator() const { return a_; }
  std::int64_t denominator() const { return b_; }

  /// The grade as a real exponent q for the scalar action lambda^q.
  /// Defined for integer and rational variants only.
  double as_exponent() const;

  bool is_zero() const;

  /// Canonical text form: "2", "1/2", "(1,2)", "even"/"odd".
  std::string str() const;
  /// Inverse of str(); the variant disambiguates "p/q" from plain integers.
  static Grade parse(const std::string& text, GradeVariant variant);

  bool operator==(const Grade& o) const {
    return variant_ == o.variant_ && a_ == o.a_ && b_ == o.b_;
  }
  bool operator!=(const Grade& o) const { return !(*this == o); }
  /// Total order within a variant (numeric / lexicographic); variants are
  /// segregated first so mixed containers stay well-ordered.
  bool operator<(const Grade& o) const;

 private:
  Grade(GradeVariant v, std::int64_t a, std::int64_t b)
      : variant_(v), a_(a), b_(b) {}

  GradeVariant variant_;
  std::int64_t a_;
  std::int64_t b_;
};

/// Monoid sum of two grades: integer/rational addition, componentwise for
/// pairs, XOR for parity. Throws std::invalid_argument on variant mismatch.
Grade grade_add(const Grade& a, const Grade& b);

/// The monoid identity for a variant (0, 0/1, (0,0), even).
Grade grade_zero(GradeVariant v);

struct GradeDim {
  Grade grade;
  int dim;
};

struct SignatureReport {
  bool ok;
  std::string violation;  // empty when ok; otherwise names the first violated invariant
};

/// Checks the signature invariants on a raw entry list: grades pairwise
/// distinct, all dims >= 1, single variant. Report-returning, never throws.
SignatureReport validate_signature(const std::vector<GradeDim>& entries);

/// An ordered list of (grade, dim) pairs describing a graded space.
/// Always valid: construction canonicalizes to ascending grade order and
/// throws std::invalid_argument on any invariant violation.
class GradingSignature {
 public:
  GradingSignature() = default;
  explicit GradingSignature(std::vector<GradeDim> entries);

  const std::vector<GradeDim>& entries() const { return entries_; }
  std::size_t grade_count() const { return entries_.size(); }
  int total_dim() const { return total_dim_; }
  bool empty() const { return entries_.empty(); }

  GradeVariant variant() const;  // throws if empty

  const Grade& grade_at(std::size_t i) const { return entries_[i].grade; }
  int dim_at(std::size_t i) const { return entries_[i].dim; }
  /// Offset of block i in the flattened coordinate vector.
  int offset_at(std::size_t i) const { return offsets_[i]; }

  std::optional<std::size_t> index_of(const Grade& g) const;
  bool has(const Grade& g) const { return index_of(g).has_value(); }
  int dim_of(const Grade& g) const;  // throws if absent

  bool operator==(const GradingSignature& o) const {
    return entries_.size() == o.entries_.size() &&
           [&] {
             for (std::size_t i = 0; i < entries_.size(); ++i) {
               if (entries_[i].grade != o.entries_[i].grade ||
                   entries_[i].dim != o.entries_[i].dim)
                 return false;
             }
             return true;
           }();
  }
  bool operator!=(const GradingSignature& o) const { return !(*this == o); }

  /// Convenience: integer grades with dim 1 each, e.g. {2,4,6,10}.
  static GradingSignature weights(const std::vector<std::int64_t>& grades);
  /// Parity signature with the given even/odd dims.
  static GradingSignature parity_pair(int even_dim, int odd_dim);

 private:
  std::vector<GradeDim> entries_;
  std::vector<int> offsets_;
  int total_dim_ = 0;
};

}  // namespace gradednet
