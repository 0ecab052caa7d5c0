#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "gradednet/gspace.hpp"

namespace gradednet {

/// Dense row-major matrix block, rows x cols.
struct Block {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  static Block zeros(int rows, int cols);
  static Block identity(int n);
  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
  bool operator==(const Block& o) const = default;
};

/// Count of scalar multiply-accumulate operations performed by apply() on
/// this thread since the last reset. Used to verify cost scaling.
std::int64_t mac_count();
void reset_mac_count();

/// A linear map between graded spaces that respects the grading.
///
/// Two kinds are supported:
///  - degree-structured (degree() has a value): the block at domain grade q
///    maps into the codomain block at grade q + degree. Domain grades whose
///    shifted grade is absent from the codomain are annihilated.
///  - collapse (degree() is empty): the codomain has a single grade and every
///    domain block feeds it. This is the shape of a readout that mixes all
///    grades into one output block and is deliberately not graded.
class GradedLinearMap {
 public:
  GradedLinearMap() = default;

  /// Degree-structured map. `blocks` is keyed by domain grade; each block must
  /// be dim(codomain at q+degree) x dim(domain at q). Grades of the domain
  /// without a stored block act as zero.
  static GradedLinearMap graded(GradingSignature domain, GradingSignature codomain,
                                Grade degree, std::map<Grade, Block> blocks);

  /// Collapse map onto a single-grade codomain: one block per domain grade,
  /// each dim(codomain) x dim(domain at q).
  static GradedLinearMap collapse(GradingSignature domain, GradingSignature codomain,
                                  std::map<Grade, Block> blocks);

  /// Zero map of the given kind (no stored blocks).
  static GradedLinearMap zero(GradingSignature domain, GradingSignature codomain,
                              std::optional<Grade> degree);

  const GradingSignature& domain() const { return domain_; }
  const GradingSignature& codomain() const { return codomain_; }
  const std::optional<Grade>& degree() const { return degree_; }
  const std::map<Grade, Block>& blocks() const { return blocks_; }
  std::map<Grade, Block>& blocks() { return blocks_; }

  /// Number of stored scalar entries over all blocks.
  std::int64_t parameter_count() const;

  /// Apply to a vector of the domain signature.
  GradedVector apply(const GradedVector& v) const;

  /// Dense matrix of the whole map, codomain.total_dim() x domain.total_dim(),
  /// row-major, blocks placed by the canonical signature offsets.
  Block to_dense() const;

  /// Reconstruct a degree-structured map from a dense matrix: entries outside
  /// the graded block pattern are dropped.
  static GradedLinearMap from_dense(const GradingSignature& domain,
                                    const GradingSignature& codomain, Grade degree,
                                    const Block& dense);

  bool operator==(const GradedLinearMap& o) const = default;

 private:
  GradingSignature domain_;
  GradingSignature codomain_;
  std::optional<Grade> degree_;
  std::map<Grade, Block> blocks_;
};

/// g after f: (g o f)(v) = g(f(v)). Degrees add via grade_add; composing with
/// a collapse map on either side yields a collapse map (the codomain of g must
/// then be single-grade). Signatures must chain: f.codomain == g.domain.
GradedLinearMap compose(const GradedLinearMap& g, const GradedLinearMap& f);

/// alpha*f + beta*g for maps with identical domain, codomain and degree.
/// Hom-spaces between graded spaces are closed under linear combination.
GradedLinearMap linear_combination(double alpha, const GradedLinearMap& f, double beta,
                                   const GradedLinearMap& g);

/// Verdict of a gradedness check on a dense matrix.
struct GradedCheckReport {
  bool ok = true;
  double max_leak = 0.0;           ///< largest |entry| outside the allowed pattern
  Grade worst_domain_grade = Grade::integer(0);    ///< column grade of that entry (when !ok)
  Grade worst_codomain_grade = Grade::integer(0);  ///< row grade of that entry (when !ok)
};

/// Check whether a dense matrix is degree-structured for `degree`: every entry
/// outside the allowed block pattern must have |entry| <= tol.
GradedCheckReport check_graded(const Block& dense, const GradingSignature& domain,
                               const GradingSignature& codomain, const Grade& degree,
                               double tol = 0.0);

/// Verdict of the module-homomorphism check on truncated polynomials.
struct ModuleHomReport {
  bool ok = true;
  std::int64_t fail_a = 0;  ///< first failing monomial exponent a (x^a acting)
  std::int64_t fail_m = 0;  ///< first failing argument exponent m
  double violation = 0.0;   ///< |f(x^a . x^m) - x^a . f(x^m)| at the failure
};

/// Check that a degree-structured endo-map on the truncated polynomial ring
/// k[x]/(x^{max_degree+1}) (one dimension per integer grade 0..max_degree)
/// commutes with multiplication by x^a: f(x^a . x^m) = x^a . f(x^m) for all
/// a, m >= 1 with a + m <= max_degree and a + deg(f) + m <= max_degree.
/// Scans a ascending, then m ascending, and reports the first failure.
ModuleHomReport check_module_hom(const GradedLinearMap& f, std::int64_t max_degree,
                                 double tol = 1e-12);

}  // namespace gradednet
