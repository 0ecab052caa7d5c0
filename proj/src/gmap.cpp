#include "gradednet/gmap.hpp"

#include <cmath>
#include <stdexcept>

namespace gradednet {

namespace {

thread_local std::int64_t g_mac_count = 0;

void require_variant_match(const GradingSignature& domain, const GradingSignature& codomain,
                           const std::optional<Grade>& degree) {
  if (!domain.empty() && !codomain.empty() && domain.variant() != codomain.variant())
    throw std::invalid_argument("map domain and codomain have different grade variants");
  if (degree && !domain.empty() && degree->variant() != domain.variant())
    throw std::invalid_argument("map degree variant differs from signature variant");
}

void check_block_shapes(const GradingSignature& domain, const GradingSignature& codomain,
                        const std::optional<Grade>& degree,
                        const std::map<Grade, Block>& blocks) {
  for (const auto& [q, blk] : blocks) {
    auto di = domain.index_of(q);
    if (!di) throw std::invalid_argument("block stored for grade " + q.str() + " not in domain");
    Grade target = degree ? grade_add(q, *degree) : codomain.grade_at(0);
    auto ci = codomain.index_of(target);
    if (!ci)
      throw std::invalid_argument("block at grade " + q.str() + " targets grade " +
                                  target.str() + " absent from codomain");
    if (blk.rows != codomain.dim_at(*ci) || blk.cols != domain.dim_at(*di))
      throw std::invalid_argument("block at grade " + q.str() + " has shape " +
                                  std::to_string(blk.rows) + "x" + std::to_string(blk.cols) +
                                  ", expected " + std::to_string(codomain.dim_at(*ci)) + "x" +
                                  std::to_string(domain.dim_at(*di)));
    if (static_cast<int>(blk.a.size()) != blk.rows * blk.cols)
      throw std::invalid_argument("block at grade " + q.str() + " has wrong entry count");
  }
}

// y (+)= B x, counting one MAC per matrix entry.
void mac_into(std::span<double> y, const Block& b, std::span<const double> x, bool accumulate) {
  if (!accumulate)
    for (double& v : y) v = 0.0;
  for (int r = 0; r < b.rows; ++r) {
    double acc = 0.0;
    const double* row = b.a.data() + static_cast<std::size_t>(r) * b.cols;
    for (int c = 0; c < b.cols; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] += acc;
  }
  g_mac_count += static_cast<std::int64_t>(b.rows) * b.cols;
}

}  // namespace

Block Block::zeros(int rows, int cols) {
  Block b;
  b.rows = rows;
  b.cols = cols;
  b.a.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  return b;
}

Block Block::identity(int n) {
  Block b = zeros(n, n);
  for (int i = 0; i < n; ++i) b.at(i, i) = 1.0;
  return b;
}

std::int64_t mac_count() { return g_mac_count; }
void reset_mac_count() { g_mac_count = 0; }

GradedLinearMap GradedLinearMap::graded(GradingSignature domain, GradingSignature codomain,
                                        Grade degree, std::map<Grade, Block> blocks) {
  GradedLinearMap f;
  f.domain_ = std::move(domain);
  f.codomain_ = std::move(codomain);
  f.degree_ = degree;
  f.blocks_ = std::move(blocks);
  require_variant_match(f.domain_, f.codomain_, f.degree_);
  check_block_shapes(f.domain_, f.codomain_, f.degree_, f.blocks_);
  return f;
}

GradedLinearMap GradedLinearMap::collapse(GradingSignature domain, GradingSignature codomain,
                                          std::map<Grade, Block> blocks) {
  if (codomain.grade_count() != 1)
    throw std::invalid_argument("collapse map requires a single-grade codomain");
  GradedLinearMap f;
  f.domain_ = std::move(domain);
  f.codomain_ = std::move(codomain);
  f.degree_ = std::nullopt;
  f.blocks_ = std::move(blocks);
  require_variant_match(f.domain_, f.codomain_, f.degree_);
  check_block_shapes(f.domain_, f.codomain_, f.degree_, f.blocks_);
  return f;
}

GradedLinearMap GradedLinearMap::zero(GradingSignature domain, GradingSignature codomain,
                                      std::optional<Grade> degree) {
  if (!degree && codomain.grade_count() != 1)
    throw std::invalid_argument("collapse map requires a single-grade codomain");
  GradedLinearMap f;
  f.domain_ = std::move(domain);
  f.codomain_ = std::move(codomain);
  f.degree_ = degree;
  require_variant_match(f.domain_, f.codomain_, f.degree_);
  return f;
}

std::int64_t GradedLinearMap::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& [q, blk] : blocks_) n += static_cast<std::int64_t>(blk.a.size());
  return n;
}

GradedVector GradedLinearMap::apply(const GradedVector& v) const {
  if (v.sig() != domain_)
    throw std::invalid_argument("apply: vector signature does not match map domain");
  GradedVector out(codomain_);
  for (const auto& [q, blk] : blocks_) {
    Grade target = degree_ ? grade_add(q, *degree_) : codomain_.grade_at(0);
    // Collapse maps accumulate every domain block into the single output block;
    // degree-structured targets are distinct per domain grade, so plain writes
    // into the zero-initialized output are equivalent either way.
    mac_into(out.block_of(target), blk, v.block_of(q), /*accumulate=*/true);
  }
  return out;
}

Block GradedLinearMap::to_dense() const {
  Block dense = Block::zeros(codomain_.total_dim(), domain_.total_dim());
  for (const auto& [q, blk] : blocks_) {
    Grade target = degree_ ? grade_add(q, *degree_) : codomain_.grade_at(0);
    int row0 = codomain_.offset_at(*codomain_.index_of(target));
    int col0 = domain_.offset_at(*domain_.index_of(q));
    for (int r = 0; r < blk.rows; ++r)
      for (int c = 0; c < blk.cols; ++c) dense.at(row0 + r, col0 + c) = blk.at(r, c);
  }
  return dense;
}

GradedLinearMap GradedLinearMap::from_dense(const GradingSignature& domain,
                                            const GradingSignature& codomain, Grade degree,
                                            const Block& dense) {
  if (dense.rows != codomain.total_dim() || dense.cols != domain.total_dim())
    throw std::invalid_argument("from_dense: matrix shape does not match signatures");
  std::map<Grade, Block> blocks;
  for (std::size_t i = 0; i < domain.grade_count(); ++i) {
    Grade q = domain.grade_at(i);
    auto ci = codomain.index_of(grade_add(q, degree));
    if (!ci) continue;
    Block blk = Block::zeros(codomain.dim_at(*ci), domain.dim_at(i));
    int row0 = codomain.offset_at(*ci);
    int col0 = domain.offset_at(i);
    for (int r = 0; r < blk.rows; ++r)
      for (int c = 0; c < blk.cols; ++c) blk.at(r, c) = dense.at(row0 + r, col0 + c);
    blocks.emplace(q, std::move(blk));
  }
  return graded(domain, codomain, degree, std::move(blocks));
}

GradedLinearMap compose(const GradedLinearMap& g, const GradedLinearMap& f) {
  if (f.codomain() != g.domain())
    throw std::invalid_argument("compose: f codomain does not match g domain");

  // Matrix product of the blocks that chain through f's codomain.
  auto chain = [](const Block& gb, const Block& fb) {
    Block out = Block::zeros(gb.rows, fb.cols);
    for (int r = 0; r < gb.rows; ++r)
      for (int k = 0; k < gb.cols; ++k) {
        double gv = gb.at(r, k);
        if (gv == 0.0) continue;
        for (int c = 0; c < fb.cols; ++c) out.at(r, c) += gv * fb.at(k, c);
      }
    return out;
  };

  std::map<Grade, Block> blocks;
  for (const auto& [q, fb] : f.blocks()) {
    Grade mid = f.degree() ? grade_add(q, *f.degree()) : f.codomain().grade_at(0);
    auto it = g.blocks().find(mid);
    if (it == g.blocks().end()) continue;
    blocks.emplace(q, chain(it->second, fb));
  }

  if (f.degree() && g.degree())
    return GradedLinearMap::graded(f.domain(), g.codomain(),
                                   grade_add(*f.degree(), *g.degree()), std::move(blocks));
  if (g.codomain().grade_count() != 1)
    throw std::invalid_argument(
        "compose: collapse composite requires a single-grade codomain");
  return GradedLinearMap::collapse(f.domain(), g.codomain(), std::move(blocks));
}

GradedLinearMap linear_combination(double alpha, const GradedLinearMap& f, double beta,
                                   const GradedLinearMap& g) {
  if (f.domain() != g.domain() || f.codomain() != g.codomain() || f.degree() != g.degree())
    throw std::invalid_argument("linear_combination: maps have different shapes");
  std::map<Grade, Block> blocks = f.blocks();
  for (auto& [q, blk] : blocks)
    for (double& x : blk.a) x *= alpha;
  for (const auto& [q, gb] : g.blocks()) {
    auto [it, inserted] = blocks.emplace(q, Block::zeros(gb.rows, gb.cols));
    for (std::size_t i = 0; i < gb.a.size(); ++i) it->second.a[i] += beta * gb.a[i];
  }
  if (f.degree())
    return GradedLinearMap::graded(f.domain(), f.codomain(), *f.degree(), std::move(blocks));
  return GradedLinearMap::collapse(f.domain(), f.codomain(), std::move(blocks));
}

GradedCheckReport check_graded(const Block& dense, const GradingSignature& domain,
                               const GradingSignature& codomain, const Grade& degree,
                               double tol) {
  if (dense.rows != codomain.total_dim() || dense.cols != domain.total_dim())
    throw std::invalid_argument("check_graded: matrix shape does not match signatures");

  GradedCheckReport rep;
  for (std::size_t j = 0; j < domain.grade_count(); ++j) {
    Grade q = domain.grade_at(j);
    Grade target = grade_add(q, degree);
    int col0 = domain.offset_at(j);
    for (std::size_t i = 0; i < codomain.grade_count(); ++i) {
      if (codomain.grade_at(i) == target) continue;
      int row0 = codomain.offset_at(i);
      for (int r = 0; r < codomain.dim_at(i); ++r)
        for (int c = 0; c < domain.dim_at(j); ++c) {
          double mag = std::abs(dense.at(row0 + r, col0 + c));
          if (mag > rep.max_leak) {
            rep.max_leak = mag;
            rep.worst_domain_grade = q;
            rep.worst_codomain_grade = codomain.grade_at(i);
          }
        }
    }
  }
  rep.ok = rep.max_leak <= tol;
  return rep;
}

ModuleHomReport check_module_hom(const GradedLinearMap& f, std::int64_t max_degree,
                                 double tol) {
  const auto& sig = f.domain();
  if (f.codomain() != sig)
    throw std::invalid_argument("check_module_hom: domain and codomain must coincide");
  if (!f.degree())
    throw std::invalid_argument("check_module_hom: map must be degree-structured");
  if (sig.empty() || sig.variant() != GradeVariant::Integer)
    throw std::invalid_argument("check_module_hom: requires integer grades");
  if (static_cast<std::int64_t>(sig.grade_count()) != max_degree + 1 || sig.total_dim() != max_degree + 1)
    throw std::invalid_argument(
        "check_module_hom: signature must be grades 0..max_degree, dim 1 each");

  std::int64_t d = f.degree()->first();
  // Scalar f_k at monomial grade k; absent block means annihilation.
  auto coeff = [&](std::int64_t k) {
    auto it = f.blocks().find(Grade::integer(k));
    return it == f.blocks().end() ? 0.0 : it->second.a[0];
  };

  ModuleHomReport rep;
  for (std::int64_t a = 1; a <= max_degree; ++a)
    for (std::int64_t m = 1; m <= max_degree; ++m) {
      if (a + m > max_degree || a + d + m > max_degree) continue;
      // f(x^a . x^m): the product survives truncation, so this is f at x^{a+m}.
      double lhs = (a + m + d >= 0) ? coeff(a + m) : 0.0;
      // x^a . f(x^m): f lands at x^{m+d} when that grade exists, then shifts by a.
      double rhs = (m + d >= 0 && m + d <= max_degree) ? coeff(m) : 0.0;
      double gap = std::abs(lhs - rhs);
      if (gap > tol) {
        rep.ok = false;
        rep.fail_a = a;
        rep.fail_m = m;
        rep.violation = gap;
        return rep;
      }
    }
  return rep;
}

}  // namespace gradednet
