#include "gradednet/gspace.hpp"

#include <cmath>
#include <stdexcept>

namespace gradednet {

GradedVector::GradedVector(GradingSignature sig)
    : sig_(std::move(sig)), data_(static_cast<std::size_t>(sig_.total_dim()), 0.0) {}

GradedVector::GradedVector(GradingSignature sig, std::vector<double> flat)
    : sig_(std::move(sig)), data_(std::move(flat)) {
  if (static_cast<int>(data_.size()) != sig_.total_dim())
    throw std::invalid_argument(
        "coordinate count " + std::to_string(data_.size()) +
        " does not match signature total dim " + std::to_string(sig_.total_dim()));
}

std::span<double> GradedVector::block(std::size_t i) {
  return {data_.data() + sig_.offset_at(i), static_cast<std::size_t>(sig_.dim_at(i))};
}

std::span<const double> GradedVector::block(std::size_t i) const {
  return {data_.data() + sig_.offset_at(i), static_cast<std::size_t>(sig_.dim_at(i))};
}

std::span<double> GradedVector::block_of(const Grade& g) {
  auto i = sig_.index_of(g);
  if (!i) throw std::invalid_argument("grade " + g.str() + " not in signature");
  return block(*i);
}

std::span<const double> GradedVector::block_of(const Grade& g) const {
  auto i = sig_.index_of(g);
  if (!i) throw std::invalid_argument("grade " + g.str() + " not in signature");
  return block(*i);
}

GradedVector& GradedVector::operator+=(const GradedVector& o) {
  if (sig_ != o.sig_) throw std::invalid_argument("signature mismatch in vector addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

GradedVector& GradedVector::operator-=(const GradedVector& o) {
  if (sig_ != o.sig_) throw std::invalid_argument("signature mismatch in vector subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

GradedVector& GradedVector::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

GradedVector scalar_action(double lambda, const GradedVector& v) {
  if (lambda == 0.0) throw std::domain_error("scalar_action: lambda must be nonzero");
  const auto& sig = v.sig();
  if (!sig.empty()) {
    GradeVariant var = sig.variant();
    if (var != GradeVariant::Integer && var != GradeVariant::Rational)
      throw std::domain_error("scalar_action requires integer or rational grades, got " +
                              to_string(var));
    if (lambda < 0.0 && var != GradeVariant::Integer)
      throw std::domain_error(
          "scalar_action: negative lambda is defined only for integer grades");
  }
  GradedVector out = v;
  for (std::size_t i = 0; i < sig.grade_count(); ++i) {
    double factor = std::pow(lambda, sig.grade_at(i).as_exponent());
    for (double& x : out.block(i)) x *= factor;
  }
  return out;
}

double inner_product(const GradedVector& u, const GradedVector& v) {
  if (u.sig() != v.sig())
    throw std::invalid_argument("inner_product: signature mismatch");
  double acc = 0.0;
  const auto& a = u.flat();
  const auto& b = v.flat();
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

GradedVector direct_sum(const GradedVector& u, const GradedVector& v) {
  const auto& sa = u.sig();
  const auto& sb = v.sig();
  if (!sa.empty() && !sb.empty() && sa.variant() != sb.variant())
    throw std::invalid_argument("direct_sum: grade variant mismatch");

  // Union of grades with summed dims, in canonical order.
  std::map<Grade, int> dims;
  for (const auto& e : sa.entries()) dims[e.grade] += e.dim;
  for (const auto& e : sb.entries()) dims[e.grade] += e.dim;
  std::vector<GradeDim> entries;
  entries.reserve(dims.size());
  for (const auto& [g, d] : dims) entries.push_back({g, d});
  GradingSignature sig(std::move(entries));

  GradedVector out(sig);
  for (std::size_t i = 0; i < sig.grade_count(); ++i) {
    auto dst = out.block(i);
    std::size_t at = 0;
    if (auto ia = sa.index_of(sig.grade_at(i))) {
      auto src = u.block(*ia);
      for (double x : src) dst[at++] = x;
    }
    if (auto ib = sb.index_of(sig.grade_at(i))) {
      auto src = v.block(*ib);
      for (double x : src) dst[at++] = x;
    }
  }
  return out;
}

std::map<Grade, std::int64_t> tensor_component_dims(const GradingSignature& a,
                                                    const GradingSignature& b) {
  std::map<Grade, std::int64_t> out;
  for (const auto& ea : a.entries())
    for (const auto& eb : b.entries())
      out[grade_add(ea.grade, eb.grade)] +=
          static_cast<std::int64_t>(ea.dim) * static_cast<std::int64_t>(eb.dim);
  return out;
}

}  // namespace gradednet
