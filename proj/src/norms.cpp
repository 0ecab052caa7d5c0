#include "gradednet/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace gradednet {

namespace {

double block_sq(std::span<const double> b) {
  double s = 0.0;
  for (double x : b) s += x * x;
  return s;
}

}  // namespace

LossWeights LossWeights::uniform(const GradingSignature& sig, double value) {
  LossWeights lw;
  for (const auto& e : sig.entries()) lw.w.emplace(e.grade, value);
  return lw;
}

void LossWeights::validate_for(const GradingSignature& sig) const {
  for (const auto& e : sig.entries())
    if (!w.count(e.grade))
      throw std::invalid_argument("loss weights: missing grade " + e.grade.str());
  for (const auto& [g, wi] : w) {
    if (!sig.has(g))
      throw std::invalid_argument("loss weights: grade " + g.str() + " not in signature");
    if (!(wi > 0.0))
      throw std::invalid_argument("loss weights: weight at grade " + g.str() +
                                  " must be positive");
  }
}

double LossWeights::at(const Grade& g) const {
  auto it = w.find(g);
  if (it == w.end())
    throw std::invalid_argument("loss weights: no weight for grade " + g.str());
  return it->second;
}

double euclidean_norm(const GradedVector& v) {
  double s = 0.0;
  for (double x : v.flat()) s += x * x;
  return std::sqrt(s);
}

double homogeneous_norm(const GradedVector& v) {
  const auto& sig = v.sig();
  if (sig.empty()) return 0.0;
  GradeVariant var = sig.variant();
  if (var != GradeVariant::Integer && var != GradeVariant::Rational)
    throw std::domain_error("homogeneous_norm requires integer or rational grades, got " +
                            to_string(var));
  const double r = static_cast<double>(sig.grade_count());
  double sum = 0.0;
  for (std::size_t i = 0; i < sig.grade_count(); ++i) {
    double bn = std::sqrt(block_sq(v.block(i)));
    sum += std::pow(bn, 2.0 * r / static_cast<double>(i + 1));
  }
  return std::pow(sum, 1.0 / (2.0 * r));
}

double weighted_norm(const GradedVector& v, const LossWeights& w) {
  const auto& sig = v.sig();
  w.validate_for(sig);
  double s = 0.0;
  for (std::size_t i = 0; i < sig.grade_count(); ++i)
    s += w.at(sig.grade_at(i)) * block_sq(v.block(i));
  return std::sqrt(s);
}

double graded_loss(const GradedVector& pred, const GradedVector& truth,
                   const LossWeights& w) {
  if (pred.sig() != truth.sig())
    throw std::invalid_argument("graded_loss: signature mismatch");
  w.validate_for(pred.sig());
  double s = 0.0;
  for (std::size_t i = 0; i < pred.sig().grade_count(); ++i) {
    auto p = pred.block(i);
    auto t = truth.block(i);
    double block = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      double d = p[j] - t[j];
      block += d * d;
    }
    s += w.at(pred.sig().grade_at(i)) * block;
  }
  return s;
}

GradedVector graded_loss_gradient(const GradedVector& pred, const GradedVector& truth,
                                  const LossWeights& w) {
  if (pred.sig() != truth.sig())
    throw std::invalid_argument("graded_loss_gradient: signature mismatch");
  w.validate_for(pred.sig());
  GradedVector g(pred.sig());
  for (std::size_t i = 0; i < pred.sig().grade_count(); ++i) {
    double wi = w.at(pred.sig().grade_at(i));
    auto p = pred.block(i);
    auto t = truth.block(i);
    auto out = g.block(i);
    for (std::size_t j = 0; j < p.size(); ++j) out[j] = 2.0 * wi * (p[j] - t[j]);
  }
  return g;
}

}  // namespace gradednet
