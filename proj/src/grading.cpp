#include "gradednet/grading.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace gradednet {

std::string to_string(GradeVariant v) {
  switch (v) {
    case GradeVariant::Integer: return "integer";
    case GradeVariant::Rational: return "rational";
    case GradeVariant::Pair: return "pair";
    case GradeVariant::Parity: return "parity";
  }
  return "?";
}

Grade Grade::integer(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("integer grade must be non-negative");
  return Grade(GradeVariant::Integer, n, 0);
}

Grade Grade::rational(std::int64_t p, std::int64_t q) {
  if (q == 0) throw std::invalid_argument("rational grade denominator must be nonzero");
  if (q < 0) { p = -p; q = -q; }
  std::int64_t g = std::gcd(p < 0 ? -p : p, q);
  if (g > 1) { p /= g; q /= g; }
  return Grade(GradeVariant::Rational, p, q);
}

Grade Grade::pair(std::int64_t m, std::int64_t n) {
  if (m < 0 || n < 0) throw std::invalid_argument("pair grade components must be non-negative");
  return Grade(GradeVariant::Pair, m, n);
}

Grade Grade::parity(std::int64_t bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("parity grade must be 0 or 1");
  return Grade(GradeVariant::Parity, bit, 0);
}

double Grade::as_exponent() const {
  switch (variant_) {
    case GradeVariant::Integer: return static_cast<double>(a_);
    case GradeVariant::Rational:
      return static_cast<double>(a_) / static_cast<double>(b_);
    default:
      throw std::domain_error("grade has no real exponent (variant " +
                              to_string(variant_) + ")");
  }
}

bool Grade::is_zero() const {
  switch (variant_) {
    case GradeVariant::Integer: return a_ == 0;
    case GradeVariant::Rational: return a_ == 0;
    case GradeVariant::Pair: return a_ == 0 && b_ == 0;
    case GradeVariant::Parity: return a_ == 0;
  }
  return false;
}

std::string Grade::str() const {
  switch (variant_) {
    case GradeVariant::Integer: return std::to_string(a_);
    case GradeVariant::Rational:
      if (b_ == 1) return std::to_string(a_);
      return std::to_string(a_) + "/" + std::to_string(b_);
    case GradeVariant::Pair:
      return "(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
    case GradeVariant::Parity: return a_ == 0 ? "even" : "odd";
  }
  return "?";
}

Grade Grade::parse(const std::string& text, GradeVariant variant) {
  auto fail = [&]() -> Grade {
    throw std::invalid_argument("cannot parse grade '" + text + "' as " +
                                to_string(variant));
  };
  try {
    switch (variant) {
      case GradeVariant::Integer:
        return integer(std::stoll(text));
      case GradeVariant::Rational: {
        auto slash = text.find('/');
        if (slash == std::string::npos) return rational(std::stoll(text), 1);
        return rational(std::stoll(text.substr(0, slash)),
                        std::stoll(text.substr(slash + 1)));
      }
      case GradeVariant::Pair: {
        if (text.size() < 5 || text.front() != '(' || text.back() != ')') return fail();
        auto comma = text.find(',');
        if (comma == std::string::npos) return fail();
        return pair(std::stoll(text.substr(1, comma - 1)),
                    std::stoll(text.substr(comma + 1, text.size() - comma - 2)));
      }
      case GradeVariant::Parity:
        if (text == "even" || text == "0") return parity(0);
        if (text == "odd" || text == "1") return parity(1);
        return fail();
    }
  } catch (const std::exception&) {
    // fall through to fail() below (covers stoll parse and range errors)
  }
  return fail();
}

bool Grade::operator<(const Grade& o) const {
  if (variant_ != o.variant_) return static_cast<int>(variant_) < static_cast<int>(o.variant_);
  switch (variant_) {
    case GradeVariant::Integer:
    case GradeVariant::Parity:
      return a_ < o.a_;
    case GradeVariant::Rational:
      // p1/q1 < p2/q2 with positive denominators.
      return a_ * o.b_ < o.a_ * b_;
    case GradeVariant::Pair:
      return a_ != o.a_ ? a_ < o.a_ : b_ < o.b_;
  }
  return false;
}

Grade grade_add(const Grade& a, const Grade& b) {
  if (a.variant() != b.variant())
    throw std::invalid_argument("grade_add: variant mismatch (" +
                                to_string(a.variant()) + " vs " +
                                to_string(b.variant()) + ")");
  switch (a.variant()) {
    case GradeVariant::Integer:
      return Grade::integer(a.first() + b.first());
    case GradeVariant::Rational:
      return Grade::rational(
          a.numerator() * b.denominator() + b.numerator() * a.denominator(),
          a.denominator() * b.denominator());
    case GradeVariant::Pair:
      return Grade::pair(a.first() + b.first(), a.second() + b.second());
    case GradeVariant::Parity:
      return Grade::parity((a.first() + b.first()) % 2);
  }
  throw std::logic_error("unreachable");
}

Grade grade_zero(GradeVariant v) {
  switch (v) {
    case GradeVariant::Integer: return Grade::integer(0);
    case GradeVariant::Rational: return Grade::rational(0, 1);
    case GradeVariant::Pair: return Grade::pair(0, 0);
    case GradeVariant::Parity: return Grade::parity(0);
  }
  throw std::logic_error("unreachable");
}

SignatureReport validate_signature(const std::vector<GradeDim>& entries) {
  if (entries.empty()) return {true, ""};
  GradeVariant v = entries.front().grade.variant();
  for (const auto& e : entries) {
    if (e.grade.variant() != v)
      return {false, "mixed-variant: grades " + entries.front().grade.str() +
                         " and " + e.grade.str() + " have different variants"};
  }
  for (const auto& e : entries) {
    if (e.dim <= 0)
      return {false, "zero-dimension: grade " + e.grade.str() + " has dim " +
                         std::to_string(e.dim)};
  }
  std::set<Grade> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.grade).second)
      return {false, "duplicate-grade: " + e.grade.str()};
  }
  return {true, ""};
}

GradingSignature::GradingSignature(std::vector<GradeDim> entries)
    : entries_(std::move(entries)) {
  auto report = validate_signature(entries_);
  if (!report.ok) throw std::invalid_argument("invalid signature: " + report.violation);
  std::sort(entries_.begin(), entries_.end(),
            [](const GradeDim& x, const GradeDim& y) { return x.grade < y.grade; });
  offsets_.resize(entries_.size());
  total_dim_ = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    offsets_[i] = total_dim_;
    total_dim_ += entries_[i].dim;
  }
}

GradeVariant GradingSignature::variant() const {
  if (entries_.empty()) throw std::logic_error("empty signature has no variant");
  return entries_.front().grade.variant();
}

std::optional<std::size_t> GradingSignature::index_of(const Grade& g) const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].grade == g) return i;
  return std::nullopt;
}

int GradingSignature::dim_of(const Grade& g) const {
  auto i = index_of(g);
  if (!i) throw std::invalid_argument("grade " + g.str() + " not in signature");
  return entries_[*i].dim;
}

GradingSignature GradingSignature::weights(const std::vector<std::int64_t>& grades) {
  std::vector<GradeDim> entries;
  entries.reserve(grades.size());
  for (auto g : grades) entries.push_back({Grade::integer(g), 1});
  return GradingSignature(std::move(entries));
}

GradingSignature GradingSignature::parity_pair(int even_dim, int odd_dim) {
  return GradingSignature({{Grade::even(), even_dim}, {Grade::odd(), odd_dim}});
}

}  // namespace gradednet
