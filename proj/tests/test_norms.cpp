#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gradednet/norms.hpp"
#include "gradednet/rng.hpp"
#include "oracles.hpp"

using namespace gradednet;

namespace {

GradingSignature sig23_dims34() {
  return GradingSignature({{Grade::integer(2), 3}, {Grade::integer(3), 4}});
}

/// Scales the i-th ascending block by t^i (1-based), the dilation the
/// homogeneous norm is calibrated to.
GradedVector dilate(double t, const GradedVector& v) {
  GradedVector out = v;
  for (std::size_t i = 0; i < v.sig().grade_count(); ++i) {
    double factor = std::pow(t, static_cast<double>(i + 1));
    for (double& x : out.block(i)) x *= factor;
  }
  return out;
}

}  // namespace

TEST_CASE("euclidean norm basics") {
  GradingSignature sig = sig23_dims34();
  GradedVector ones(sig, std::vector<double>(7, 1.0));
  CHECK(euclidean_norm(ones) == doctest::Approx(std::sqrt(7.0)));
  CHECK(euclidean_norm(GradedVector(sig)) == 0.0);
}

TEST_CASE("euclidean norm axioms on random pairs") {
  Rng rng(31);
  GradingSignature sig = sig23_dims34();
  for (int i = 0; i < 1000; ++i) {
    GradedVector u = oracle::random_vector(rng, sig);
    GradedVector v = oracle::random_vector(rng, sig);
    double lam = rng.normal();
    CHECK(euclidean_norm(u) >= 0.0);
    CHECK(euclidean_norm(lam * u) ==
          doctest::Approx(std::abs(lam) * euclidean_norm(u)).epsilon(1e-12));
    CHECK(euclidean_norm(u + v) <=
          euclidean_norm(u) + euclidean_norm(v) + 1e-12);
  }
}

TEST_CASE("homogeneous norm of unit coordinate vectors is 1") {
  GradingSignature sig = sig23_dims34();
  GradedVector e1(sig, {1, 0, 0, 0, 0, 0, 0});
  CHECK(homogeneous_norm(e1) == doctest::Approx(1.0));
  GradedVector e7(sig, {0, 0, 0, 0, 0, 0, 1});
  CHECK(homogeneous_norm(e7) == doctest::Approx(1.0));
}

TEST_CASE("homogeneous norm with two grades uses exponents 4 and 2") {
  GradingSignature sig = sig23_dims34();
  Rng rng(33);
  GradedVector v = oracle::random_vector(rng, sig);
  double n1 = 0.0, n2 = 0.0;
  for (double x : v.block(0)) n1 += x * x;
  for (double x : v.block(1)) n2 += x * x;
  double want = std::pow(std::pow(std::sqrt(n1), 4.0) + std::pow(std::sqrt(n2), 2.0),
                         1.0 / 4.0);
  CHECK(homogeneous_norm(v) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("homogeneous norm dilation law") {
  Rng rng(35);
  for (int i = 0; i < 100; ++i) {
    GradeVariant variant = (i % 2 == 0) ? GradeVariant::Integer : GradeVariant::Rational;
    GradingSignature sig = oracle::random_signature(rng, variant, 5);
    GradedVector v = oracle::random_vector(rng, sig);
    double t = rng.normal();
    if (std::abs(t) < 0.1) t = 0.5;
    double lhs = homogeneous_norm(dilate(t, v));
    double rhs = std::abs(t) * homogeneous_norm(v);
    CHECK(oracle::rel_err(lhs, rhs) <= 1e-10);
  }
}

TEST_CASE("homogeneous norm rejects non-numeric grade variants") {
  GradedVector p(GradingSignature::parity_pair(2, 2), {1, 1, 1, 1});
  CHECK_THROWS_AS(homogeneous_norm(p), std::domain_error);
  GradingSignature pr({{Grade::pair(1, 0), 1}});
  CHECK_THROWS_AS(homogeneous_norm(GradedVector(pr, {1.0})), std::domain_error);
}

TEST_CASE("homogeneous norm axioms on random pairs") {
  Rng rng(37);
  GradingSignature sig({{Grade::integer(1), 2}, {Grade::integer(2), 2},
                        {Grade::integer(5), 3}});
  for (int i = 0; i < 1000; ++i) {
    GradedVector u = oracle::random_vector(rng, sig);
    GradedVector v = oracle::random_vector(rng, sig);
    CHECK(homogeneous_norm(u) >= 0.0);
    CHECK(homogeneous_norm(u + v) <=
          homogeneous_norm(u) + homogeneous_norm(v) + 1e-12);
  }
  CHECK(homogeneous_norm(GradedVector(sig)) == 0.0);
}

TEST_CASE("weighted norm on the worked two-grade example") {
  GradingSignature sig = sig23_dims34();
  LossWeights w;
  w.w.emplace(Grade::integer(2), 2.0);
  w.w.emplace(Grade::integer(3), 1.0);
  GradedVector ones(sig, std::vector<double>(7, 1.0));
  CHECK(weighted_norm(ones, w) == doctest::Approx(std::sqrt(10.0)));

  LossWeights unit = LossWeights::uniform(sig);
  Rng rng(39);
  GradedVector v = oracle::random_vector(rng, sig);
  CHECK(weighted_norm(v, unit) == doctest::Approx(euclidean_norm(v)));
}

TEST_CASE("weighted norm equivalence bounds") {
  Rng rng(41);
  GradingSignature sig = sig23_dims34();
  LossWeights w;
  w.w.emplace(Grade::integer(2), 0.7);
  w.w.emplace(Grade::integer(3), 3.1);
  double wmin = 0.7, wmax = 3.1;
  for (int i = 0; i < 1000; ++i) {
    GradedVector u = oracle::random_vector(rng, sig);
    double e = euclidean_norm(u);
    double wn = weighted_norm(u, w);
    CHECK(wn >= std::sqrt(wmin) * e - 1e-12);
    CHECK(wn <= std::sqrt(wmax) * e + 1e-12);
  }
}

TEST_CASE("loss weight validation names the offending grade") {
  GradingSignature sig = sig23_dims34();
  LossWeights missing;
  missing.w.emplace(Grade::integer(2), 1.0);
  CHECK_THROWS_WITH_AS(missing.validate_for(sig),
                       doctest::Contains("3"), std::invalid_argument);

  LossWeights negative;
  negative.w.emplace(Grade::integer(2), 1.0);
  negative.w.emplace(Grade::integer(3), -1.0);
  CHECK_THROWS_AS(negative.validate_for(sig), std::invalid_argument);

  GradedVector v(sig);
  CHECK_THROWS_AS(weighted_norm(v, missing), std::invalid_argument);
}

TEST_CASE("graded loss on the worked four-grade example") {
  GradingSignature sig = GradingSignature::weights({2, 4, 6, 10});
  LossWeights w;
  w.w.emplace(Grade::integer(2), 4.0);
  w.w.emplace(Grade::integer(4), 3.0);
  w.w.emplace(Grade::integer(6), 2.0);
  w.w.emplace(Grade::integer(10), 1.0);
  GradedVector pred(sig, {0.9, 0.6, 0.3, 0.15});
  GradedVector truth(sig, {1.0, 0.5, 0.2, 0.1});
  CHECK(std::abs(graded_loss(pred, truth, w) - 0.0925) <= 1e-12);

  CHECK(graded_loss(truth, truth, w) == 0.0);

  LossWeights unit = LossWeights::uniform(sig);
  double d = euclidean_norm(pred - truth);
  CHECK(graded_loss(pred, truth, unit) == doctest::Approx(d * d));
}

TEST_CASE("graded loss gradient matches the closed form and finite differences") {
  GradingSignature sig = GradingSignature::weights({2, 4, 6, 10});
  LossWeights w;
  w.w.emplace(Grade::integer(2), 4.0);
  w.w.emplace(Grade::integer(4), 3.0);
  w.w.emplace(Grade::integer(6), 2.0);
  w.w.emplace(Grade::integer(10), 1.0);
  GradedVector pred(sig, {0.9, 0.6, 0.3, 0.15});
  GradedVector truth(sig, {1.0, 0.5, 0.2, 0.1});
  GradedVector grad = graded_loss_gradient(pred, truth, w);
  CHECK(grad.block_of(Grade::integer(2))[0] == doctest::Approx(-0.8).epsilon(1e-12));

  CHECK(graded_loss_gradient(truth, truth, w) == GradedVector(sig));

  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    GradedVector p = oracle::random_vector(rng, sig);
    GradedVector t = oracle::random_vector(rng, sig);
    GradedVector g = graded_loss_gradient(p, t, w);
    for (std::size_t j = 0; j < p.flat().size(); ++j) {
      double fd = oracle::central_diff(
          [&](double x) {
            GradedVector q = p;
            q.flat()[j] = x;
            return graded_loss(q, t, w);
          },
          p.flat()[j]);
      CHECK(oracle::rel_err(g.flat()[j], fd) <= 1e-6);
    }
  }
}

TEST_CASE("graded loss is convex in the prediction") {
  Rng rng(45);
  GradingSignature sig = sig23_dims34();
  LossWeights w;
  w.w.emplace(Grade::integer(2), 2.0);
  w.w.emplace(Grade::integer(3), 0.5);
  GradedVector truth = oracle::random_vector(rng, sig);
  for (int i = 0; i < 1000; ++i) {
    GradedVector a = oracle::random_vector(rng, sig);
    GradedVector b = oracle::random_vector(rng, sig);
    double t = rng.uniform();
    GradedVector mix = t * a + (1.0 - t) * b;
    double lhs = graded_loss(mix, truth, w);
    double rhs = t * graded_loss(a, truth, w) + (1.0 - t) * graded_loss(b, truth, w);
    CHECK(lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("graded loss is Lipschitz on sampled pairs") {
  Rng rng(47);
  GradingSignature sig = sig23_dims34();
  LossWeights w;
  w.w.emplace(Grade::integer(2), 2.0);
  w.w.emplace(Grade::integer(3), 0.5);
  double wmax = 2.0;
  GradedVector truth = oracle::random_vector(rng, sig);
  for (int i = 0; i < 1000; ++i) {
    GradedVector a = oracle::random_vector(rng, sig);
    GradedVector b = oracle::random_vector(rng, sig);
    double k = wmax * euclidean_norm(a + b - 2.0 * truth);
    double lhs = std::abs(graded_loss(a, truth, w) - graded_loss(b, truth, w));
    CHECK(lhs <= k * euclidean_norm(a - b) * (1.0 + 1e-12) + 1e-12);
  }
}
