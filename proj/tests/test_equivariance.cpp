#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "gradednet/equivariance.hpp"
#include "gradednet/experiments.hpp"
#include "gradednet/rng.hpp"
#include "oracles.hpp"

using namespace gradednet;

namespace {

Block block1(double v) {
  Block b = Block::zeros(1, 1);
  b.at(0, 0) = v;
  return b;
}

GradingSignature sig24() {
  return GradingSignature({{Grade::integer(2), 1}, {Grade::integer(4), 1}});
}

VectorFn map_fn(GradedLinearMap m) {
  return [m = std::move(m)](const GradedVector& v) { return m.apply(v); };
}

GradedLinearMap random_diagonal_map(Rng& rng, const GradingSignature& sig) {
  std::map<Grade, Block> blocks;
  for (const auto& [g, d] : sig.entries()) {
    Block b = Block::zeros(d, d);
    for (double& x : b.a) x = rng.normal();
    blocks.emplace(g, b);
  }
  return GradedLinearMap::graded(sig, sig, Grade::integer(0), blocks);
}

}  // namespace

TEST_CASE("diagonal linear maps commute with the scalar action") {
  Rng rng(71);
  GradedLinearMap f = random_diagonal_map(rng, sig24());
  EquivarianceReport rep = check_map_equivariance(map_fn(f), sig24());
  CHECK(rep.equivariant);
  CHECK(rep.max_violation <= 1e-9);
}

TEST_CASE("a single cross-grade coupling entry is detected with a witness") {
  GradingSignature sig = sig24();
  Block dense = Block::zeros(2, 2);
  dense.at(0, 0) = 1.0;
  dense.at(1, 1) = 1.0;
  dense.at(0, 1) = 0.1;  // grade-4 input leaks into the grade-2 output
  auto leaky = [dense, sig](const GradedVector& v) {
    std::vector<double> y = oracle::dense_matvec(dense.a, 2, 2, v.flat());
    return GradedVector(sig, y);
  };
  EquivarianceReport rep = check_map_equivariance(leaky, sig);
  CHECK_FALSE(rep.equivariant);
  CHECK(rep.max_violation >= 1e-3);

  // The witness reproduces the reported violation.
  GradedVector lhs = leaky(scalar_action(rep.witness.lambda, rep.witness.v));
  GradedVector rhs = scalar_action(rep.witness.lambda, leaky(rep.witness.v));
  double gap = euclidean_norm(lhs - rhs) / (1.0 + euclidean_norm(rhs));
  CHECK(gap == doctest::Approx(rep.max_violation).epsilon(1e-12));
}

TEST_CASE("graded relu on grade 2 violates equivariance at lambda 2") {
  GradingSignature sig({{Grade::integer(2), 1}});
  GradedLayer layer(GradedLinearMap::graded(sig, sig, Grade::integer(0),
                                            {{Grade::integer(2), block1(1.0)}}),
                    GradedVector(sig), ActivationKind::GradedRelu);
  auto fn = [&layer](const GradedVector& v) { return layer.apply(v); };

  // f(lambda^2 * 1) = |4|^(1/2) = 2 but lambda^2 * f(1) = 4.
  GradedVector one(sig, {1.0});
  CHECK(fn(scalar_action(2.0, one)).flat()[0] == doctest::Approx(2.0));
  CHECK(scalar_action(2.0, fn(one)).flat()[0] == doctest::Approx(4.0));

  ProbeOptions opts;
  opts.lambdas = {2.0};
  EquivarianceReport rep = check_map_equivariance(fn, sig, opts);
  CHECK_FALSE(rep.equivariant);
  CHECK(rep.max_violation >= 1e-2);
}

TEST_CASE("theorem suite: 100 random diagonal maps pass, 100 leaky maps fail") {
  Rng rng(73);
  GradingSignature sig({{Grade::integer(2), 2}, {Grade::integer(4), 3}});
  for (int i = 0; i < 100; ++i) {
    GradedLinearMap f = random_diagonal_map(rng, sig);
    EquivarianceReport rep = check_map_equivariance(map_fn(f), sig);
    CHECK(rep.max_violation <= 1e-9);
  }
  for (int i = 0; i < 100; ++i) {
    GradedLinearMap f = random_diagonal_map(rng, sig);
    Block dense = f.to_dense();
    // Plant an off-diagonal coupling of norm >= 0.01.
    dense.at(0, 2 + (i % 3)) = 0.01 + rng.uniform();
    auto leaky = [dense, sig](const GradedVector& v) {
      std::vector<double> y = oracle::dense_matvec(dense.a, 5, 5, v.flat());
      return GradedVector(sig, y);
    };
    EquivarianceReport rep = check_map_equivariance(leaky, sig);
    CHECK_FALSE(rep.equivariant);
    CHECK(rep.max_violation >= 1e-3);
  }
}

TEST_CASE("probe determinism and lambda validation") {
  Rng rng(75);
  GradedLinearMap f = random_diagonal_map(rng, sig24());
  EquivarianceReport a = check_map_equivariance(map_fn(f), sig24());
  EquivarianceReport b = check_map_equivariance(map_fn(f), sig24());
  CHECK(a.max_violation == b.max_violation);
  CHECK(a.witness.lambda == b.witness.lambda);

  ProbeOptions zero;
  zero.lambdas = {0.0};
  CHECK_THROWS_AS(check_map_equivariance(map_fn(f), sig24(), zero),
                  std::invalid_argument);
}

TEST_CASE("negative lambda on rational grades surfaces as a domain error") {
  GradingSignature rat({{Grade::rational(1, 2), 1}});
  auto id = [](const GradedVector& v) { return v; };
  ProbeOptions opts;
  opts.lambdas = {-1.0};
  CHECK_THROWS_AS(check_map_equivariance(id, rat, opts), std::domain_error);
  // Default lambdas skip negatives for non-integer gradings.
  CHECK_NOTHROW(check_map_equivariance(id, rat));
}

TEST_CASE("kernel diagonality check") {
  GradingSignature sig = sig24();
  std::map<std::pair<Grade, Grade>, Block> blocks;
  for (const auto& [m, dm] : sig.entries())
    for (const auto& [n, dn] : sig.entries())
      blocks.emplace(std::make_pair(m, n), m == n ? Block::identity(dm)
                                                  : Block::zeros(dm, dn));
  GradeKernel diag(sig, blocks);
  KernelDiagonalityReport rep = check_kernel_diagonality(diag);
  CHECK(rep.ok);
  CHECK(rep.offenders.empty());

  // Diagonality implies numerical equivariance of the induced map.
  EquivarianceReport num = check_map_equivariance(
      [&diag](const GradedVector& v) { return diag.apply(v); }, sig);
  CHECK(num.equivariant);

  blocks[{Grade::integer(2), Grade::integer(4)}] = block1(0.5);
  GradeKernel off(sig, blocks);
  KernelDiagonalityReport bad = check_kernel_diagonality(off);
  CHECK_FALSE(bad.ok);
  REQUIRE(bad.offenders.size() == 1);
  CHECK(bad.offenders[0].first == Grade::integer(2));
  CHECK(bad.offenders[0].second == Grade::integer(4));

  EquivarianceReport num_bad = check_map_equivariance(
      [&off](const GradedVector& v) { return off.apply(v); }, sig);
  CHECK_FALSE(num_bad.equivariant);

  // Every (m, n) block must be present.
  std::map<std::pair<Grade, Grade>, Block> partial;
  partial.emplace(std::make_pair(Grade::integer(2), Grade::integer(2)),
                  Block::identity(1));
  CHECK_THROWS_AS(GradeKernel(sig, partial), std::invalid_argument);
}

TEST_CASE("bias equivariance holds only for the zero bias") {
  GradingSignature sig = sig24();
  BiasEquivarianceReport ok = check_bias_equivariance(GradedVector(sig));
  CHECK(ok.ok);
  CHECK(ok.numeric.equivariant);

  GradedVector b(sig, {0.1, 0.0});
  BiasEquivarianceReport bad = check_bias_equivariance(b);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.numeric.equivariant);
  CHECK(bad.numeric.max_violation >= 1e-3);

  // At the zero probe and lambda=2 the unnormalized grade-2 gap is
  // |0.1 - 2^2*0.1| = 0.3, the translation-by-b mismatch.
  auto add_b = [&b](const GradedVector& v) { return v + b; };
  GradedVector zero(sig);
  GradedVector lhs = add_b(scalar_action(2.0, zero));
  GradedVector rhs = scalar_action(2.0, add_b(zero));
  CHECK(std::abs(lhs.flat()[0] - rhs.flat()[0]) == doctest::Approx(0.3));
}

TEST_CASE("a nonzero bias is invisible at lambda 1") {
  GradingSignature sig = sig24();
  GradedVector b(sig, {0.3, -0.2});
  ProbeOptions opts;
  opts.lambdas = {1.0};
  EquivarianceReport rep =
      check_map_equivariance([&b](const GradedVector& v) { return v + b; }, sig, opts);
  CHECK(rep.equivariant);  // lambda=1 cannot distinguish any map
}

TEST_CASE("max pooling is equivariant only for singleton regions") {
  GradingSignature sig = sig24();

  MaxPoolSpec identity_pool;
  identity_pool.regions[Grade::integer(2)] = {Grade::integer(2)};
  identity_pool.regions[Grade::integer(4)] = {Grade::integer(4)};
  PoolingReport ok = check_pooling_equivariance(sig, identity_pool);
  CHECK(ok.ok);
  CHECK(ok.numeric.equivariant);

  MaxPoolSpec merged;
  merged.regions[Grade::integer(2)] = {Grade::integer(2), Grade::integer(4)};
  PoolingReport bad = check_pooling_equivariance(sig, merged);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.numeric.equivariant);
  CHECK(bad.numeric.max_violation >= 1e-3);

  // The classic failure: max over {2,4} at F=(1,1), lambda=2 gives
  // max{4, 16} = 16 on the action side vs 2^2 * max{1,1} = 4.
  GradedVector ones(sig, {1.0, 1.0});
  auto pool = [&](const GradedVector& v) {
    GradedVector out = v;
    out.flat()[0] = std::max(v.flat()[0], v.flat()[1]);
    return out;
  };
  CHECK(pool(scalar_action(2.0, ones)).flat()[0] == doctest::Approx(16.0));
  CHECK(scalar_action(2.0, pool(ones)).flat()[0] == doctest::Approx(4.0));
}

TEST_CASE("average pooling is equivariant only for diagonal weights") {
  GradingSignature sig = sig24();

  AvgPoolSpec diag;
  diag.alpha[{Grade::integer(2), Grade::integer(2)}] = 0.7;
  diag.alpha[{Grade::integer(4), Grade::integer(4)}] = 1.3;
  PoolingReport ok = check_pooling_equivariance(sig, diag);
  CHECK(ok.ok);
  CHECK(ok.numeric.equivariant);

  AvgPoolSpec off;
  off.alpha[{Grade::integer(2), Grade::integer(2)}] = 1.0;
  off.alpha[{Grade::integer(2), Grade::integer(4)}] = 0.5;
  off.alpha[{Grade::integer(4), Grade::integer(4)}] = 1.0;
  PoolingReport bad = check_pooling_equivariance(sig, off);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.numeric.equivariant);
  CHECK(bad.numeric.max_violation >= 1e-3);
}

TEST_CASE("swap equivariance of parity layers") {
  GradingSignature sig = GradingSignature::parity_pair(3, 3);

  auto layer_with = [&](double we, double wo, double be, double bo) {
    std::map<Grade, Block> blocks;
    Block e = Block::identity(3);
    for (double& x : e.a) x *= we;
    Block o = Block::identity(3);
    for (double& x : o.a) x *= wo;
    blocks.emplace(Grade::even(), e);
    blocks.emplace(Grade::odd(), o);
    GradedVector bias(sig);
    for (double& x : bias.block(0)) x = be;
    for (double& x : bias.block(1)) x = bo;
    return GradedLayer(GradedLinearMap::graded(sig, sig, grade_zero(GradeVariant::Parity),
                                               blocks),
                       bias, ActivationKind::StandardRelu);
  };

  SwapEquivarianceReport tied = check_swap_equivariance(layer_with(0.9, 0.9, 0.1, 0.1));
  CHECK(tied.ok);
  CHECK(tied.tied_weights);
  CHECK(tied.tied_bias);

  SwapEquivarianceReport untied = check_swap_equivariance(layer_with(0.9, 0.8, 0.0, 0.0));
  CHECK_FALSE(untied.ok);
  CHECK_FALSE(untied.tied_weights);
  CHECK(untied.tied_bias);
  CHECK(untied.max_violation >= 1e-3);

  std::map<Grade, Block> zero_blocks;
  zero_blocks.emplace(Grade::even(), Block::zeros(3, 3));
  zero_blocks.emplace(Grade::odd(), Block::zeros(3, 3));
  GradedLayer zero(GradedLinearMap::graded(sig, sig, grade_zero(GradeVariant::Parity),
                                           zero_blocks),
                   GradedVector(sig), ActivationKind::StandardRelu);
  CHECK(check_swap_equivariance(zero).ok);

  GradingSignature uneven = GradingSignature::parity_pair(3, 2);
  std::map<Grade, Block> ub;
  ub.emplace(Grade::even(), Block::zeros(3, 3));
  ub.emplace(Grade::odd(), Block::zeros(2, 2));
  GradedLayer ulayer(GradedLinearMap::graded(uneven, uneven,
                                             grade_zero(GradeVariant::Parity), ub),
                     GradedVector(uneven), ActivationKind::StandardRelu);
  CHECK_THROWS_AS(check_swap_equivariance(ulayer), std::invalid_argument);
}

TEST_CASE("parity_swap exchanges the even and odd blocks") {
  GradingSignature sig = GradingSignature::parity_pair(2, 2);
  GradedVector v(sig, {1, 2, 3, 4});
  GradedVector s = parity_swap(v);
  CHECK(s.flat() == std::vector<double>{3, 4, 1, 2});
  CHECK(parity_swap(s) == v);
}

TEST_CASE("the degree-0 regression target is invariant under positive scaling") {
  Rng rng(77);
  GradingSignature sig = genus2_input_sig();
  for (int i = 0; i < 100; ++i) {
    GradedVector x = oracle::random_vector(rng, sig);
    x.block_of(Grade::integer(10))[0] = 0.5 + rng.uniform();  // keep the root real
    double y = genus2_target(x);
    double lam = 0.25 + 2.0 * rng.uniform();
    double ys = genus2_target(scalar_action(lam, x));
    CHECK(oracle::rel_err(ys, y) <= 1e-10);
  }
}
