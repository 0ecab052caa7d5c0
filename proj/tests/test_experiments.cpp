#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gradednet/experiments.hpp"
#include "gradednet/grading.hpp"
#include "gradednet/gspace.hpp"
#include "oracles.hpp"

using namespace gradednet;

namespace {

GradedVector genus2_point(double x2, double x4, double x6, double x10) {
  GradedVector v(genus2_input_sig());
  v.block(0)[0] = x2;
  v.block(1)[0] = x4;
  v.block(2)[0] = x6;
  v.block(3)[0] = x10;
  return v;
}

}  // namespace

TEST_CASE("genus2 target matches the closed form") {
  auto v = genus2_point(1.0, -0.3, 2.0, 0.1);
  CHECK(genus2_target(v) == doctest::Approx(1.5848931924611136).epsilon(1e-12));
  // The value ignores the intermediate coordinates entirely.
  auto w = genus2_point(1.0, 7.0, -9.0, 0.1);
  CHECK(genus2_target(w) == genus2_target(v));
  CHECK(genus2_target(genus2_point(0.0, 1.0, 1.0, 0.5)) == 0.0);
}

TEST_CASE("genus2 signatures") {
  auto in = genus2_input_sig();
  CHECK(in.variant() == GradeVariant::Integer);
  CHECK(in.grade_count() == 4);
  CHECK(in.total_dim() == 4);
  CHECK(in.grade_at(0) == Grade::integer(2));
  CHECK(in.grade_at(3) == Grade::integer(10));
  auto out = genus2_output_sig();
  CHECK(out.grade_count() == 1);
  CHECK(out.grade_at(0) == Grade::integer(1));
  CHECK(out.dim_at(0) == 1);
}

TEST_CASE("gen_genus2 respects the floor and computes targets exactly") {
  Genus2Config cfg;
  cfg.n_samples = 400;
  cfg.seed = 11;
  auto data = gen_genus2(cfg);
  REQUIRE(data.size() == 400);
  for (const auto& s : data) {
    CHECK(s.x.sig() == genus2_input_sig());
    CHECK(s.y.sig() == genus2_output_sig());
    CHECK(s.x.block(3)[0] >= cfg.x10_floor);
    CHECK(std::isfinite(s.y.block(0)[0]));
    CHECK(s.y.block(0)[0] == genus2_target(s.x));
  }
}

TEST_CASE("gen_genus2 coordinate variances track 1/q") {
  Genus2Config cfg;
  cfg.n_samples = 100000;
  cfg.seed = 3;
  auto data = gen_genus2(cfg);
  // x_q ~ N(0, 1/q); the floor only perturbs x10, which we skip here.
  for (std::size_t b = 0; b < 3; ++b) {
    double q = static_cast<double>(2 * (b + 1));  // grades 2, 4, 6
    double mean = 0.0, m2 = 0.0;
    for (const auto& s : data) mean += s.x.block(b)[0];
    mean /= static_cast<double>(data.size());
    for (const auto& s : data) {
      double d = s.x.block(b)[0] - mean;
      m2 += d * d;
    }
    double var = m2 / static_cast<double>(data.size());
    CHECK(var == doctest::Approx(1.0 / q).epsilon(0.1));
  }
}

TEST_CASE("gen_genus2 is deterministic in the seed") {
  Genus2Config cfg;
  cfg.n_samples = 50;
  cfg.seed = 21;
  auto a = gen_genus2(cfg);
  auto b = gen_genus2(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
  }
  cfg.seed = 22;
  auto c = gen_genus2(cfg);
  CHECK_FALSE(a[0].x == c[0].x);
}

TEST_CASE("susy grid is bit-symmetric with exact endpoints") {
  SusyConfig cfg;
  auto xs = cfg.grid();
  REQUIRE(xs.size() == 100);
  CHECK(xs.front() == -5.0);
  CHECK(xs.back() == 5.0);
  CHECK(cfg.grid_step() == doctest::Approx(10.0 / 99.0).epsilon(1e-15));
  for (std::size_t k = 0; k < xs.size(); ++k)
    CHECK(xs[k] == -xs[xs.size() - 1 - k]);
  // Zero is never a node of the even-count grid.
  for (double x : xs) CHECK(x != 0.0);
}

TEST_CASE("gen_susy truth profile") {
  SusyConfig cfg;
  cfg.n_samples = 5;
  cfg.seed = 9;
  auto data = gen_susy(cfg);
  REQUIRE(data.size() == 5);
  auto sig = GradingSignature::parity_pair(100, 100);
  for (const auto& s : data) {
    CHECK(s.x.sig() == sig);
    CHECK(s.y.sig() == sig);
  }

  // Identical truth for every sample.
  for (std::size_t i = 1; i < data.size(); ++i) CHECK(data[i].y == data[0].y);

  auto xs = cfg.grid();
  const auto even = data[0].y.block(0);
  const auto odd = data[0].y.block(1);
  for (int k = 0; k < 100; ++k) {
    double x = xs[static_cast<std::size_t>(k)];
    CHECK(even[static_cast<std::size_t>(k)] ==
          doctest::Approx(std::exp(-x * x / 2.0)).epsilon(1e-15));
  }
  // Exact parity on the symmetric grid.
  for (int k = 0; k < 100; ++k) {
    CHECK(odd[static_cast<std::size_t>(k)] == -odd[static_cast<std::size_t>(99 - k)]);
    CHECK(even[static_cast<std::size_t>(k)] == even[static_cast<std::size_t>(99 - k)]);
  }

  // The even profile peaks at the node nearest zero, just shy of 1.
  std::size_t arg = 0;
  for (std::size_t k = 1; k < 100; ++k)
    if (even[k] > even[arg]) arg = k;
  CHECK((arg == 49 || arg == 50));
  double x_star = 5.0 / 99.0;
  CHECK(std::abs(xs[arg]) == doctest::Approx(x_star).epsilon(1e-15));
  CHECK(even[arg] == doctest::Approx(std::exp(-x_star * x_star / 2.0)).epsilon(1e-12));
  CHECK(even[arg] > 0.997);
  CHECK(even[arg] < 1.0);
}

TEST_CASE("gen_susy inputs are damped Gaussians on the grid") {
  SusyConfig cfg;
  cfg.n_samples = 40;
  cfg.seed = 4;
  auto data = gen_susy(cfg);
  for (const auto& s : data) {
    const auto even = s.x.block(0);
    // Near the origin the even input is close to its unit amplitude.
    CHECK(even[49] > 0.99);
    CHECK(even[50] > 0.99);
    // Far out it has decayed to nearly nothing for any floored rate.
    CHECK(std::abs(even[0]) < 0.3);
    for (std::size_t k = 0; k < 100; ++k) CHECK(std::isfinite(even[k]));
  }
}

TEST_CASE("gen_susy is deterministic in the seed") {
  SusyConfig cfg;
  cfg.n_samples = 8;
  cfg.seed = 14;
  auto a = gen_susy(cfg);
  auto b = gen_susy(cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
  }
  cfg.seed = 15;
  auto c = gen_susy(cfg);
  CHECK_FALSE(a[0].x == c[0].x);
}

TEST_CASE("epochs_to_one_percent") {
  // 1.0 -> 0.5 is a 50% gain; 0.5 -> 0.498 is a 0.4% gain, flagged at epoch 3.
  CHECK(epochs_to_one_percent({1.0, 0.5, 0.498}) == 3);
  CHECK(epochs_to_one_percent({1.0}) == 1);
  CHECK(epochs_to_one_percent({1.0, 0.5, 0.25, 0.125}) == 4);
  CHECK(epochs_to_one_percent({1.0, 1.0}) == 2);
  CHECK(epochs_to_one_percent({1.0, 0.995, 0.5}) == 2);
}

TEST_CASE("architecture parameter counts") {
  CHECK(genus2_graded_arch().parameter_count() == 7);
  CHECK(genus2_baseline_arch().parameter_count() == 13);
  CHECK(susy_graded_arch(100).parameter_count() == 40400);
  CHECK(susy_baseline_arch(100).parameter_count() == 80400);
  CHECK(susy_graded_arch(8).parameter_count() == 288);
  CHECK(susy_baseline_arch(8).parameter_count() == 544);
}

TEST_CASE("config validation names the offending field") {
  Genus2Config g;
  g.split = 1.5;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("split"), std::invalid_argument);
  g = Genus2Config{};
  g.n_samples = 1;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("n_samples"), std::invalid_argument);
  g = Genus2Config{};
  g.eta = 0.0;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("eta"), std::invalid_argument);
  g = Genus2Config{};
  g.epochs = 0;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("epochs"), std::invalid_argument);
  g = Genus2Config{};
  g.x10_floor = 0.0;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("x10_floor"), std::invalid_argument);

  SusyConfig s;
  s.grid_points = 1;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("grid_points"), std::invalid_argument);
  s = SusyConfig{};
  s.w_even = 0.0;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("w_even"), std::invalid_argument);
  s = SusyConfig{};
  s.w_odd = -1.0;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("w_odd"), std::invalid_argument);
  s = SusyConfig{};
  s.decay_floor = 0.0;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("decay_floor"), std::invalid_argument);
  s = SusyConfig{};
  s.grid_hi = s.grid_lo;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("grid_hi"), std::invalid_argument);
}

TEST_CASE("MetricsRecord aggregation") {
  MetricsRecord r;
  r.val_mse = {1.0, 3.0};
  r.finalize();
  CHECK(r.mean_mse == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.std_mse == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.median_mse() == doctest::Approx(2.0).epsilon(1e-15));

  r.val_mse = {5.0};
  r.finalize();
  CHECK(r.mean_mse == 5.0);
  CHECK(r.std_mse == 0.0);
  CHECK(r.median_mse() == 5.0);

  r.val_mse = {3.0, 1.0, 10.0};
  r.finalize();
  CHECK(r.median_mse() == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("run_genus2 on a tiny configuration") {
  Genus2Config cfg;
  cfg.n_samples = 30;
  cfg.epochs = 3;
  cfg.seed = 5;
  std::vector<std::uint64_t> seeds{1, 2};
  auto [graded, baseline] = run_genus2(cfg, seeds);

  CHECK(graded.experiment == "genus2");
  CHECK(graded.model == "graded");
  CHECK(baseline.model == "baseline");
  CHECK(graded.params == 7);
  CHECK(baseline.params == 13);
  REQUIRE(graded.seeds == seeds);
  REQUIRE(graded.val_mse.size() == 2);
  REQUIRE(graded.epochs_to_improve.size() == 2);
  for (double m : graded.val_mse) {
    CHECK(std::isfinite(m));
    CHECK(m >= 0.0);
  }
  for (int e : graded.epochs_to_improve) {
    CHECK(e >= 1);
    CHECK(e <= cfg.epochs);
  }
  CHECK(graded.mean_mse ==
        doctest::Approx((graded.val_mse[0] + graded.val_mse[1]) / 2.0).epsilon(1e-15));

  SUBCASE("rerun is bit-identical") {
    auto [g2, b2] = run_genus2(cfg, seeds);
    CHECK(g2.val_mse == graded.val_mse);
    CHECK(b2.val_mse == baseline.val_mse);
    CHECK(g2.epochs_to_improve == graded.epochs_to_improve);
  }
  SUBCASE("seed order does not matter") {
    auto [g2, b2] = run_genus2(cfg, {2, 1});
    CHECK(g2.seeds == seeds);
    CHECK(g2.val_mse == graded.val_mse);
    CHECK(b2.val_mse == baseline.val_mse);
  }
  SUBCASE("worker count does not change results") {
    auto [g2, b2] = run_genus2(cfg, seeds, 4);
    CHECK(g2.val_mse == graded.val_mse);
    CHECK(b2.val_mse == baseline.val_mse);
  }
}

TEST_CASE("run_genus2 rejects bad seed lists") {
  Genus2Config cfg;
  cfg.n_samples = 10;
  cfg.epochs = 1;
  CHECK_THROWS_WITH_AS(run_genus2(cfg, {}), doctest::Contains("non-empty"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(run_genus2(cfg, {3, 3}), doctest::Contains("distinct"),
                       std::invalid_argument);
}

TEST_CASE("run_susy on a tiny configuration") {
  SusyConfig cfg;
  cfg.n_samples = 6;
  cfg.grid_points = 8;
  cfg.epochs = 2;
  cfg.seed = 1;
  std::vector<std::uint64_t> seeds{1};
  auto [graded, baseline] = run_susy(cfg, seeds);

  CHECK(graded.experiment == "susy");
  CHECK(graded.params == 288);
  CHECK(baseline.params == 544);
  REQUIRE(graded.val_mse.size() == 1);
  CHECK(graded.std_mse == 0.0);
  CHECK(baseline.std_mse == 0.0);
  CHECK(std::isfinite(graded.val_mse[0]));
  CHECK(std::isfinite(baseline.val_mse[0]));

  auto [g2, b2] = run_susy(cfg, seeds, 2);
  CHECK(g2.val_mse == graded.val_mse);
  CHECK(b2.val_mse == baseline.val_mse);
}
