#include "gradednet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "gradednet/rng.hpp"

namespace gradednet {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double val_mse_graded(const GradedNetwork& net, const Dataset& val) {
  double sq = 0.0;
  std::int64_t coords = 0;
  for (const auto& s : val) {
    GradedVector pred = net.forward(s.x);
    const auto& p = pred.flat();
    const auto& y = s.y.flat();
    for (std::size_t k = 0; k < p.size(); ++k) {
      double d = p[k] - y[k];
      sq += d * d;
    }
    coords += static_cast<std::int64_t>(p.size());
  }
  return sq / static_cast<double>(coords);
}

double val_mse_dense(const DenseBaseline& net, const std::vector<std::vector<double>>& xs,
                     const std::vector<std::vector<double>>& ys) {
  double sq = 0.0;
  std::int64_t coords = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto pred = net.forward(xs[i]);
    for (std::size_t k = 0; k < pred.size(); ++k) {
      double d = pred[k] - ys[i][k];
      sq += d * d;
    }
    coords += static_cast<std::int64_t>(pred.size());
  }
  return sq / static_cast<double>(coords);
}

std::vector<std::uint64_t> sorted_distinct(std::vector<std::uint64_t> seeds) {
  if (seeds.empty()) throw std::invalid_argument("seeds: must be non-empty");
  std::sort(seeds.begin(), seeds.end());
  if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end())
    throw std::invalid_argument("seeds: must be distinct");
  return seeds;
}

/// Per-seed results for one arm, filled into a fixed slot per seed so the
/// aggregation order never depends on thread scheduling.
struct SeedOutcome {
  double mse = 0.0;
  int epochs = 0;
  double seconds = 0.0;
};

/// Run fn(i) for i in [0, n) on up to max_workers threads. Each index's work
/// is self-contained, so any schedule produces identical slot contents. The
/// first exception (by index) is rethrown.
void for_each_index(std::size_t n, int max_workers, const std::function<void(std::size_t)>& fn) {
  int workers = std::max(1, std::min<int>(max_workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void fill_record(MetricsRecord& rec, const std::vector<std::uint64_t>& order,
                 const std::vector<SeedOutcome>& outcomes) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    rec.seeds.push_back(order[i]);
    rec.val_mse.push_back(outcomes[i].mse);
    rec.epochs_to_improve.push_back(outcomes[i].epochs);
    rec.wall_seconds += outcomes[i].seconds;
  }
  rec.finalize();
}

}  // namespace

void Genus2Config::validate() const {
  if (n_samples < 2) throw std::invalid_argument("n_samples: must be >= 2");
  if (!(split > 0.0 && split < 1.0)) throw std::invalid_argument("split: must be in (0, 1)");
  if (!(x10_floor > 0.0)) throw std::invalid_argument("x10_floor: must be > 0");
  if (epochs < 1) throw std::invalid_argument("epochs: must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("eta: must be > 0");
}

void SusyConfig::validate() const {
  if (n_samples < 2) throw std::invalid_argument("n_samples: must be >= 2");
  if (grid_points < 2) throw std::invalid_argument("grid_points: must be >= 2");
  if (!(grid_hi > grid_lo)) throw std::invalid_argument("grid_hi: must exceed grid_lo");
  if (!(w_even > 0.0)) throw std::invalid_argument("w_even: must be > 0");
  if (!(w_odd > 0.0)) throw std::invalid_argument("w_odd: must be > 0");
  if (!(split > 0.0 && split < 1.0)) throw std::invalid_argument("split: must be in (0, 1)");
  if (epochs < 1) throw std::invalid_argument("epochs: must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("eta: must be > 0");
  if (!(decay_floor > 0.0)) throw std::invalid_argument("decay_floor: must be > 0");
}

std::vector<double> SusyConfig::grid() const {
  std::vector<double> xs(static_cast<std::size_t>(grid_points));
  // Affine combination keeps symmetric intervals bit-symmetric: x[k] == -x[n-1-k]
  // when grid_hi == -grid_lo, so odd truth profiles are odd on the grid exactly.
  int n1 = grid_points - 1;
  for (int k = 0; k < grid_points; ++k)
    xs[static_cast<std::size_t>(k)] = (grid_lo * (n1 - k) + grid_hi * k) / n1;
  return xs;
}

void MetricsRecord::finalize() {
  double sum = 0.0;
  for (double m : val_mse) sum += m;
  mean_mse = val_mse.empty() ? 0.0 : sum / static_cast<double>(val_mse.size());
  double var = 0.0;
  for (double m : val_mse) var += (m - mean_mse) * (m - mean_mse);
  std_mse = val_mse.empty() ? 0.0 : std::sqrt(var / static_cast<double>(val_mse.size()));
}

double MetricsRecord::median_mse() const {
  if (val_mse.empty()) throw std::logic_error("median of empty metrics");
  std::vector<double> v = val_mse;
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

GradingSignature genus2_input_sig() { return GradingSignature::weights({2, 4, 6, 10}); }
GradingSignature genus2_output_sig() { return GradingSignature::weights({1}); }

double genus2_target(const GradedVector& x) {
  if (x.sig() != genus2_input_sig())
    throw std::invalid_argument("genus2 target: wrong signature");
  double x2 = x.block(0)[0];
  double x10 = x.block(3)[0];
  return x2 / std::pow(x10, 0.2);
}

Dataset gen_genus2(const Genus2Config& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, "genus2-data"));
  GradingSignature in = genus2_input_sig();
  GradingSignature out = genus2_output_sig();

  Dataset data;
  data.reserve(static_cast<std::size_t>(cfg.n_samples));
  for (int i = 0; i < cfg.n_samples; ++i) {
    GradedVector x(in);
    x.block(0)[0] = rng.normal(0.0, 1.0 / 2.0);
    x.block(1)[0] = rng.normal(0.0, 1.0 / 4.0);
    x.block(2)[0] = rng.normal(0.0, 1.0 / 6.0);
    double x10;
    do {
      x10 = rng.normal(0.0, 1.0 / 10.0);
    } while (x10 < cfg.x10_floor);
    x.block(3)[0] = x10;

    GradedVector y(out);
    y.block(0)[0] = genus2_target(x);
    data.push_back({std::move(x), std::move(y)});
  }
  return data;
}

Dataset gen_susy(const SusyConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, "susy-data"));
  auto xs = cfg.grid();
  int g = cfg.grid_points;
  GradingSignature sig = GradingSignature::parity_pair(g, g);

  GradedVector truth(sig);
  {
    auto even = truth.block(0);
    auto odd = truth.block(1);
    for (int k = 0; k < g; ++k) {
      double x = xs[static_cast<std::size_t>(k)];
      even[static_cast<std::size_t>(k)] = std::exp(-x * x / 2.0);
      odd[static_cast<std::size_t>(k)] = x * std::exp(-x * x / 2.0);
    }
  }

  auto floored = [&](double mean) {
    double v;
    do {
      v = rng.normal(mean, 0.1);
    } while (v < cfg.decay_floor);
    return v;
  };

  Dataset data;
  data.reserve(static_cast<std::size_t>(cfg.n_samples));
  for (int i = 0; i < cfg.n_samples; ++i) {
    double a = floored(1.0);
    double amp = rng.normal(0.8, 0.1);
    double ap = floored(0.8);

    GradedVector x(sig);
    auto even = x.block(0);
    auto odd = x.block(1);
    for (int k = 0; k < g; ++k) {
      double t = xs[static_cast<std::size_t>(k)];
      even[static_cast<std::size_t>(k)] = std::exp(-a * t * t);
      odd[static_cast<std::size_t>(k)] = amp * t * std::exp(-ap * t * t);
    }
    data.push_back({std::move(x), truth});
  }
  return data;
}

GradedNetwork genus2_graded_arch() {
  GradingSignature in = genus2_input_sig();
  GradingSignature hidden = GradingSignature::weights({2, 4});
  GradingSignature out = genus2_output_sig();

  std::map<Grade, Block> w1;
  w1.emplace(Grade::integer(2), Block::zeros(1, 1));
  w1.emplace(Grade::integer(4), Block::zeros(1, 1));
  GradedLayer l1(GradedLinearMap::graded(in, hidden, Grade::integer(0), std::move(w1)),
                 GradedVector(hidden), ActivationKind::GradedRelu);

  std::map<Grade, Block> w2;
  w2.emplace(Grade::integer(2), Block::zeros(1, 1));
  w2.emplace(Grade::integer(4), Block::zeros(1, 1));
  GradedLayer l2(GradedLinearMap::collapse(hidden, out, std::move(w2)), GradedVector(out),
                 ActivationKind::StandardRelu);

  return GradedNetwork({std::move(l1), std::move(l2)});
}

DenseBaseline genus2_baseline_arch() {
  DenseLayer l1{Block::zeros(2, 4), std::vector<double>(2, 0.0), ActivationKind::StandardRelu};
  DenseLayer l2{Block::zeros(1, 2), std::vector<double>(1, 0.0), ActivationKind::StandardRelu};
  return DenseBaseline({std::move(l1), std::move(l2)});
}

GradedNetwork susy_graded_arch(int grid_points) {
  GradingSignature sig = GradingSignature::parity_pair(grid_points, grid_points);
  auto layer = [&]() {
    std::map<Grade, Block> w;
    w.emplace(Grade::even(), Block::zeros(grid_points, grid_points));
    w.emplace(Grade::odd(), Block::zeros(grid_points, grid_points));
    return GradedLayer(GradedLinearMap::graded(sig, sig, Grade::even(), std::move(w)),
                       GradedVector(sig), ActivationKind::StandardRelu);
  };
  return GradedNetwork({layer(), layer()});
}

DenseBaseline susy_baseline_arch(int grid_points) {
  int d = 2 * grid_points;
  auto layer = [&]() {
    return DenseLayer{Block::zeros(d, d), std::vector<double>(static_cast<std::size_t>(d), 0.0),
                      ActivationKind::StandardRelu};
  };
  return DenseBaseline({layer(), layer()});
}

int epochs_to_one_percent(const std::vector<double>& history) {
  for (std::size_t i = 1; i < history.size(); ++i)
    if (history[i - 1] - history[i] < 0.01 * history[i - 1])
      return static_cast<int>(i) + 1;  // epochs are 1-based
  return static_cast<int>(history.size());
}

std::pair<MetricsRecord, MetricsRecord> run_genus2(const Genus2Config& cfg,
                                                   const std::vector<std::uint64_t>& seeds,
                                                   int max_workers) {
  cfg.validate();
  auto order = sorted_distinct(seeds);

  MetricsRecord graded;
  graded.experiment = "genus2";
  graded.model = "graded";
  graded.params = genus2_graded_arch().parameter_count();
  MetricsRecord baseline = graded;
  baseline.model = "baseline";
  baseline.params = genus2_baseline_arch().parameter_count();

  LossWeights lw = LossWeights::uniform(genus2_output_sig(), 1.0);

  std::vector<SeedOutcome> g_out(order.size()), b_out(order.size());
  for_each_index(order.size(), max_workers, [&](std::size_t i) {
    std::uint64_t s = order[i];
    Genus2Config c = cfg;
    c.seed = s;
    Dataset data = gen_genus2(c);
    auto n_train = static_cast<std::size_t>(static_cast<double>(c.n_samples) * c.split);
    Dataset train_set(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n_train));
    Dataset val_set(data.begin() + static_cast<std::ptrdiff_t>(n_train), data.end());

    double t0 = now_seconds();
    TrainResult tg = train(genus2_graded_arch(), train_set, lw, c.eta, c.epochs,
                           derive_seed(s, "graded-init"));
    g_out[i].seconds = now_seconds() - t0;
    g_out[i].mse = val_mse_graded(tg.net, val_set);
    g_out[i].epochs = epochs_to_one_percent(tg.history);

    std::vector<std::vector<double>> xs_tr, ys_tr, xs_val, ys_val;
    for (const auto& smp : train_set) {
      xs_tr.push_back(smp.x.flat());
      ys_tr.push_back(smp.y.flat());
    }
    for (const auto& smp : val_set) {
      xs_val.push_back(smp.x.flat());
      ys_val.push_back(smp.y.flat());
    }
    t0 = now_seconds();
    DenseTrainResult tb = train_dense(genus2_baseline_arch(), xs_tr, ys_tr, {1.0}, c.eta,
                                      c.epochs, derive_seed(s, "baseline-init"));
    b_out[i].seconds = now_seconds() - t0;
    b_out[i].mse = val_mse_dense(tb.net, xs_val, ys_val);
    b_out[i].epochs = epochs_to_one_percent(tb.history);
  });

  fill_record(graded, order, g_out);
  fill_record(baseline, order, b_out);
  return {std::move(graded), std::move(baseline)};
}

std::pair<MetricsRecord, MetricsRecord> run_susy(const SusyConfig& cfg,
                                                 const std::vector<std::uint64_t>& seeds,
                                                 int max_workers) {
  cfg.validate();
  auto order = sorted_distinct(seeds);
  int g = cfg.grid_points;
  double h = cfg.grid_step();

  MetricsRecord graded;
  graded.experiment = "susy";
  graded.model = "graded";
  graded.params = susy_graded_arch(g).parameter_count();
  MetricsRecord baseline = graded;
  baseline.model = "baseline";
  baseline.params = susy_baseline_arch(g).parameter_count();

  // Riemann-sum weights: w * h per grade, flattened per coordinate for the
  // dense arm so both optimize the same objective.
  LossWeights lw;
  lw.w.emplace(Grade::even(), cfg.w_even * h);
  lw.w.emplace(Grade::odd(), cfg.w_odd * h);
  std::vector<double> coord_w(static_cast<std::size_t>(2 * g), cfg.w_odd * h);
  for (int k = 0; k < g; ++k) coord_w[static_cast<std::size_t>(k)] = cfg.w_even * h;

  std::vector<SeedOutcome> g_out(order.size()), b_out(order.size());
  for_each_index(order.size(), max_workers, [&](std::size_t i) {
    std::uint64_t s = order[i];
    SusyConfig c = cfg;
    c.seed = s;
    Dataset data = gen_susy(c);
    auto n_train = static_cast<std::size_t>(static_cast<double>(c.n_samples) * c.split);
    Dataset train_set(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n_train));
    Dataset val_set(data.begin() + static_cast<std::ptrdiff_t>(n_train), data.end());

    double t0 = now_seconds();
    TrainResult tg = train(susy_graded_arch(g), train_set, lw, c.eta, c.epochs,
                           derive_seed(s, "graded-init"));
    g_out[i].seconds = now_seconds() - t0;
    g_out[i].mse = val_mse_graded(tg.net, val_set);
    g_out[i].epochs = epochs_to_one_percent(tg.history);

    std::vector<std::vector<double>> xs_tr, ys_tr, xs_val, ys_val;
    for (const auto& smp : train_set) {
      xs_tr.push_back(smp.x.flat());
      ys_tr.push_back(smp.y.flat());
    }
    for (const auto& smp : val_set) {
      xs_val.push_back(smp.x.flat());
      ys_val.push_back(smp.y.flat());
    }
    t0 = now_seconds();
    DenseTrainResult tb = train_dense(susy_baseline_arch(g), xs_tr, ys_tr, coord_w, c.eta,
                                      c.epochs, derive_seed(s, "baseline-init"));
    b_out[i].seconds = now_seconds() - t0;
    b_out[i].mse = val_mse_dense(tb.net, xs_val, ys_val);
    b_out[i].epochs = epochs_to_one_percent(tb.history);
  });

  fill_record(graded, order, g_out);
  fill_record(baseline, order, b_out);
  return {std::move(graded), std::move(baseline)};
}

}  // namespace gradednet
