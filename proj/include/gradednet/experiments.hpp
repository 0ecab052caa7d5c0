#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gradednet/network.hpp"

namespace gradednet {

/// Configuration of the genus-2 invariant regression case study.
struct Genus2Config {
  int n_samples = 1000;
  std::uint64_t seed = 0;     ///< dataset stream seed (gen-data); runs derive per-seed streams
  double x10_floor = 1e-3;    ///< resample x10 until it clears this (keeps 1/x10^{1/5} sane)
  double split = 0.8;         ///< leading fraction of samples used for training
  int epochs = 100;
  double eta = 0.01;

  void validate() const;  ///< throws std::invalid_argument naming the offending field
};

/// Configuration of the supersymmetric-oscillator case study over the
/// even+odd signature of grid-sampled wavefunctions.
struct SusyConfig {
  int n_samples = 500;
  int grid_points = 100;
  double grid_lo = -5.0;
  double grid_hi = 5.0;
  std::uint64_t seed = 0;
  double w_even = 2.0;  ///< bosonic loss weight
  double w_odd = 1.0;   ///< fermionic loss weight
  double split = 0.8;
  int epochs = 100;
  double eta = 0.01;
  double decay_floor = 0.05;  ///< resample Gaussian decay rates below this

  void validate() const;
  double grid_step() const { return (grid_hi - grid_lo) / (grid_points - 1); }
  std::vector<double> grid() const;
};

/// Aggregated result of one experiment arm over a list of seeds.
struct MetricsRecord {
  std::string experiment;
  std::string model;  ///< "graded" or "baseline"
  std::vector<std::uint64_t> seeds;
  std::vector<double> val_mse;          ///< per seed, aligned with seeds
  std::vector<int> epochs_to_improve;   ///< per seed: first epoch whose relative gain < 1%
  double mean_mse = 0.0;
  double std_mse = 0.0;  ///< population std; 0 for a single seed
  std::int64_t params = 0;
  double wall_seconds = 0.0;  ///< measured, reported to console only

  void finalize();  ///< fills mean/std from val_mse
  double median_mse() const;
};

/// The degree-0 regression target x2 / x10^{1/5}, invariant under the
/// positive scalar action.
double genus2_target(const GradedVector& x);

/// Input signature (2,4,6,10), one dim per grade; target as a vector over
/// the single grade 1.
GradingSignature genus2_input_sig();
GradingSignature genus2_output_sig();

/// Coordinates drawn N(0, 1/q) per grade q; x10 rejection-resampled to at
/// least x10_floor; y computed exactly. Deterministic in cfg.seed.
Dataset gen_genus2(const Genus2Config& cfg);

/// Even block: exp(-a x^2) with a ~ N(1, 0.1) floored at decay_floor. Odd
/// block: amp * x * exp(-a' x^2) with amp, a' ~ N(0.8, 0.1), a' floored.
/// Truth is the oscillator ground-state pair exp(-x^2/2), x exp(-x^2/2) with
/// unit normalization, identical for every sample. Deterministic in cfg.seed.
Dataset gen_susy(const SusyConfig& cfg);

/// The two-layer graded architecture of each case study with zero parameters
/// (training initializes them from its seed).
GradedNetwork genus2_graded_arch();
GradedNetwork susy_graded_arch(int grid_points);

/// Size-matched dense comparison arms.
DenseBaseline genus2_baseline_arch();
DenseBaseline susy_baseline_arch(int grid_points);

/// Train both arms per seed on a shared dataset and split; returns (graded,
/// baseline) metrics. Seeds are deduplicated and processed in ascending
/// order; each seed derives independent dataset/init streams. Seeds are
/// independent, so up to max_workers of them run concurrently; results are
/// aggregated in seed order and bit-identical for any worker count.
std::pair<MetricsRecord, MetricsRecord> run_genus2(const Genus2Config& cfg,
                                                   const std::vector<std::uint64_t>& seeds,
                                                   int max_workers = 1);
std::pair<MetricsRecord, MetricsRecord> run_susy(const SusyConfig& cfg,
                                                 const std::vector<std::uint64_t>& seeds,
                                                 int max_workers = 1);

/// First epoch e >= 2 whose relative improvement (h[e-1] - h[e]) / h[e-1]
/// drops below 1%; the final epoch count if it never does.
int epochs_to_one_percent(const std::vector<double>& history);

}  // namespace gradednet
