#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "plspower/parallel.hpp"
#include "plspower/perm_test.hpp"
#include "plspower/simulate.hpp"

namespace plspower {

struct PowerConfig {
  int components = 1;               // A, fixed per run
  StatKind stat = StatKind::mcc;
  double alpha = 0.05;
  int simulations = 100;            // I
  int permutations = 200;           // J
  double epsilon = 0.01;
  int n1 = 0, n2 = 0;               // per-class simulated sizes
  std::uint64_t seed = 0;
  double variance_threshold = 0.8;  // residual-PCA augmentation rule
};

struct IterationRecord {
  bool failed = false;
  bool rejected = false;
  double raw_p = 1.0;
  double adjusted_p = 1.0;
  SimulationDiagnostics diagnostics{};
};

struct PowerEstimate {
  StatKind stat = StatKind::mcc;
  double power = 0.0;
  int rejections = 0;
  int iterations = 0;  // successful Monte Carlo iterations
  double mc_stderr = 0.0;
  std::vector<IterationRecord> per_iteration;  // length I, failed ones flagged
};

namespace detail {

inline void validate_power_config(const PowerConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    fail(errc::invalid_input, "power: alpha must lie in (0, 1)");
  if (cfg.simulations < 1) fail(errc::invalid_input, "power: need I >= 1");
  if (cfg.permutations < 2) fail(errc::invalid_input, "power: need J >= 2");
  if (cfg.n1 < 2 || cfg.n2 < 2)
    fail(errc::invalid_input, "power: need at least 2 simulated rows per class");
}

}  // namespace detail

/// Monte Carlo power for several statistics over shared simulations and
/// permutations: fit the pilot once, then per iteration simulate a dataset,
/// re-center it, refit under every label permutation, and reject when the
/// Bonferroni-adjusted p-value A*p is at or below alpha. Iterations draw
/// from substreams keyed by (seed, i), so any worker count gives identical
/// results. Up to 2% of iterations may fail (and are excluded) before the
/// whole run aborts.
inline std::vector<PowerEstimate> estimate_power_multi(const Dataset& pilot,
                                                       const PowerConfig& cfg,
                                                       const std::vector<StatKind>& kinds) {
  detail::validate_power_config(cfg);
  if (kinds.empty()) fail(errc::invalid_input, "power: no statistics requested");
  validate_labels(pilot.labels, pilot.x.rows());

  PlscModel model = fit_plsc(pilot.x, pilot.labels, cfg.components, cfg.epsilon);
  AugmentedScoreModel aug = augment_with_residual_pca(model, cfg.variance_threshold);

  const std::size_t n_iter = static_cast<std::size_t>(cfg.simulations);
  std::vector<std::vector<IterationRecord>> records(
      kinds.size(), std::vector<IterationRecord>(n_iter));

  parallel_for(n_iter, [&](std::size_t i) {
    auto rng = substream(cfg.seed, {stream_tag::simulation, static_cast<std::uint64_t>(i)});
    try {
      SimulatedDataset sim = simulate_dataset(model, aug, cfg.n1, cfg.n2, rng);
      auto [xc, means] = center(sim.x);
      std::uint64_t perm_seed =
          derive_seed(cfg.seed, {stream_tag::permutation, static_cast<std::uint64_t>(i)});
      std::vector<PermutationResult> tests = permutation_pvalues(
          xc, sim.labels, kinds, cfg.components, cfg.epsilon, cfg.permutations, perm_seed);
      for (std::size_t k = 0; k < kinds.size(); ++k) {
        IterationRecord& rec = records[k][i];
        rec.raw_p = tests[k].p_value;
        rec.adjusted_p = adjust_bonferroni(rec.raw_p, cfg.components);
        rec.rejected = rec.adjusted_p <= cfg.alpha;
        rec.diagnostics = sim.diagnostics;
      }
    } catch (const Error&) {
      for (std::size_t k = 0; k < kinds.size(); ++k) records[k][i].failed = true;
    }
  });

  std::vector<PowerEstimate> out(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    PowerEstimate& est = out[k];
    est.stat = kinds[k];
    int failures = 0;
    for (const IterationRecord& rec : records[k]) {
      if (rec.failed)
        ++failures;
      else if (rec.rejected)
        ++est.rejections;
    }
    if (failures > 0.02 * cfg.simulations)
      fail(errc::power_run_failed,
           "power: " + std::to_string(failures) + " of " + std::to_string(cfg.simulations) +
               " iterations failed");
    est.iterations = cfg.simulations - failures;
    est.power = static_cast<double>(est.rejections) / static_cast<double>(est.iterations);
    est.mc_stderr = std::sqrt(est.power * (1.0 - est.power) / est.iterations);
    est.per_iteration = std::move(records[k]);
  }
  return out;
}

inline PowerEstimate estimate_power(const Dataset& pilot, const PowerConfig& cfg) {
  return estimate_power_multi(pilot, cfg, {cfg.stat}).front();
}

struct SampleSizeResult {
  bool reached = false;
  int n_hat = -1;  // first per-class size whose power meets the target
  std::vector<std::pair<int, PowerEstimate>> trace;
};

/// Walks n = n_min, n_min+step, ... <= n_max and returns the first per-class
/// size with power >= 1 - beta. All candidates reuse the same seed (common
/// random numbers), which keeps the search monotone-friendly and makes the
/// trace reproducible regardless of where it stops.
inline SampleSizeResult estimate_sample_size(const Dataset& pilot, const PowerConfig& cfg,
                                             double beta, int n_min, int n_max, int step) {
  if (n_min < 2) fail(errc::invalid_input, "samplesize: need n_min >= 2");
  if (n_max < n_min) fail(errc::invalid_input, "samplesize: need n_max >= n_min");
  if (step < 1) fail(errc::invalid_input, "samplesize: need step >= 1");
  if (!(beta > 0.0 && beta < 1.0)) fail(errc::invalid_input, "samplesize: beta must lie in (0, 1)");

  const double target = 1.0 - beta;
  SampleSizeResult out;
  for (int n = n_min; n <= n_max; n += step) {
    PowerConfig cell = cfg;
    cell.n1 = cell.n2 = n;
    PowerEstimate est = estimate_power(pilot, cell);
    out.trace.emplace_back(n, std::move(est));
    if (out.trace.back().second.power >= target) {
      out.reached = true;
      out.n_hat = n;
      break;
    }
  }
  return out;
}

struct PowerCell {
  int components = 0;
  int n_per_class = 0;
  PowerEstimate estimate;
};

/// Full factorial power evaluation over component counts and per-class
/// sizes. Every cell reuses cfg.seed, so a 1x1 grid reproduces
/// estimate_power exactly and curves across n share random numbers.
inline std::vector<PowerCell> power_curve(const Dataset& pilot, const PowerConfig& cfg,
                                          const std::vector<int>& n_list,
                                          const std::vector<int>& a_list) {
  if (n_list.empty() || a_list.empty()) fail(errc::invalid_input, "curve: empty grid");
  std::vector<PowerCell> cells;
  cells.reserve(n_list.size() * a_list.size());
  for (int a : a_list) {
    for (int n : n_list) {
      PowerConfig cell_cfg = cfg;
      cell_cfg.components = a;
      cell_cfg.n1 = cell_cfg.n2 = n;
      cells.push_back({a, n, estimate_power(pilot, cell_cfg)});
    }
  }
  return cells;
}

}  // namespace plspower
