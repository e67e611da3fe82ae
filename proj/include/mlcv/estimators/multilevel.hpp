#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "mlcv/estimators/plan.hpp"
#include "mlcv/heatbench/hierarchy.hpp"

namespace mlcv {

// same_sample: α from the samples it corrects. pilot: α from an independent
// pilot sample, then held fixed. zero: no correction.
enum class AlphaMode { same_sample, pilot, zero };

const char* to_string(AlphaMode m) noexcept;
AlphaMode alpha_mode_from_string(const std::string& s);

struct RunOptions {
  std::uint64_t seed = 0;
  std::uint32_t replicate = 0;
  AlphaMode alpha = AlphaMode::same_sample;
  std::size_t pilot_samples = 100;
};

struct LevelReport {
  std::size_t level = 0;  // fine level of the sample
  std::size_t n = 0;
  double cost = 0.0;       // cost of one sample, C_l + C_{l−1}
  double estimate = 0.0;   // corrected level term
  double variance = 0.0;   // per-sample variance of the uncorrected term
  double variance_cv = 0.0;
  double r2 = 0.0;         // 1 − variance_cv / variance
  Eigen::VectorXd alpha;
  std::vector<std::string> dropped;
};

struct EstimateResult {
  double value = 0.0;
  double consumed = 0.0;  // Σ n_l·cost_l
  std::vector<LevelReport> levels;
};

// Fixed allocation: n[i] samples for plan.levels[i].
EstimateResult estimate(const EstimatorPlan& plan, const Hierarchy& hierarchy, const std::vector<std::size_t>& n,
                        const RunOptions& options = {});

EstimateResult mlmc_estimate(const Hierarchy& hierarchy, const std::vector<std::size_t>& n, Statistic s,
                             const RunOptions& options = {});
// Single-level estimator on the finest level with the given surrogates as controls.
EstimateResult mlcv_estimate(const Hierarchy& hierarchy, const std::vector<std::shared_ptr<const PcSurrogate>>& g,
                             std::size_t n, Statistic s, const RunOptions& options = {});
// coarse_only selects the [0] variant.
EstimateResult mlmc_cv_estimate(const Hierarchy& hierarchy, const SurrogateSuite& suite,
                                const std::vector<std::size_t>& n, Statistic s, bool coarse_only = false,
                                const RunOptions& options = {});
EstimateResult mlmc_mlcv_estimate(const Hierarchy& hierarchy, const SurrogateSuite& suite,
                                  const std::vector<std::size_t>& n, Statistic s, bool coarse_only = false,
                                  const RunOptions& options = {});

struct AdaptiveOptions {
  std::size_t n_init = 30;
  double r = 1.1;
  RunOptions run;
};

struct TraceStep {
  std::size_t iteration = 0;
  std::vector<std::size_t> n;  // after this iteration's draws
  double consumed = 0.0;
  std::vector<double> variance_cv;
  std::size_t chosen = 0;      // level to inflate next
  std::size_t increment = 0;
};

struct AdaptiveResult {
  EstimateResult result;
  std::vector<TraceStep> trace;
};

// Sequential allocation: draw, re-estimate α and the variance proxies from
// all samples so far, then inflate the level with the largest
// V^CV/(r n² cost) by ⌊(r−1)n⌋. Stops once the consumed budget exceeds
// `budget` (checked before drawing). Single-level plans draw ⌊budget/cost⌋.
AdaptiveResult adaptive_run(const EstimatorPlan& plan, const Hierarchy& hierarchy, double budget,
                            const AdaptiveOptions& options = {});

// α and the allocation come from an independent pilot sample of
// options.pilot_samples per level; the estimate uses fresh samples only.
EstimateResult two_stage_run(const EstimatorPlan& plan, const Hierarchy& hierarchy, double budget,
                             const RunOptions& options = {});

} // namespace mlcv
