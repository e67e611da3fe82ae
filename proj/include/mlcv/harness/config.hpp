#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlcv/estimators/multilevel.hpp"
#include "mlcv/heatbench/heat.hpp"
#include "mlcv/pce/fit.hpp"

namespace mlcv {

struct SurrogatePlan {
  std::vector<std::size_t> mlcv_sizes{800, 400, 200, 100};    // independent annealed LHS per level
  std::vector<std::size_t> nested_sizes{800, 400, 200, 100};  // nested designs, coarsest first
  AdaptiveFitOptions fit;
  AnnealOptions anneal;
  std::size_t subset_pool = 10000;
  std::size_t test_size = 10000;
  // Controls of the single-level CV estimator: "pc" (finest independent PC) and/or "t1".
  std::vector<std::string> cv_controls{"pc"};
};

enum class Driver { adaptive, two_stage };

struct CampaignSpec {
  std::vector<Method> methods{Method::mc, Method::mlmc, Method::mlcv, Method::mlmc_mlcv};
  std::vector<double> budgets{100, 300, 1000, 3000, 10000};
  std::size_t replicates = 100;
  bool include_construction_cost = false;
  Driver driver = Driver::adaptive;
  std::size_t n_init = 30;
  double r = 1.1;
  AlphaMode alpha = AlphaMode::same_sample;
  std::size_t pilot_samples = 100;
  Statistic statistic = Statistic::expectation;
  // Defaults to the exact expectation of the benchmark.
  std::optional<double> reference;
  std::size_t threads = 0;  // 0: MLCV_THREADS or hardware concurrency
};

struct HarnessConfig {
  std::uint64_t seed = 20240901;
  std::string profile = "desk";  // "desk" or "paper" (500 replicates, subset pool 10^6)
  HeatConfig benchmark;
  SurrogatePlan surrogates;
  CampaignSpec campaign;

  void validate() const;
};

HarnessConfig harness_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HarnessConfig& cfg);
HarnessConfig load_harness_config(const std::string& path);

const char* to_string(Driver d) noexcept;

} // namespace mlcv
