#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mlcv/estimators/plan.hpp"
#include "mlcv/harness/config.hpp"
#include "mlcv/heatbench/heat.hpp"

namespace mlcv {

struct SurrogateRecord {
  std::string name;   // g0, h1, gt0, ...
  std::string suite;  // "mlcv" or "nested"
  std::size_t level = 0;
  std::size_t doe_size = 0;
  int degree = -1;
  std::size_t terms = 0;
  double loo = 0.0;
  double q2 = 0.0;  // on the shared test sample
};

/// Surrogates of the benchmark with their quality report and design costs.
struct SuiteBundle {
  SurrogateSuite suite;
  std::vector<SurrogateRecord> records;
  std::vector<double> mlcv_design_cost;    // n_l·C_l of each independent design
  std::vector<double> nested_design_cost;  // n_l·C_l of each nested design
};

// Independent suite g_0..g_L for the single-level estimators and nested
// suite g_l, h_l, g̃_{l−1} = g_l − h_l for the multilevel ones.
SuiteBundle build_surrogate_suite(const HarnessConfig& cfg, const HeatBenchmark& bench);

// Surrogates plus the controls derived from the config (Taylor model etc.).
nlohmann::json to_json(const SuiteBundle& b);
SuiteBundle suite_from_json(const nlohmann::json& j, const HarnessConfig& cfg);

// Evaluations spent on the designs a method's controls are trained on.
double construction_cost(Method m, const SuiteBundle& b, const HarnessConfig& cfg);

std::string surrogate_report_csv(const SuiteBundle& b);

} // namespace mlcv
