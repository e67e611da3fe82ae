#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mlcv/harness/suite.hpp"

namespace mlcv {

struct Entity {
  std::string name;
  std::function<double(std::span<const double>)> f;
};

struct CorrelationTable {
  std::vector<std::string> names;
  Eigen::MatrixXd r;
};

// Pearson correlations of the entities on n common input points.
CorrelationTable correlation_table(const std::vector<Entity>& entities, const InputSpace& space, std::size_t n,
                                   RngStream stream);
std::string to_csv(const CorrelationTable& t);

// Entity sets of the benchmark:
//   "cv":     Y_L, finest independent PC, first-order Taylor model of f_L
//   "mlcv":   Y_L and the independent suite g_0..g_L
//   "nested": Y_l, Y_l − Y_{l−1}, nested g_l and h_l
std::vector<Entity> heat_entities(const std::string& set, const HeatBenchmark& bench, const SuiteBundle& b);

/// Per-level variance diagnostics of one multilevel method on a common sample.
struct LevelQuantities {
  Method method;
  std::vector<double> variance;     // V[Y_l − Y_{l−1}]
  std::vector<double> r2;
  std::vector<double> variance_cv;
  std::vector<double> shares;       // optimal n_l·(C_l + C_{l−1}) / budget
  std::vector<double> s2;           // squared partial sums S_l²
};

// All methods share the samples (same seed), n points per level.
std::vector<LevelQuantities> level_quantities(const std::vector<Method>& methods, const HeatBenchmark& bench,
                                              const SuiteBundle& b, std::size_t n, std::uint64_t seed);
std::string to_csv(const std::vector<LevelQuantities>& q);

} // namespace mlcv
