#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mlcv/estimators/controls.hpp"

namespace mlcv {

enum class Method { mc, cv, mlcv, mlmc, mlmc_cv, mlmc_mlcv, mlmc_cv0, mlmc_mlcv0 };

// Tags: MC, CV, MLCV, MLMC, MLMC-CV, MLMC-MLCV, MLMC-CV[0], MLMC-MLCV[0].
std::string to_string(Method m);
Method method_from_string(const std::string& tag);
const std::vector<Method>& all_methods();
bool is_multilevel(Method m);

/// Surrogates a plan can draw controls from.
struct SurrogateSuite {
  std::vector<std::shared_ptr<const PcSurrogate>> mlcv;     // g_0..g_L, independent designs
  std::vector<std::shared_ptr<const PcSurrogate>> g;        // g_0..g_L, nested designs
  std::vector<std::shared_ptr<const PcSurrogate>> h;        // h[l] models f_l − f_{l−1}; h[0] unused
  std::vector<std::shared_ptr<const PcSurrogate>> g_tilde;  // g_tilde[l] = g[l+1] − h[l+1]
  std::vector<ControlVariate> single;                       // controls of the single-level CV estimator
};

/// One independent sample of the plan: f_fine (minus f_coarse) with controls.
struct LevelSpec {
  std::size_t fine = 0;
  std::optional<std::size_t> coarse;
  std::vector<ControlTerm> controls;
  // Exact covariance of the control samples, when known.
  std::optional<Eigen::MatrixXd> sigma;
};

struct EstimatorPlan {
  Method method = Method::mc;
  Statistic statistic = Statistic::expectation;
  std::vector<LevelSpec> levels;

  bool multilevel() const { return levels.size() > 1 || (levels.size() == 1 && levels[0].coarse); }
};

// Control assignment of each method for a hierarchy with levels 0..finest.
EstimatorPlan make_plan(Method method, Statistic statistic, std::size_t finest, const SurrogateSuite& suite);

// Control sets built by make_plan, exposed for custom plans.
std::vector<ControlTerm> level_zero_controls(const SurrogateSuite& suite, std::size_t count);
std::vector<ControlTerm> correction_controls(const SurrogateSuite& suite, Statistic s, std::size_t first,
                                             std::size_t last);

} // namespace mlcv
