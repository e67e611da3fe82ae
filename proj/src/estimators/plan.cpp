#include "mlcv/estimators/plan.hpp"

#include "mlcv/error.hpp"

namespace mlcv {

namespace {

const std::vector<std::pair<Method, std::string>>& method_tags() {
  static const std::vector<std::pair<Method, std::string>> tags = {
      {Method::mc, "MC"},           {Method::cv, "CV"},
      {Method::mlcv, "MLCV"},       {Method::mlmc, "MLMC"},
      {Method::mlmc_cv, "MLMC-CV"}, {Method::mlmc_mlcv, "MLMC-MLCV"},
      {Method::mlmc_cv0, "MLMC-CV[0]"}, {Method::mlmc_mlcv0, "MLMC-MLCV[0]"},
  };
  return tags;
}

const std::shared_ptr<const PcSurrogate>& pick(const std::vector<std::shared_ptr<const PcSurrogate>>& v,
                                               std::size_t i, const char* what) {
  if (i >= v.size() || !v[i])
    throw Error("missing_surrogate", std::string("surrogate ") + what + std::to_string(i) + " is not available");
  return v[i];
}

ControlVariate pc_control(const std::vector<std::shared_ptr<const PcSurrogate>>& v, std::size_t i, const char* what) {
  return ControlVariate::from_pc(pick(v, i, what), what + std::to_string(i));
}

} // namespace

std::string to_string(Method m) {
  for (const auto& [k, s] : method_tags())
    if (k == m) return s;
  return "?";
}

Method method_from_string(const std::string& tag) {
  for (const auto& [k, s] : method_tags())
    if (s == tag) return k;
  throw Error("invalid_argument", "unknown method '" + tag + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> m = {Method::mc,      Method::cv,        Method::mlcv,     Method::mlmc,
                                        Method::mlmc_cv, Method::mlmc_mlcv, Method::mlmc_cv0, Method::mlmc_mlcv0};
  return m;
}

bool is_multilevel(Method m) {
  return m != Method::mc && m != Method::cv && m != Method::mlcv;
}

std::vector<ControlTerm> level_zero_controls(const SurrogateSuite& suite, std::size_t count) {
  std::vector<ControlTerm> out;
  for (std::size_t l = 0; l < count; ++l) out.push_back({pc_control(suite.g, l, "g"), std::nullopt});
  return out;
}

// Mean: h_m. Variance: (g_m − μ)² − (g̃_{m−1} − μ̃)², whose difference is
// the centred square of h_m's contribution.
std::vector<ControlTerm> correction_controls(const SurrogateSuite& suite, Statistic s, std::size_t first,
                                             std::size_t last) {
  std::vector<ControlTerm> out;
  for (std::size_t m = first; m <= last; ++m) {
    if (s == Statistic::expectation)
      out.push_back({pc_control(suite.h, m, "h"), std::nullopt});
    else
      out.push_back({pc_control(suite.g, m, "g"), pc_control(suite.g_tilde, m - 1, "gt")});
  }
  return out;
}

EstimatorPlan make_plan(Method method, Statistic statistic, std::size_t L, const SurrogateSuite& suite) {
  EstimatorPlan plan;
  plan.method = method;
  plan.statistic = statistic;
  auto single = [&](std::vector<ControlTerm> controls) {
    plan.levels.push_back({L, std::nullopt, std::move(controls), std::nullopt});
  };
  auto ladder = [&](std::vector<ControlTerm> zero, auto&& upper) {
    plan.levels.push_back({0, std::nullopt, std::move(zero), std::nullopt});
    for (std::size_t l = 1; l <= L; ++l) plan.levels.push_back({l, l - 1, upper(l), std::nullopt});
  };
  auto none = [](std::size_t) { return std::vector<ControlTerm>{}; };

  switch (method) {
  case Method::mc:
    single({});
    break;
  case Method::cv: {
    if (suite.single.empty()) throw Error("missing_surrogate", "CV needs at least one control");
    std::vector<ControlTerm> c;
    for (const auto& v : suite.single) c.push_back({v, std::nullopt});
    single(std::move(c));
    break;
  }
  case Method::mlcv: {
    std::vector<ControlTerm> c;
    for (std::size_t l = 0; l <= L; ++l) c.push_back({pc_control(suite.mlcv, l, "g"), std::nullopt});
    single(std::move(c));
    break;
  }
  case Method::mlmc:
    ladder({}, none);
    break;
  case Method::mlmc_cv:
    ladder(level_zero_controls(suite, 1), [&](std::size_t l) { return correction_controls(suite, statistic, l, l); });
    break;
  case Method::mlmc_mlcv:
    ladder(level_zero_controls(suite, L + 1), [&](std::size_t) { return correction_controls(suite, statistic, 1, L); });
    break;
  case Method::mlmc_cv0:
    ladder(level_zero_controls(suite, 1), none);
    break;
  case Method::mlmc_mlcv0:
    if (L == 0) throw Error("invalid_argument", "MLMC-MLCV[0] needs at least two levels");
    ladder(level_zero_controls(suite, 2), [&](std::size_t) { return correction_controls(suite, statistic, 1, 1); });
    break;
  }
  for (auto& level : plan.levels)
    if (!level.controls.empty()) level.sigma = exact_control_covariance(level.controls, statistic);
  return plan;
}

} // namespace mlcv
