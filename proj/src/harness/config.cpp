#include "mlcv/harness/config.hpp"

#include <fstream>

#include "mlcv/error.hpp"

namespace mlcv {

using nlohmann::json;

const char* to_string(Driver d) noexcept {
  return d == Driver::adaptive ? "adaptive" : "two-stage";
}

void HarnessConfig::validate() const {
  benchmark.validate();
  const auto L = benchmark.levels();
  if (surrogates.mlcv_sizes.size() != L || surrogates.nested_sizes.size() != L)
    throw Error("invalid_config", "surrogates: one design size per level is required");
  for (std::size_t l = 1; l < L; ++l)
    if (surrogates.nested_sizes[l] > surrogates.nested_sizes[l - 1])
      throw Error("invalid_config", "surrogates: nested design sizes must not increase with the level");
  for (const auto& c : surrogates.cv_controls)
    if (c != "pc" && c != "t1") throw Error("invalid_config", "surrogates: unknown CV control '" + c + "'");
  if (campaign.budgets.empty()) throw Error("invalid_config", "campaign: at least one budget is required");
  for (std::size_t i = 0; i < campaign.budgets.size(); ++i) {
    if (!(campaign.budgets[i] > 0)) throw Error("invalid_config", "campaign: budgets must be positive");
    if (i > 0 && !(campaign.budgets[i] > campaign.budgets[i - 1]))
      throw Error("invalid_config", "campaign: budgets must be ascending");
  }
  if (campaign.replicates < 1) throw Error("invalid_config", "campaign: replicates must be at least 1");
  if (campaign.methods.empty()) throw Error("invalid_config", "campaign: at least one method is required");
  if (campaign.n_init < 2) throw Error("invalid_config", "campaign: n_init must be at least 2");
  if (!(campaign.r > 1.0)) throw Error("invalid_config", "campaign: r must exceed 1");
}

HarnessConfig harness_config_from_json(const json& j) {
  HarnessConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.profile = j.value("profile", c.profile);
    if (c.profile == "paper") {
      c.campaign.replicates = 500;
      c.surrogates.subset_pool = 1000000;
    } else if (c.profile != "desk") {
      throw Error("invalid_config", "unknown profile '" + c.profile + "'");
    }
    if (j.contains("benchmark")) c.benchmark = heat_config_from_json(j.at("benchmark"));
    if (j.contains("surrogates")) {
      const auto& s = j.at("surrogates");
      auto& p = c.surrogates;
      p.mlcv_sizes = s.value("mlcv_sizes", p.mlcv_sizes);
      p.nested_sizes = s.value("nested_sizes", p.nested_sizes);
      p.fit.p_max = s.value("p_max", p.fit.p_max);
      p.fit.degree_patience = s.value("degree_patience", p.fit.degree_patience);
      p.fit.min_step_patience = s.value("min_step_patience", p.fit.min_step_patience);
      p.fit.step_patience_fraction = s.value("step_patience_fraction", p.fit.step_patience_fraction);
      p.anneal.iterations = s.value("anneal_iterations", p.anneal.iterations);
      p.subset_pool = s.value("subset_pool", p.subset_pool);
      p.test_size = s.value("test_size", p.test_size);
      p.cv_controls = s.value("cv_controls", p.cv_controls);
    }
    if (j.contains("campaign")) {
      const auto& s = j.at("campaign");
      auto& p = c.campaign;
      if (s.contains("methods")) {
        p.methods.clear();
        for (const auto& m : s.at("methods")) p.methods.push_back(method_from_string(m.get<std::string>()));
      }
      p.budgets = s.value("budgets", p.budgets);
      p.replicates = s.value("replicates", p.replicates);
      p.include_construction_cost = s.value("include_construction_cost", p.include_construction_cost);
      const auto driver = s.value("driver", std::string(to_string(p.driver)));
      if (driver == "adaptive") p.driver = Driver::adaptive;
      else if (driver == "two-stage") p.driver = Driver::two_stage;
      else throw Error("invalid_config", "unknown driver '" + driver + "'");
      p.n_init = s.value("n_init", p.n_init);
      p.r = s.value("r", p.r);
      p.alpha = alpha_mode_from_string(s.value("alpha", std::string(to_string(p.alpha))));
      p.pilot_samples = s.value("pilot_samples", p.pilot_samples);
      p.statistic = statistic_from_string(s.value("statistic", std::string(to_string(p.statistic))));
      if (s.contains("reference") && !s.at("reference").is_null()) p.reference = s.at("reference").get<double>();
      p.threads = s.value("threads", p.threads);
    }
  } catch (const json::exception& e) {
    throw Error("invalid_config", e.what());
  }
  c.validate();
  return c;
}

json to_json(const HarnessConfig& c) {
  json methods = json::array();
  for (auto m : c.campaign.methods) methods.push_back(to_string(m));
  const auto& s = c.surrogates;
  const auto& p = c.campaign;
  return {
      {"seed", c.seed},
      {"profile", c.profile},
      {"benchmark", to_json(c.benchmark)},
      {"surrogates",
       {{"mlcv_sizes", s.mlcv_sizes},
        {"nested_sizes", s.nested_sizes},
        {"p_max", s.fit.p_max},
        {"degree_patience", s.fit.degree_patience},
        {"min_step_patience", s.fit.min_step_patience},
        {"step_patience_fraction", s.fit.step_patience_fraction},
        {"anneal_iterations", s.anneal.iterations},
        {"subset_pool", s.subset_pool},
        {"test_size", s.test_size},
        {"cv_controls", s.cv_controls}}},
      {"campaign",
       {{"methods", methods},
        {"budgets", p.budgets},
        {"replicates", p.replicates},
        {"include_construction_cost", p.include_construction_cost},
        {"driver", to_string(p.driver)},
        {"n_init", p.n_init},
        {"r", p.r},
        {"alpha", to_string(p.alpha)},
        {"pilot_samples", p.pilot_samples},
        {"statistic", to_string(p.statistic)},
        {"reference", p.reference ? json(*p.reference) : json(nullptr)},
        {"threads", p.threads}}},
  };
}

HarnessConfig load_harness_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", "cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("invalid_config", path + ": " + e.what());
  }
  return harness_config_from_json(j);
}

} // namespace mlcv
