#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mlcv/error.hpp"
#include "mlcv/harness/campaign.hpp"
#include "mlcv/harness/tables.hpp"

using namespace mlcv;
using nlohmann::json;

TEST_CASE("config defaults, round trip and validation") {
  const HarnessConfig d;
  CHECK(d.profile == "desk");
  CHECK(d.campaign.replicates == 100);
  CHECK(d.surrogates.subset_pool == 10000);

  const auto cfg = harness_config_from_json(json::parse(R"({
    "seed": 5,
    "campaign": {"methods": ["MLMC-CV[0]", "MC"], "budgets": [50], "replicates": 3,
                 "driver": "two-stage", "alpha": "pilot", "statistic": "variance"},
    "surrogates": {"cv_controls": ["pc", "t1"], "nested_sizes": [40, 20, 10, 5]}
  })"));
  CHECK(cfg.seed == 5);
  CHECK(cfg.campaign.methods == std::vector<Method>{Method::mlmc_cv0, Method::mc});
  CHECK(cfg.campaign.driver == Driver::two_stage);
  CHECK(cfg.campaign.alpha == AlphaMode::pilot);
  CHECK(cfg.campaign.statistic == Statistic::variance);
  CHECK(cfg.surrogates.nested_sizes.back() == 5);

  const auto again = harness_config_from_json(to_json(cfg));
  CHECK(to_json(again) == to_json(cfg));

  const auto paper = harness_config_from_json(json{{"profile", "paper"}});
  CHECK(paper.campaign.replicates == 500);
  CHECK(paper.surrogates.subset_pool == 1000000);

  CHECK_THROWS_AS(harness_config_from_json(json::parse(R"({"campaign": {"methods": ["MLMC-X"]}})")), Error);
  CHECK_THROWS_AS(harness_config_from_json(json::parse(R"({"campaign": {"budgets": [-1]}})")), Error);
}

TEST_CASE("construction cost per method") {
  SuiteBundle b;
  b.mlcv_design_cost = {100, 100, 100, 100};
  b.nested_design_cost = {100, 100, 100, 100};
  HarnessConfig cfg;
  CHECK(construction_cost(Method::mc, b, cfg) == 0.0);
  CHECK(construction_cost(Method::mlmc, b, cfg) == 0.0);
  CHECK(construction_cost(Method::cv, b, cfg) == 100.0);
  CHECK(construction_cost(Method::mlcv, b, cfg) == 400.0);
  CHECK(construction_cost(Method::mlmc_cv, b, cfg) == 400.0);
  CHECK(construction_cost(Method::mlmc_mlcv, b, cfg) == 400.0);
  CHECK(construction_cost(Method::mlmc_cv0, b, cfg) == 100.0);
  CHECK(construction_cost(Method::mlmc_mlcv0, b, cfg) == 200.0);
  cfg.surrogates.cv_controls = {"t1"};
  CHECK(construction_cost(Method::cv, b, cfg) == 0.0);
}

TEST_CASE("correlation table") {
  const InputSpace space({{-1, 1}, {-1, 1}});
  std::vector<Entity> e = {
      {"x", [](std::span<const double> x) { return x[0]; }},
      {"2x+1", [](std::span<const double> x) { return 2 * x[0] + 1; }},
      {"-x", [](std::span<const double> x) { return -x[0]; }},
      {"y", [](std::span<const double> x) { return x[1]; }},
  };
  const auto t = correlation_table(e, space, 2000, RngStream(3, {}));
  for (int i = 0; i < 4; ++i) CHECK(t.r(i, i) == doctest::Approx(1.0));
  CHECK(t.r(0, 1) == doctest::Approx(1.0));
  CHECK(t.r(0, 2) == doctest::Approx(-1.0));
  CHECK(std::abs(t.r(0, 3)) < 0.1);
  CHECK(t.r == t.r.transpose());
  CHECK(to_csv(t).rfind("entity,x,2x+1,-x,y\n", 0) == 0);

  e.push_back({"flat", [](std::span<const double>) { return 3.0; }});
  CHECK_THROWS_AS(correlation_table(e, space, 100, RngStream(3, {})), Error);
}

TEST_CASE("small campaign: determinism, CSV round trip, allocation report") {
  HarnessConfig cfg;
  cfg.campaign.methods = {Method::mc, Method::mlmc};
  cfg.campaign.budgets = {40, 80};
  cfg.campaign.replicates = 4;
  cfg.campaign.n_init = 5;
  const HeatBenchmark bench(cfg.benchmark);
  const SuiteBundle none;

  const auto a = run_campaign(cfg, bench, none);
  cfg.campaign.threads = 1;
  const auto b = run_campaign(cfg, bench, none);
  REQUIRE(a.cells.size() == 4);
  CHECK(a.runs.size() == 16);
  CHECK(runs_csv(a) == runs_csv(b));
  CHECK(cells_csv(a) == cells_csv(b));
  CHECK(a.reference == exact_expectation(cfg.benchmark));
  for (const auto& c : a.cells) {
    CHECK(c.error.empty());
    CHECK(c.mean_consumed >= c.budget * (c.method == Method::mc ? 1.0 : 0.5));
  }

  std::istringstream in(runs_csv(a));
  const auto back = runs_from_csv(in);
  REQUIRE(back.size() == a.runs.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].method == a.runs[i].method);
    CHECK(back[i].n == a.runs[i].n);
    CHECK(back[i].estimate == doctest::Approx(a.runs[i].estimate).epsilon(1e-12));
  }

  const auto rows = allocation_report(a.runs);
  double total = 0.0;
  std::size_t mlmc_rows = 0;
  for (const auto& r : rows)
    if (r.method == Method::mlmc && r.budget == 80) {
      total += r.share;
      ++mlmc_rows;
      CHECK(r.n_q1 <= r.n_median);
      CHECK(r.n_median <= r.n_q3);
    }
  CHECK(mlmc_rows == 4);
  CHECK(total == doctest::Approx(1.0));

  // Methods with controls need a surrogate suite.
  cfg.campaign.methods = {Method::mlcv};
  const auto c = run_campaign(cfg, bench, none);
  CHECK(!c.cells[0].error.empty());
}
