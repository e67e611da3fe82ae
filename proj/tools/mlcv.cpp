// Command-line front end: surrogate building, single estimates, campaigns,
// diagnostic tables and allocation summaries.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mlcv/error.hpp"
#include "mlcv/harness/campaign.hpp"
#include "mlcv/harness/tables.hpp"

using namespace mlcv;
using nlohmann::json;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw Error("io_error", "cannot write '" + p.string() + "'");
  out << text;
}

SuiteBundle obtain_suite(const HarnessConfig& cfg, const HeatBenchmark& bench, const std::string& suite_path) {
  if (suite_path.empty()) return build_surrogate_suite(cfg, bench);
  std::ifstream in(suite_path);
  if (!in) throw Error("io_error", "cannot open surrogate suite '" + suite_path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("invalid_surrogate", suite_path + ": " + e.what());
  }
  return suite_from_json(j, cfg);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel control-variate Monte Carlo on the heat benchmark"};
  app.require_subcommand(1);

  std::string config_path, suite_path, out_path = ".", method_tag, trace_path;
  double budget = 0.0;
  unsigned replicate = 0;

  auto* build = app.add_subcommand("build-surrogates", "fit the surrogate suites and report Q2");
  build->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  build->add_option("-o,--output", out_path, "suite file to write")->default_val("suite.json");

  auto* est = app.add_subcommand("estimate", "run one estimator and print its report");
  est->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  est->add_option("--method", method_tag, "method tag, e.g. MLMC-MLCV")->required();
  est->add_option("--budget", budget, "sampling budget")->required()->check(CLI::PositiveNumber);
  est->add_option("--suite", suite_path, "surrogate suite from build-surrogates");
  est->add_option("--replicate", replicate, "replicate index")->default_val(0);
  est->add_option("--trace", trace_path, "write the allocation trace CSV here");

  auto* camp = app.add_subcommand("campaign", "replicated budget sweep over methods");
  camp->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  camp->add_option("--suite", suite_path, "surrogate suite from build-surrogates");
  camp->add_option("-o,--output", out_path, "output directory")->default_val(".");

  auto* tables = app.add_subcommand("tables", "correlation matrices and per-level variance diagnostics");
  tables->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  tables->add_option("--suite", suite_path, "surrogate suite from build-surrogates");
  tables->add_option("-o,--output", out_path, "output directory")->default_val(".");
  std::size_t corr_n = 1000, level_n = 10000;
  tables->add_option("--correlation-samples", corr_n, "points per correlation table")->default_val(1000);
  tables->add_option("--level-samples", level_n, "points per level for the variance diagnostics")->default_val(10000);

  std::string runs_path;
  auto* alloc = app.add_subcommand("allocation", "per-level sample sizes and cost shares of finished runs");
  alloc->add_option("runs", runs_path, "runs.csv written by campaign")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*alloc) {
      std::ifstream in(runs_path);
      std::cout << to_csv(allocation_report(runs_from_csv(in)));
      return 0;
    }

    const HarnessConfig cfg = load_harness_config(config_path);
    const HeatBenchmark bench(cfg.benchmark);

    if (*build) {
      const auto b = build_surrogate_suite(cfg, bench);
      write_file(out_path, to_json(b).dump());
      std::cout << surrogate_report_csv(b);
      return 0;
    }

    const SuiteBundle b = obtain_suite(cfg, bench, suite_path);

    if (*est) {
      const Method m = method_from_string(method_tag);
      const auto plan = make_plan(m, cfg.campaign.statistic, bench.finest(), b.suite);
      const auto rec = run_once(plan, bench, budget, cfg.campaign, cell_seed(cfg.seed, m, budget), replicate, true);
      if (!trace_path.empty()) write_file(trace_path, trace_csv(rec));
      json j = to_json(rec);
      j.erase("trace");
      j["construction_cost"] = construction_cost(m, b, cfg);
      j["reference"] = cfg.campaign.reference ? *cfg.campaign.reference : exact_expectation(cfg.benchmark);
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    const std::filesystem::path dir(out_path);
    std::filesystem::create_directories(dir);

    if (*camp) {
      const auto report = run_campaign(cfg, bench, b);
      write_file(dir / "cells.csv", cells_csv(report));
      write_file(dir / "runs.csv", runs_csv(report));
      write_file(dir / "summary.txt", summary_text(report));
      std::cout << summary_text(report);
      return 0;
    }

    if (*tables) {
      RngStream stream(derive_seed(cfg.seed, hash_tag("tables")), {0, 0, Purpose::validation});
      for (const char* set : {"cv", "mlcv", "nested"}) {
        const auto t = correlation_table(heat_entities(set, bench, b), bench.space(), corr_n, stream);
        write_file(dir / (std::string("correlation_") + set + ".csv"), to_csv(t));
      }
      const std::vector<Method> ml = {Method::mlmc, Method::mlmc_cv, Method::mlmc_mlcv, Method::mlmc_cv0,
                                      Method::mlmc_mlcv0};
      const auto q = level_quantities(ml, bench, b, level_n, derive_seed(cfg.seed, hash_tag("levels")));
      write_file(dir / "levels.csv", to_csv(q));
      write_file(dir / "surrogates.csv", surrogate_report_csv(b));
      std::cout << to_csv(q);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 3;
  }
  return 0;
}
