#pragma once

#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlcv/estimators/replicate.hpp"
#include "mlcv/harness/suite.hpp"

namespace mlcv {

struct RunRecord {
  Method method = Method::mc;
  double budget = 0.0;
  std::size_t replicate = 0;
  double consumed = 0.0;
  double estimate = 0.0;
  std::vector<std::size_t> n;
  std::vector<double> level_cost;  // cost of one sample per plan level
  std::vector<double> variance_cv;
  std::vector<double> r2;
  std::size_t iterations = 0;
  std::vector<TraceStep> trace;  // only when requested
};

struct CellResult {
  Method method = Method::mc;
  double budget = 0.0;
  double construction_cost = 0.0;
  double cost_axis = 0.0;  // budget, plus construction cost when requested
  ReplicateSummary summary;
  double mean_consumed = 0.0;
  std::string error;  // empty when every replicate succeeded
};

struct CampaignReport {
  double reference = 0.0;
  std::vector<CellResult> cells;  // methods x budgets, in config order
  std::vector<RunRecord> runs;    // cell-major, replicate order
};

// Seed of a (method, budget) cell; replicates are told apart by the stream id.
std::uint64_t cell_seed(std::uint64_t master, Method m, double budget);

RunRecord run_once(const EstimatorPlan& plan, const Hierarchy& h, double budget, const CampaignSpec& spec,
                   std::uint64_t seed, std::uint32_t replicate, bool keep_trace = false);

CampaignReport run_campaign(const HarnessConfig& cfg, const HeatBenchmark& bench, const SuiteBundle& b,
                            bool keep_traces = false);

std::string cells_csv(const CampaignReport& r);
// One row per (run, level).
std::string runs_csv(const CampaignReport& r);
std::vector<RunRecord> runs_from_csv(std::istream& in);
std::string summary_text(const CampaignReport& r);
std::string trace_csv(const RunRecord& r);
nlohmann::json to_json(const RunRecord& r);

struct AllocationRow {
  Method method = Method::mc;
  double budget = 0.0;
  std::size_t level = 0;
  double n_median = 0.0, n_q1 = 0.0, n_q3 = 0.0;
  double share = 0.0;  // mean fraction of the consumed budget spent on the level
};

std::vector<AllocationRow> allocation_report(const std::vector<RunRecord>& runs);
std::string to_csv(const std::vector<AllocationRow>& rows);

} // namespace mlcv
