#include "mlcv/harness/campaign.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "mlcv/error.hpp"

namespace mlcv {

using nlohmann::json;

std::uint64_t cell_seed(std::uint64_t master, Method m, double budget) {
  return derive_seed(derive_seed(master, hash_tag(to_string(m))), std::bit_cast<std::uint64_t>(budget));
}

RunRecord run_once(const EstimatorPlan& plan, const Hierarchy& h, double budget, const CampaignSpec& spec,
                   std::uint64_t seed, std::uint32_t replicate, bool keep_trace) {
  RunOptions ro{seed, replicate, spec.alpha, spec.pilot_samples};
  RunRecord rec;
  rec.method = plan.method;
  rec.budget = budget;
  rec.replicate = replicate;
  EstimateResult res;
  if (spec.driver == Driver::adaptive) {
    auto a = adaptive_run(plan, h, budget, {spec.n_init, spec.r, ro});
    rec.iterations = a.trace.size();
    if (keep_trace) rec.trace = std::move(a.trace);
    res = std::move(a.result);
  } else {
    res = two_stage_run(plan, h, budget, ro);
    rec.iterations = 1;
  }
  rec.consumed = res.consumed;
  rec.estimate = res.value;
  for (const auto& l : res.levels) {
    rec.n.push_back(l.n);
    rec.level_cost.push_back(l.cost);
    rec.variance_cv.push_back(l.variance_cv);
    rec.r2.push_back(l.r2);
  }
  return rec;
}

CampaignReport run_campaign(const HarnessConfig& cfg, const HeatBenchmark& bench, const SuiteBundle& b,
                            bool keep_traces) {
  cfg.validate();
  const auto& spec = cfg.campaign;
  CampaignReport report;
  report.reference = spec.reference ? *spec.reference : exact_expectation(cfg.benchmark);

  struct Cell {
    Method method;
    double budget;
    std::optional<EstimatorPlan> plan;
    std::string error;
  };
  std::vector<Cell> cells;
  for (Method m : spec.methods)
    for (double c : spec.budgets) {
      Cell cell{m, c, std::nullopt, {}};
      try {
        cell.plan = make_plan(m, spec.statistic, bench.finest(), b.suite);
      } catch (const Error& e) {
        cell.error = e.code() + std::string(": ") + e.what();
      }
      cells.push_back(std::move(cell));
    }

  const std::size_t R = spec.replicates;
  std::vector<RunRecord> runs(cells.size() * R);
  std::vector<std::string> errors(cells.size() * R);
  parallel_for(
      runs.size(),
      [&](std::size_t task) {
        const auto& cell = cells[task / R];
        const auto r = static_cast<std::uint32_t>(task % R);
        runs[task].method = cell.method;
        runs[task].budget = cell.budget;
        runs[task].replicate = r;
        runs[task].estimate = std::nan("");
        if (!cell.plan) return;
        try {
          runs[task] = run_once(*cell.plan, bench, cell.budget, spec, cell_seed(cfg.seed, cell.method, cell.budget), r,
                                keep_traces);
        } catch (const Error& e) {
          errors[task] = e.code() + std::string(": ") + e.what();
        }
      },
      spec.threads);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellResult out;
    out.method = cells[c].method;
    out.budget = cells[c].budget;
    out.construction_cost = construction_cost(out.method, b, cfg);
    out.cost_axis = out.budget + (spec.include_construction_cost ? out.construction_cost : 0.0);
    out.error = cells[c].error;
    std::vector<double> values;
    double consumed = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      if (out.error.empty() && !errors[c * R + r].empty()) out.error = errors[c * R + r];
      values.push_back(runs[c * R + r].estimate);
      consumed += runs[c * R + r].consumed;
    }
    if (out.error.empty()) {
      out.summary = summarize_replicates(std::move(values), report.reference);
      out.mean_consumed = consumed / static_cast<double>(R);
    }
    report.cells.push_back(std::move(out));
  }
  report.runs = std::move(runs);
  return report;
}

namespace {

std::ostringstream precise_stream() {
  std::ostringstream os;
  os.precision(17);
  return os;
}

} // namespace

std::string cells_csv(const CampaignReport& r) {
  auto os = precise_stream();
  os << "method,budget,construction_cost,cost_axis,replicates,mean,sd,std_error,rmse,mean_consumed,status\n";
  for (const auto& c : r.cells) {
    os << to_string(c.method) << ',' << c.budget << ',' << c.construction_cost << ',' << c.cost_axis << ','
       << c.summary.values.size() << ',' << c.summary.mean << ',' << c.summary.sd << ',' << c.summary.std_error << ','
       << c.summary.rmse << ',' << c.mean_consumed << ',';
    if (c.error.empty()) {
      os << "ok";
    } else {
      std::string e = c.error;
      std::replace(e.begin(), e.end(), ',', ';');
      std::replace(e.begin(), e.end(), '\n', ' ');
      os << "failed: " << e;
    }
    os << '\n';
  }
  return os.str();
}

std::string runs_csv(const CampaignReport& r) {
  auto os = precise_stream();
  os << "method,budget,replicate,consumed,estimate,iterations,level,n,level_cost,variance_cv,r2\n";
  for (const auto& run : r.runs)
    for (std::size_t l = 0; l < run.n.size(); ++l)
      os << to_string(run.method) << ',' << run.budget << ',' << run.replicate << ',' << run.consumed << ','
         << run.estimate << ',' << run.iterations << ',' << l << ',' << run.n[l] << ',' << run.level_cost[l] << ','
         << run.variance_cv[l] << ',' << run.r2[l] << '\n';
  return os.str();
}

std::vector<RunRecord> runs_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("method,budget,replicate", 0) != 0)
    throw Error("invalid_argument", "runs file: unexpected header");
  std::vector<RunRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    if (f.size() != 11) throw Error("invalid_argument", "runs file: row " + std::to_string(row) + " has wrong arity");
    try {
      const Method m = method_from_string(f[0]);
      const double budget = std::stod(f[1]);
      const auto rep = static_cast<std::size_t>(std::stoul(f[2]));
      const auto level = static_cast<std::size_t>(std::stoul(f[6]));
      if (level == 0) {
        RunRecord r;
        r.method = m;
        r.budget = budget;
        r.replicate = rep;
        r.consumed = std::stod(f[3]);
        r.estimate = std::stod(f[4]);
        r.iterations = static_cast<std::size_t>(std::stoul(f[5]));
        out.push_back(std::move(r));
      }
      if (out.empty() || out.back().method != m || out.back().replicate != rep || out.back().n.size() != level)
        throw Error("invalid_argument", "runs file: row " + std::to_string(row) + " is out of order");
      out.back().n.push_back(static_cast<std::size_t>(std::stoul(f[7])));
      out.back().level_cost.push_back(std::stod(f[8]));
      out.back().variance_cv.push_back(std::stod(f[9]));
      out.back().r2.push_back(std::stod(f[10]));
    } catch (const std::logic_error&) {
      throw Error("invalid_argument", "runs file: row " + std::to_string(row) + " is malformed");
    }
  }
  return out;
}

std::string summary_text(const CampaignReport& r) {
  std::ostringstream os;
  os.precision(5);
  os << "reference " << r.reference << "\n";
  os << "method        budget     cost_axis  rmse         mean         status\n";
  for (const auto& c : r.cells) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-13s %-10g %-10g %-12.5g %-12.6g %s\n", to_string(c.method).c_str(), c.budget,
                  c.cost_axis, c.summary.rmse, c.summary.mean, c.error.empty() ? "ok" : "failed");
    os << buf;
  }
  return os.str();
}

std::string trace_csv(const RunRecord& r) {
  auto os = precise_stream();
  os << "iteration,consumed,chosen,increment,level,n,variance_cv\n";
  for (const auto& s : r.trace)
    for (std::size_t l = 0; l < s.n.size(); ++l)
      os << s.iteration << ',' << s.consumed << ',' << s.chosen << ',' << s.increment << ',' << l << ',' << s.n[l]
         << ',' << s.variance_cv[l] << '\n';
  return os.str();
}

json to_json(const RunRecord& r) {
  json trace = json::array();
  for (const auto& s : r.trace)
    trace.push_back({{"iteration", s.iteration}, {"n", s.n}, {"consumed", s.consumed},
                     {"variance_cv", s.variance_cv}, {"chosen", s.chosen}, {"increment", s.increment}});
  return {{"method", to_string(r.method)}, {"budget", r.budget},         {"replicate", r.replicate},
          {"consumed", r.consumed},        {"estimate", r.estimate},     {"n", r.n},
          {"level_cost", r.level_cost},    {"variance_cv", r.variance_cv}, {"r2", r.r2},
          {"iterations", r.iterations},    {"trace", trace}};
}

std::vector<AllocationRow> allocation_report(const std::vector<RunRecord>& runs) {
  std::map<std::pair<std::string, double>, std::vector<const RunRecord*>> groups;
  std::vector<std::pair<std::string, double>> order;
  for (const auto& r : runs) {
    const auto key = std::make_pair(to_string(r.method), r.budget);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  auto quantile = [](std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  std::vector<AllocationRow> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    const std::size_t levels = g.front()->n.size();
    for (std::size_t l = 0; l < levels; ++l) {
      std::vector<double> n;
      double share = 0.0;
      for (const auto* r : g) {
        if (r->n.size() != levels) throw Error("invalid_argument", "allocation_report: runs disagree on levels");
        n.push_back(static_cast<double>(r->n[l]));
        share += static_cast<double>(r->n[l]) * r->level_cost[l] / r->consumed;
      }
      out.push_back({method_from_string(key.first), key.second, l, quantile(n, 0.5), quantile(n, 0.25),
                     quantile(n, 0.75), share / static_cast<double>(g.size())});
    }
  }
  return out;
}

std::string to_csv(const std::vector<AllocationRow>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "method,budget,level,n_median,n_q1,n_q3,share\n";
  for (const auto& r : rows)
    os << to_string(r.method) << ',' << r.budget << ',' << r.level << ',' << r.n_median << ',' << r.n_q1 << ','
       << r.n_q3 << ',' << r.share << '\n';
  return os.str();
}

} // namespace mlcv
