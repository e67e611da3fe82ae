#include "mlcv/harness/suite.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mlcv/error.hpp"
#include "mlcv/pce/fit.hpp"
#include "mlcv/taylor/taylor.hpp"

namespace mlcv {

using nlohmann::json;

namespace {

std::uint64_t suite_seed(std::uint64_t master, const char* tag) { return derive_seed(master, hash_tag(tag)); }

Eigen::VectorXd evaluate_on(const Doe& doe, const std::function<double(std::span<const double>)>& f) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(doe.size()));
  for (std::size_t i = 0; i < doe.size(); ++i) y[static_cast<Eigen::Index>(i)] = f(doe.row(i));
  return y;
}

std::shared_ptr<const PcSurrogate> fit(const Doe& doe, const Eigen::VectorXd& y, AdaptiveFitOptions opt,
                                       const std::string& id) {
  opt.doe_id = id;
  try {
    return std::make_shared<const PcSurrogate>(adaptive_fit(doe, y, opt));
  } catch (const Error& e) {
    throw Error(e.code(), "fitting " + id + ": " + e.what());
  }
}

SurrogateRecord record(const std::string& name, const std::string& suite, std::size_t level, const PcSurrogate& s,
                       double q2) {
  const auto& p = s.provenance();
  return {name, suite, level, 0, p.degree, s.size(), p.loo, q2};
}

void attach_single_controls(SuiteBundle& b, const HarnessConfig& cfg) {
  const std::size_t L = cfg.benchmark.levels() - 1;
  b.suite.single.clear();
  for (const auto& c : cfg.surrogates.cv_controls) {
    if (c == "pc") {
      b.suite.single.push_back(ControlVariate::from_pc(b.suite.mlcv.at(L), "gPC" + std::to_string(L)));
    } else {
      auto t1 = std::make_shared<const PiecewiseT1>(heat_t1(cfg.benchmark, L));
      b.suite.single.push_back(ControlVariate::from_function(
          [t1](std::span<const double> x) { return t1->evaluate(x); }, t1->mean(), t1->variance(),
          "T1_" + std::to_string(L)));
    }
  }
}

} // namespace

SuiteBundle build_surrogate_suite(const HarnessConfig& cfg, const HeatBenchmark& bench) {
  cfg.validate();
  const auto& plan = cfg.surrogates;
  const std::size_t levels = bench.levels();
  const InputSpace& space = bench.space();
  SuiteBundle b;

  const Doe test = iid_sample(space, plan.test_size, RngStream(suite_seed(cfg.seed, "test"), {0, 0, Purpose::test}));
  std::vector<Eigen::VectorXd> test_y;
  for (std::size_t l = 0; l < levels; ++l)
    test_y.push_back(evaluate_on(test, [&](std::span<const double> x) { return bench.evaluate(l, x); }));
  auto score = [&](const PcSurrogate& s, const Eigen::VectorXd& truth) { return q2(s.evaluate(test), truth); };

  for (std::size_t l = 0; l < levels; ++l) {
    const auto id = static_cast<std::uint32_t>(l);
    const Doe doe = lhs_sample(space, plan.mlcv_sizes[l], RngStream(suite_seed(cfg.seed, "mlcv"), {id, 0, Purpose::doe}),
                               plan.anneal);
    const auto y = evaluate_on(doe, [&](std::span<const double> x) { return bench.evaluate(l, x); });
    auto g = fit(doe, y, plan.fit, "mlcv/g" + std::to_string(l));
    auto rec = record("g" + std::to_string(l), "mlcv", l, *g, score(*g, test_y[l]));
    rec.doe_size = doe.size();
    b.records.push_back(rec);
    b.suite.mlcv.push_back(std::move(g));
    b.mlcv_design_cost.push_back(static_cast<double>(doe.size()) * bench.cost(l));
  }

  const auto nested_seed = suite_seed(cfg.seed, "nested");
  Doe doe = lhs_sample(space, plan.nested_sizes[0], RngStream(nested_seed, {0, 0, Purpose::doe}), plan.anneal);
  // Level values on the current design; the previous level's values are
  // carried down through parent_rows.
  Eigen::VectorXd coarse_y;
  b.suite.h.push_back(nullptr);
  for (std::size_t l = 0; l < levels; ++l) {
    if (l > 0) {
      const auto id = static_cast<std::uint32_t>(l);
      Doe sub = nested_subset(doe, plan.nested_sizes[l], plan.subset_pool, RngStream(nested_seed, {id, 0, Purpose::subset}));
      Eigen::VectorXd carried(static_cast<Eigen::Index>(sub.size()));
      for (std::size_t i = 0; i < sub.size(); ++i)
        carried[static_cast<Eigen::Index>(i)] = coarse_y[static_cast<Eigen::Index>(sub.parent_rows[i])];
      coarse_y = carried;
      doe = std::move(sub);
    }
    const auto y = evaluate_on(doe, [&](std::span<const double> x) { return bench.evaluate(l, x); });
    const auto ls = std::to_string(l);
    auto g = fit(doe, y, plan.fit, "nested/g" + ls);
    auto rec = record("g" + ls, "nested", l, *g, score(*g, test_y[l]));
    rec.doe_size = doe.size();
    b.records.push_back(rec);
    if (l > 0) {
      auto h = fit(doe, y - coarse_y, plan.fit, "nested/h" + ls);
      auto hr = record("h" + ls, "nested", l, *h, score(*h, test_y[l] - test_y[l - 1]));
      hr.doe_size = doe.size();
      b.records.push_back(hr);
      auto gt = std::make_shared<const PcSurrogate>(pc_combine(1.0, *g, -1.0, *h));
      auto tr = record("gt" + std::to_string(l - 1), "nested", l - 1, *gt, score(*gt, test_y[l - 1]));
      tr.doe_size = doe.size();
      b.records.push_back(tr);
      b.suite.h.push_back(std::move(h));
      b.suite.g_tilde.push_back(std::move(gt));
    }
    b.suite.g.push_back(std::move(g));
    b.nested_design_cost.push_back(static_cast<double>(doe.size()) * bench.cost(l));
    coarse_y = y;
  }
  attach_single_controls(b, cfg);
  return b;
}

json to_json(const SuiteBundle& b) {
  auto list = [](const std::vector<std::shared_ptr<const PcSurrogate>>& v) {
    json a = json::array();
    for (const auto& s : v) a.push_back(s ? to_json(*s) : json(nullptr));
    return a;
  };
  json records = json::array();
  for (const auto& r : b.records)
    records.push_back({{"name", r.name}, {"suite", r.suite}, {"level", r.level}, {"doe_size", r.doe_size},
                       {"degree", r.degree}, {"terms", r.terms},
                       {"loo", std::isfinite(r.loo) ? json(r.loo) : json(nullptr)}, {"q2", r.q2}});
  return {{"mlcv", list(b.suite.mlcv)},
          {"g", list(b.suite.g)},
          {"h", list(b.suite.h)},
          {"g_tilde", list(b.suite.g_tilde)},
          {"records", records},
          {"mlcv_design_cost", b.mlcv_design_cost},
          {"nested_design_cost", b.nested_design_cost}};
}

SuiteBundle suite_from_json(const json& j, const HarnessConfig& cfg) {
  SuiteBundle b;
  try {
    auto list = [&](const char* key) {
      std::vector<std::shared_ptr<const PcSurrogate>> v;
      for (const auto& s : j.at(key))
        v.push_back(s.is_null() ? nullptr : std::make_shared<const PcSurrogate>(pc_from_json(s)));
      return v;
    };
    b.suite.mlcv = list("mlcv");
    b.suite.g = list("g");
    b.suite.h = list("h");
    b.suite.g_tilde = list("g_tilde");
    for (const auto& r : j.at("records"))
      b.records.push_back({r.at("name"), r.at("suite"), r.at("level"), r.at("doe_size"), r.at("degree"), r.at("terms"),
                           r.at("loo").is_null() ? std::nan("") : r.at("loo").get<double>(), r.at("q2")});
    b.mlcv_design_cost = j.at("mlcv_design_cost").get<std::vector<double>>();
    b.nested_design_cost = j.at("nested_design_cost").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error("invalid_surrogate", std::string("surrogate suite file: ") + e.what());
  }
  if (b.suite.mlcv.size() != cfg.benchmark.levels() || b.suite.g.size() != cfg.benchmark.levels())
    throw Error("invalid_surrogate", "surrogate suite does not match the benchmark levels");
  attach_single_controls(b, cfg);
  return b;
}

double construction_cost(Method m, const SuiteBundle& b, const HarnessConfig& cfg) {
  const auto& mc = b.mlcv_design_cost;
  const auto& nc = b.nested_design_cost;
  auto sum = [](const std::vector<double>& v, std::size_t k) {
    return std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(k, v.size())), 0.0);
  };
  switch (m) {
  case Method::mc:
  case Method::mlmc: return 0.0;
  case Method::cv: {
    const bool pc = std::find(cfg.surrogates.cv_controls.begin(), cfg.surrogates.cv_controls.end(), "pc") !=
                    cfg.surrogates.cv_controls.end();
    return pc ? mc.back() : 0.0;
  }
  case Method::mlcv: return sum(mc, mc.size());
  case Method::mlmc_cv:
  case Method::mlmc_mlcv: return sum(nc, nc.size());
  case Method::mlmc_cv0: return sum(nc, 1);
  case Method::mlmc_mlcv0: return sum(nc, 2);
  }
  return 0.0;
}

std::string surrogate_report_csv(const SuiteBundle& b) {
  std::ostringstream os;
  os.precision(10);
  os << "suite,name,level,doe_size,degree,terms,loo,q2\n";
  for (const auto& r : b.records)
    os << r.suite << ',' << r.name << ',' << r.level << ',' << r.doe_size << ',' << r.degree << ',' << r.terms << ','
       << r.loo << ',' << r.q2 << '\n';
  return os.str();
}

} // namespace mlcv
