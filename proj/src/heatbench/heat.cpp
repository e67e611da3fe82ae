#include "mlcv/heatbench/heat.hpp"

#include <cmath>
#include <numbers>

#include "mlcv/error.hpp"

namespace mlcv {

using std::numbers::pi;

void HeatConfig::validate() const {
  if (K < 1) throw Error("invalid_config", "K must be at least 1");
  if (!(T > 0.0)) throw Error("invalid_config", "T must be positive");
  if (!(nu_min > 0.0)) throw Error("invalid_config", "nu_min must be positive");
  if (!(nu_min < nu_max)) throw Error("invalid_config", "nu_min must be below nu_max");
  if (level_nodes.empty()) throw Error("invalid_config", "at least one level is required");
  if (level_nodes.size() != level_costs.size())
    throw Error("invalid_config", "levels.nodes and levels.costs differ in length");
  for (std::size_t l = 0; l < level_nodes.size(); ++l) {
    if (level_nodes[l] < 2) throw Error("invalid_config", "a level needs at least 2 nodes");
    if (l > 0 && level_nodes[l] <= level_nodes[l - 1])
      throw Error("invalid_config", "levels.nodes must be strictly increasing");
    if (!(level_costs[l] > 0.0)) throw Error("invalid_config", "level costs must be positive");
  }
}

HeatConfig heat_config_from_json(const nlohmann::json& j) {
  HeatConfig cfg;
  cfg.K = j.value("K", cfg.K);
  cfg.T = j.value("T", cfg.T);
  cfg.nu_min = j.value("nu_min", cfg.nu_min);
  cfg.nu_max = j.value("nu_max", cfg.nu_max);
  if (j.contains("levels")) {
    const auto& lv = j.at("levels");
    if (lv.contains("nodes")) cfg.level_nodes = lv.at("nodes").get<std::vector<int>>();
    if (lv.contains("costs")) cfg.level_costs = lv.at("costs").get<std::vector<double>>();
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const HeatConfig& cfg) {
  return {{"K", cfg.K},
          {"T", cfg.T},
          {"nu_min", cfg.nu_min},
          {"nu_max", cfg.nu_max},
          {"levels", {{"nodes", cfg.level_nodes}, {"costs", cfg.level_costs}}}};
}

InputSpace heat_input_space(const HeatConfig& cfg) {
  return InputSpace({{-pi, pi}, {-pi, pi}, {-pi, pi}, {cfg.nu_min, cfg.nu_max}, {-1.0, 1.0},
                     {-1.0, 1.0}, {-1.0, 1.0}});
}

double heat_amplitude_g(std::span<const double> x) {
  return 50.0 * (4.0 * std::abs(x[4]) - 1.0) * (4.0 * std::abs(x[5]) - 1.0) *
         (4.0 * std::abs(x[6]) - 1.0);
}

double heat_amplitude_i(std::span<const double> x) {
  const double s1 = std::sin(x[0]);
  const double s2 = std::sin(x[1]);
  const double x3 = x[2] * x[2];
  return 3.5 * (s1 + 7.0 * s2 * s2 + 0.1 * x3 * x3 * s1);
}

double heat_shape_f1(double s) { return std::sin(pi * s); }

double heat_shape_f2(double s) {
  return std::sin(2 * pi * s) + std::sin(3 * pi * s) +
         50.0 * (std::sin(9 * pi * s) + std::sin(21 * pi * s));
}

HeatLevelTable heat_level_table(const HeatConfig& cfg, std::size_t level) {
  if (level >= cfg.levels()) throw Error("level_out_of_range", "level index out of range");
  const int n = cfg.level_nodes[level];
  const double dx = 1.0 / (n - 1);
  HeatLevelTable t{n, std::vector<double>(cfg.K, 0.0), std::vector<double>(cfg.K, 0.0),
                   std::vector<double>(cfg.K, 0.0)};
  for (int k = 1; k <= cfg.K; ++k) {
    double p = 0.0, q = 0.0, s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi = i * dx;
      const double w = (i == 0 || i == n - 1) ? 0.5 * dx : dx;
      const double sk = std::sin(k * pi * xi);
      p += w * heat_shape_f1(xi) * sk;
      q += w * heat_shape_f2(xi) * sk;
      s += w * sk;
    }
    t.p[k - 1] = 2.0 * p;
    t.q[k - 1] = 2.0 * q;
    t.s[k - 1] = s;
  }
  return t;
}

HeatBenchmark::HeatBenchmark(HeatConfig cfg) : cfg_(std::move(cfg)), space_(heat_input_space(cfg_)) {
  cfg_.validate();
  for (std::size_t l = 0; l < cfg_.levels(); ++l) tables_.push_back(heat_level_table(cfg_, l));
}

const HeatLevelTable& HeatBenchmark::table(std::size_t level) const {
  if (level >= tables_.size()) throw Error("level_out_of_range", "level index out of range");
  return tables_[level];
}

double HeatBenchmark::cost(std::size_t level) const {
  if (level >= cfg_.levels()) throw Error("level_out_of_range", "level index out of range");
  return cfg_.level_costs[level];
}

namespace {

double evaluate_with(const HeatLevelTable& t, double T, std::span<const double> x) {
  const double g = heat_amplitude_g(x);
  const double amp_i = heat_amplitude_i(x);
  // exp(-nu k² pi² T) by the recurrence r^{k²} = r^{(k-1)²} · r^{2k-1}.
  const double r = std::exp(-x[3] * pi * pi * T);
  const double r2 = r * r;
  double step = r;
  double decay = r;
  double y = 0.0;
  const std::size_t K = t.p.size();
  for (std::size_t k = 0; k < K; ++k) {
    y += (g * t.p[k] + amp_i * t.q[k]) * decay * t.s[k];
    step *= r2;
    decay *= step;
  }
  return y;
}

} // namespace

double HeatBenchmark::evaluate(std::size_t level, std::span<const double> x) const {
  return evaluate_with(table(level), cfg_.T, x);
}

double evaluate_level(const HeatConfig& cfg, std::size_t level, std::span<const double> x) {
  return evaluate_with(heat_level_table(cfg, level), cfg.T, x);
}

double expected_decay(const HeatConfig& cfg, double c) {
  if (!(cfg.nu_max > cfg.nu_min))
    throw Error("invalid_config", "degenerate diffusivity interval");
  if (c == 0.0) return 1.0;
  return (std::exp(-cfg.nu_min * c) - std::exp(-cfg.nu_max * c)) / (c * (cfg.nu_max - cfg.nu_min));
}

double exact_expectation(const HeatConfig& cfg) {
  // Mode k of the exact solution integrates to (2/(kπ)) e^{-ν k²π² T} for odd k.
  auto h = [&](int k) { return 2.0 / (k * pi) * expected_decay(cfg, k * k * pi * pi * cfg.T); };
  // E[G] = 50, E[I] = 49/4.
  return 50.0 * h(1) + 49.0 / 4.0 * (h(3) + 50.0 * h(9) + 50.0 * h(21));
}

double level_expectation(const HeatConfig& cfg, std::size_t level) {
  const HeatLevelTable t = heat_level_table(cfg, level);
  double e = 0.0;
  for (int k = 1; k <= cfg.K; ++k)
    e += (50.0 * t.p[k - 1] + 12.25 * t.q[k - 1]) * expected_decay(cfg, k * k * pi * pi * cfg.T) *
         t.s[k - 1];
  return e;
}

double correction_cost(const HeatConfig& cfg, std::size_t level) {
  if (level >= cfg.levels()) throw Error("level_out_of_range", "level index out of range");
  return cfg.level_costs[level] + (level > 0 ? cfg.level_costs[level - 1] : 0.0);
}

} // namespace mlcv
