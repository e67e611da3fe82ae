#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "mlcv/heatbench/hierarchy.hpp"

namespace mlcv {

// Uncertain 1D heat equation on [0,1] with homogeneous Dirichlet ends.
// Inputs: X1..X3 ~ U[-pi,pi] (shape), X4 = nu (diffusivity), X5..X7 ~ U[-1,1]
// (amplitude). Output: spatial mean of the solution at time T.
struct HeatConfig {
  int K = 21;
  double T = 0.5;
  double nu_min = 0.001;
  double nu_max = 0.009;
  std::vector<int> level_nodes{15, 30, 60, 120};
  std::vector<double> level_costs{0.125, 0.25, 0.5, 1.0};

  void validate() const;
  std::size_t levels() const { return level_nodes.size(); }
};

HeatConfig heat_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HeatConfig& cfg);

InputSpace heat_input_space(const HeatConfig& cfg);

// Initial-condition ingredients.
double heat_amplitude_g(std::span<const double> x);   // 50 (4|x5|-1)(4|x6|-1)(4|x7|-1)
double heat_amplitude_i(std::span<const double> x);   // 3.5 [sin x1 + 7 sin² x2 + 0.1 x3⁴ sin x1]
double heat_shape_f1(double s);
double heat_shape_f2(double s);

// Trapezoid node sums of one level, per mode k = 1..K:
//   p_k = 2 Σ w F1 sin(kπx), q_k = 2 Σ w F2 sin(kπx), s_k = Σ w sin(kπx).
struct HeatLevelTable {
  int nodes = 0;
  std::vector<double> p, q, s;
};

HeatLevelTable heat_level_table(const HeatConfig& cfg, std::size_t level);

class HeatBenchmark final : public Hierarchy {
public:
  explicit HeatBenchmark(HeatConfig cfg = {});

  std::size_t levels() const override { return cfg_.levels(); }
  const InputSpace& space() const override { return space_; }
  double evaluate(std::size_t level, std::span<const double> x) const override;
  double cost(std::size_t level) const override;

  const HeatConfig& config() const { return cfg_; }
  const HeatLevelTable& table(std::size_t level) const;

private:
  HeatConfig cfg_;
  InputSpace space_;
  std::vector<HeatLevelTable> tables_;
};

// One-off evaluation; builds the level table on each call.
double evaluate_level(const HeatConfig& cfg, std::size_t level, std::span<const double> x);

// E[exp(-nu c)] for nu ~ U[nu_min, nu_max].
double expected_decay(const HeatConfig& cfg, double c);

// Expectation of the exact (continuous) output.
double exact_expectation(const HeatConfig& cfg);
// Expectation of the level-l discretised output f_l.
double level_expectation(const HeatConfig& cfg, std::size_t level);

double correction_cost(const HeatConfig& cfg, std::size_t level);

} // namespace mlcv
