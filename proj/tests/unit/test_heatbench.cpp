#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "mlcv/error.hpp"
#include "mlcv/heatbench/heat.hpp"

using namespace mlcv;

namespace {

// Direct quadrature of the level output, written from the spectral solution
// without the precomputed node sums.
double reference_level(const HeatConfig& cfg, std::size_t level, std::span<const double> x) {
  const double pi = std::numbers::pi;
  const int n = cfg.level_nodes[level];
  const double dx = 1.0 / (n - 1);
  auto u0 = [&](double s) {
    return heat_amplitude_g(x) * heat_shape_f1(s) + heat_amplitude_i(x) * heat_shape_f2(s);
  };
  double y = 0.0;
  for (int k = 1; k <= cfg.K; ++k) {
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? dx / 2 : dx;
      a += w * u0(i * dx) * std::sin(k * pi * i * dx);
      b += w * std::sin(k * pi * i * dx);
    }
    y += 2 * a * std::exp(-x[3] * k * k * pi * pi * cfg.T) * b;
  }
  return y;
}

} // namespace

TEST_CASE("exact expectation and mode integral") {
  HeatConfig cfg;
  CHECK(std::abs(exact_expectation(cfg) - 41.98) < 0.01);
  const double pi = std::numbers::pi;
  const double h1 = 2.0 / (pi * pi * pi * cfg.T) *
                    (std::exp(-cfg.nu_min * pi * pi * cfg.T) - std::exp(-cfg.nu_max * pi * pi * cfg.T)) /
                    (cfg.nu_max - cfg.nu_min);
  CHECK(h1 == doctest::Approx(0.6212).epsilon(1e-4));
  CHECK(2.0 / pi * expected_decay(cfg, pi * pi * cfg.T) == doctest::Approx(h1).epsilon(1e-14));
  cfg.nu_max = cfg.nu_min;
  CHECK_THROWS_AS(exact_expectation(cfg), Error);
}

TEST_CASE("correction costs") {
  HeatConfig cfg;
  CHECK(correction_cost(cfg, 0) == 0.125);
  CHECK(correction_cost(cfg, 1) == 0.375);
  CHECK(correction_cost(cfg, 3) == 1.5);
  HeatBenchmark bench(cfg);
  CHECK(bench.correction_cost(2) == 0.75);
  HeatConfig one;
  one.level_nodes = {40};
  one.level_costs = {1.0};
  CHECK(correction_cost(one, 0) == 1.0);
}

TEST_CASE("evaluate_level agrees with direct quadrature") {
  HeatConfig cfg;
  HeatBenchmark bench(cfg);
  RngStream rng(1, {});
  std::array<double, 7> x{};
  for (int t = 0; t < 20; ++t) {
    sample_point(bench.space(), rng, x);
    for (std::size_t l = 0; l < 4; ++l) {
      const double ref = reference_level(cfg, l, x);
      CHECK(bench.evaluate(l, x) == doctest::Approx(ref).epsilon(1e-11).scale(1.0));
      CHECK(evaluate_level(cfg, l, x) == bench.evaluate(l, x));
    }
  }
  CHECK_THROWS_AS(bench.evaluate(4, x), Error);
}

TEST_CASE("zero input yields exactly zero and X5 sign symmetry") {
  HeatBenchmark bench;
  const std::array<double, 7> zero{0, 0, 0, 0.005, 0.25, 0.25, 0.25};
  for (std::size_t l = 0; l < 4; ++l) CHECK(bench.evaluate(l, zero) == 0.0);

  RngStream rng(2, {});
  std::array<double, 7> x{};
  for (int t = 0; t < 100; ++t) {
    sample_point(bench.space(), rng, x);
    auto y = x;
    y[4] = -y[4];
    for (std::size_t l = 0; l < 4; ++l) REQUIRE(bench.evaluate(l, x) == bench.evaluate(l, y));
  }
}

TEST_CASE("refinement: corrections shrink with level") {
  HeatBenchmark bench;
  RngStream rng(3, {});
  std::array<double, 7> x{};
  int shrink = 0;
  std::array<double, 3> mean_abs{};
  for (int t = 0; t < 1000; ++t) {
    sample_point(bench.space(), rng, x);
    std::array<double, 4> y{};
    for (std::size_t l = 0; l < 4; ++l) y[l] = bench.evaluate(l, x);
    if (t < 100) shrink += std::abs(y[3] - y[2]) < std::abs(y[1] - y[0]);
    for (int l = 0; l < 3; ++l) mean_abs[l] += std::abs(y[l + 1] - y[l]) / 1000;
  }
  CHECK(shrink >= 95);
  CHECK(mean_abs[1] < mean_abs[0]);
  CHECK(mean_abs[2] < mean_abs[1]);
}

TEST_CASE("level expectations match large-sample means") {
  HeatConfig cfg;
  HeatBenchmark bench(cfg);
  RngStream rng(4, {});
  std::array<double, 7> x{};
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int t = 0; t < n; ++t) {
    sample_point(bench.space(), rng, x);
    const double y = bench.evaluate(3, x);
    s += y;
    s2 += y * y;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / (n - 1));
  CHECK(std::abs(mean - exact_expectation(cfg)) < 3 * se);
  CHECK(std::abs(mean - level_expectation(cfg, 3)) < 3 * se);
  CHECK(level_expectation(cfg, 3) == doctest::Approx(41.937).epsilon(1e-4));
}

TEST_CASE("config JSON round trip and validation") {
  HeatConfig cfg;
  cfg.level_nodes = {10, 20};
  cfg.level_costs = {0.5, 1.0};
  const auto back = heat_config_from_json(to_json(cfg));
  CHECK(back.level_nodes == cfg.level_nodes);
  CHECK(back.level_costs == cfg.level_costs);
  CHECK(back.K == 21);
  CHECK_THROWS_AS(heat_config_from_json({{"levels", {{"nodes", {20, 10}}, {"costs", {1, 1}}}}}), Error);
  CHECK_THROWS_AS(heat_config_from_json({{"nu_min", 0.01}, {"nu_max", 0.001}}), Error);
}
