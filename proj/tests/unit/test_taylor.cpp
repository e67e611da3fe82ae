#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "mlcv/error.hpp"
#include "mlcv/taylor/taylor.hpp"

using namespace mlcv;

namespace {

struct Stats {
  double mean, var, se_mean, se_var;
};

template <class Draw>
Stats sample_stats(int n, Draw draw) {
  double s = 0;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) s += (v[i] = draw());
  const double m = s / n;
  double m2 = 0, m4 = 0;
  for (double x : v) {
    const double e = (x - m) * (x - m);
    m2 += e;
    m4 += e * e;
  }
  m2 /= n - 1;
  m4 /= n;
  return {m, m2, std::sqrt(m2 / n), std::sqrt((m4 - m2 * m2) / n)};
}

} // namespace

TEST_CASE("t_fit reproduces linear and quadratic functions") {
  const InputSpace space({{-1, 3}, {0, 2}, {-5, 5}});
  auto lin = [](std::span<const double> x) { return 2.0 + 0.5 * x[0] - 3.0 * x[1] + 0.25 * x[2]; };
  const auto t1 = t_fit(lin, space, 1);
  RngStream rng(1, {});
  std::array<double, 3> x{};
  for (int i = 0; i < 50; ++i) {
    sample_point(space, rng, x);
    CHECK(t1.evaluate(x) == doctest::Approx(lin(x)).epsilon(1e-9));
  }

  auto quad = [](std::span<const double> x) { return 1.0 + x[0] * x[1] - 2.0 * x[2] * x[2] + x[0]; };
  AnalyticDerivatives ad;
  ad.jacobian = [](std::span<const double> x) {
    return Eigen::Vector3d(x[1] + 1.0, x[0], -4.0 * x[2]).eval();
  };
  ad.hessian = [](std::span<const double>) {
    Eigen::Matrix3d h;
    h << 0, 1, 0, 1, 0, 0, 0, 0, -4;
    return Eigen::MatrixXd(h);
  };
  const auto t2 = t_fit(quad, space, 2, std::nullopt, &ad);
  for (int i = 0; i < 50; ++i) {
    sample_point(space, rng, x);
    CHECK(t2.evaluate(x) == doctest::Approx(quad(x)).epsilon(1e-12));
  }
  const std::array<double, 3> mu{1, 1, 0};
  CHECK(t2.evaluate(mu) == quad(mu));
}

TEST_CASE("finite-difference Jacobian accuracy") {
  const InputSpace space({{-1, 1}, {0, 3}, {2, 4}});
  auto f = [](std::span<const double> x) { return std::sin(x[0]) * std::exp(0.3 * x[1]) + x[2] * x[2] * x[0]; };
  const Eigen::Vector3d c(0.2, 1.1, 3.3);
  const auto s = t_fit(f, space, 2, Eigen::VectorXd(c));
  const Eigen::Vector3d exact(std::cos(0.2) * std::exp(0.33) + 3.3 * 3.3, 0.3 * std::sin(0.2) * std::exp(0.33),
                              2 * 3.3 * 0.2);
  CHECK((s.jacobian - exact).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(s.hessian(0, 2) == doctest::Approx(2 * 3.3).epsilon(1e-5));
  CHECK(s.hessian(0, 0) == doctest::Approx(-std::sin(0.2) * std::exp(0.33)).epsilon(1e-4));

  auto bad = [](std::span<const double> x) { return x[0] > 0 ? 1.0 / x[0] : std::nan(""); };
  CHECK_THROWS_AS(t_fit(bad, InputSpace({{-1, 1}}), 1), Error);
}

TEST_CASE("t_moments closed forms") {
  TaylorSurrogate s;
  s.order = 1;
  s.center = Eigen::VectorXd::Zero(1);
  s.value = 4.0;
  s.jacobian = Eigen::VectorXd::Zero(1);
  s.input_variances = Eigen::VectorXd::Constant(1, 3.0);
  CHECK(t_moments(s).mean == 4.0);
  CHECK(t_moments(s).variance == 0.0);
  s.jacobian[0] = 2.0;
  CHECK(t_moments(s).variance == 12.0);

  // Linear functions of uniform inputs: exact moments.
  const InputSpace space({{-1, 3}, {0, 2}});
  auto lin = [](std::span<const double> x) { return 1.0 + 2.0 * x[0] - x[1]; };
  const auto m = t_moments(t_fit(lin, space, 1));
  CHECK(m.mean == doctest::Approx(1.0 + 2.0 * 1.0 - 1.0));
  CHECK(m.variance == doctest::Approx(4.0 * 16.0 / 12.0 + 4.0 / 12.0).epsilon(1e-8));
}

TEST_CASE("second-order moments against sampling of the surrogate") {
  TaylorSurrogate s;
  s.order = 2;
  s.center = Eigen::Vector3d(0.5, -1.0, 2.0);
  s.value = 1.5;
  s.jacobian = Eigen::Vector3d(0.7, -0.2, 1.1);
  s.hessian.resize(3, 3);
  s.hessian << 0.8, 0.3, -0.5, 0.3, -0.4, 0.2, -0.5, 0.2, 1.2;
  s.input_variances = Eigen::Vector3d(0.5, 2.0, 1.0);
  const auto mo = t_moments(s);

  // Gaussian inputs: the formulas are exact.
  RngStream rng(3, {});
  std::normal_distribution<double> normal;
  std::array<double, 3> x{};
  const auto g = sample_stats(1000000, [&] {
    for (int i = 0; i < 3; ++i) x[i] = s.center[i] + std::sqrt(s.input_variances[i]) * normal(rng);
    return s.evaluate(x);
  });
  CHECK(std::abs(g.mean - mo.mean) < 3 * g.se_mean);
  CHECK(std::abs(g.var - mo.variance) < 3 * g.se_var);

  // Uniform inputs with a zero Hessian diagonal: also exact.
  s.hessian.diagonal().setZero();
  const auto mu = t_moments(s);
  const auto u = sample_stats(1000000, [&] {
    for (int i = 0; i < 3; ++i) x[i] = s.center[i] + std::sqrt(3 * s.input_variances[i]) * (2 * rng.uniform() - 1);
    return s.evaluate(x);
  });
  CHECK(std::abs(u.mean - mu.mean) < 3 * u.se_mean);
  CHECK(std::abs(u.var - mu.variance) < 3 * u.se_var);
}

TEST_CASE("heat_t1: centre, symmetry, slopes and moments") {
  HeatConfig cfg;
  HeatBenchmark bench(cfg);
  const Eigen::VectorXd mu = bench.space().means();
  for (std::size_t l = 0; l < 4; ++l) {
    const auto t = heat_t1(cfg, l);
    CHECK(t.evaluate({mu.data(), 7}) == bench.evaluate(l, {mu.data(), 7}));
  }

  // Slopes agree with one-sided finite differences of f_3.
  const auto t3 = heat_t1(cfg, 3);
  auto fd = [&](int i, double h) {
    Eigen::VectorXd xp = mu, xm = mu;
    xp[i] += h;
    xm[i] -= h;
    return (bench.evaluate(3, {xp.data(), 7}) - bench.evaluate(3, {xm.data(), 7})) / (2 * h);
  };
  CHECK(t3.right()[0] == doctest::Approx(fd(0, 1e-6)).epsilon(1e-6));
  CHECK(t3.right()[3] == doctest::Approx(fd(3, 1e-9)).epsilon(1e-5));
  CHECK(std::abs(fd(1, 1e-6)) < 1e-6);
  {
    Eigen::VectorXd xp = mu;
    xp[4] = 1e-7;
    const double right = (bench.evaluate(3, {xp.data(), 7}) - bench.evaluate(3, {mu.data(), 7})) / 1e-7;
    CHECK(t3.right()[4] == doctest::Approx(right).epsilon(1e-6));
  }

  RngStream rng(5, {});
  std::array<double, 7> x{};
  for (int i = 0; i < 100; ++i) {
    sample_point(bench.space(), rng, x);
    auto y = x;
    y[4] = -y[4];
    y[5] = -y[5];
    y[6] = -y[6];
    REQUIRE(t3.evaluate(x) == t3.evaluate(y));
  }

  const auto st = sample_stats(1000000, [&] {
    sample_point(bench.space(), rng, x);
    return t3.evaluate(x);
  });
  CHECK(std::abs(st.mean - t3.mean()) < 3 * st.se_mean);
  CHECK(std::abs(st.var - t3.variance()) < 3 * st.se_var);
  CHECK(t3.mean() == doctest::Approx(t3.center_value() + 1.5 * t3.right()[4]).epsilon(1e-12));
}

TEST_CASE("heat_t1 correlates with the fine level") {
  HeatConfig cfg;
  HeatBenchmark bench(cfg);
  const auto t3 = heat_t1(cfg, 3);
  RngStream rng(6, {});
  std::array<double, 7> x{};
  const int n = 1000;
  double sy = 0, st = 0, syy = 0, stt = 0, syt = 0;
  for (int i = 0; i < n; ++i) {
    sample_point(bench.space(), rng, x);
    const double y = bench.evaluate(3, x), t = t3.evaluate(x);
    sy += y;
    st += t;
    syy += y * y;
    stt += t * t;
    syt += y * t;
  }
  const double cov = syt / n - sy * st / n / n;
  const double rho = cov / std::sqrt((syy / n - sy * sy / n / n) * (stt / n - st * st / n / n));
  MESSAGE("corr(Y3, T1) = " << rho);
  CHECK(std::abs(rho - 0.57) <= 0.1);
}
