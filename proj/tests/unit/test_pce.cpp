#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "mlcv/error.hpp"
#include "mlcv/heatbench/heat.hpp"
#include "mlcv/pce/fit.hpp"
#include "mlcv/pce/galerkin.hpp"

using namespace mlcv;

namespace {

InputSpace cube(std::size_t d, double lo = -1.0, double hi = 1.0) {
  return InputSpace(std::vector<Interval>(d, {lo, hi}));
}

// Composite Simpson rule on [-1,1] w.r.t. dt/2, independent of the Gauss rule.
template <class F>
double simpson(F f, int panels = 20000) {
  const double h = 2.0 / panels;
  double s = f(-1.0) + f(1.0);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(-1.0 + i * h);
  return s * h / 3.0 / 2.0;
}

// Random sparse surrogate on `space` with terms drawn from total degree <= p.
PcSurrogate random_surrogate(const InputSpace& space, int p, int terms, RngStream& rng) {
  const auto all = total_degree_set(space.dims(), p);
  std::set<std::size_t> pick{0};
  while (static_cast<int>(pick.size()) < terms + 1) pick.insert(rng.below(all.size()));
  std::vector<MultiIndex> idx;
  Eigen::VectorXd c(pick.size());
  Eigen::Index k = 0;
  for (auto i : pick) {
    idx.push_back(all[i]);
    c[k++] = rng.uniform(-1.0, 1.0);
  }
  return PcSurrogate(space, idx, c);
}

struct Moments {
  double mean, var, se_mean, se_var;
};

Moments mc_moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0;
  for (double x : v) m += x;
  m /= n;
  double m2 = 0, m4 = 0;
  for (double x : v) {
    const double e = (x - m) * (x - m);
    m2 += e;
    m4 += e * e;
  }
  m2 /= n - 1;
  m4 /= n;
  return {m, m2, std::sqrt(m2 / n), std::sqrt(std::max(0.0, m4 - m2 * m2) / n)};
}

} // namespace

TEST_CASE("basis values and orthonormality") {
  const auto s1 = cube(1);
  CHECK(basis_eval(s1, {0}, std::array{0.3}) == 1.0);
  CHECK(basis_eval(s1, {1}, std::array{1.0}) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(basis_eval(cube(3), {0, 0, 0}, std::array{0.1, -0.7, 0.9}) == 1.0);

  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j) {
      const double g = simpson([&](double t) { return legendre(i, t) * legendre(j, t); });
      CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-10);
    }

  const GaussRule rule = gauss_legendre(9);
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j) {
      double g = 0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        g += 0.5 * rule.weights[k] * legendre(i, rule.nodes[k]) * legendre(j, rule.nodes[k]);
      REQUIRE(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-10);
    }

  // Rescaling: ψ_1 on [0, 4] at the upper end.
  CHECK(basis_eval(InputSpace({{0.0, 4.0}}), {1}, std::array{4.0}) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("total degree sets") {
  const auto s = total_degree_set(2, 1);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == MultiIndex{0, 0});
  CHECK(s[1] == MultiIndex{1, 0});
  CHECK(s[2] == MultiIndex{0, 1});
  CHECK(total_degree_set(7, 2).size() == 36);
  CHECK(total_degree_set(7, 10).size() == 19448);
  CHECK(total_degree_set(4, 0).size() == 1);
  const auto t = total_degree_set(3, 4);
  for (std::size_t k = 1; k < t.size(); ++k) CHECK(total_degree(t[k - 1]) <= total_degree(t[k]));
}

TEST_CASE("ols_fit: recovery, constants and rank deficiency") {
  const auto space = cube(3);
  RngStream rng(1, {});
  const auto truth = random_surrogate(space, 3, 8, rng);
  const auto doe = iid_sample(space, 200, RngStream(2, {}));
  const auto fit = ols_fit(doe, truth.evaluate(doe), truth.indices());
  for (std::size_t k = 0; k < truth.size(); ++k)
    CHECK(std::abs(fit.coeffs()[k] - truth.coeffs()[k]) < 1e-8);

  const auto cfit = ols_fit(doe, Eigen::VectorXd::Constant(200, 2.5), total_degree_set(3, 2));
  CHECK(cfit.coeffs()[0] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(cfit.coeffs().tail(cfit.size() - 1).cwiseAbs().maxCoeff() < 1e-10);

  // Every point repeated: only 3 distinct rows for 10 terms.
  Doe dup{space, PointMatrix(30, 3), 0, DoeKind::iid, {}};
  for (int i = 0; i < 30; ++i) dup.points.row(i) = doe.points.row(i % 3);
  try {
    ols_fit(dup, Eigen::VectorXd::Zero(30), total_degree_set(3, 2));
    FAIL("expected singular design");
  } catch (const Error& e) {
    CHECK(e.code() == "singular_design");
    CHECK(std::string(e.what()).find("condition number") != std::string::npos);
  }
  CHECK_THROWS_AS(ols_fit(iid_sample(space, 5, RngStream(3, {})), Eigen::VectorXd::Zero(5),
                          total_degree_set(3, 2)),
                  Error);
}

TEST_CASE("corrected LOO agrees with explicit leave-one-out refits") {
  const auto space = cube(2);
  const auto doe = iid_sample(space, 40, RngStream(4, {}));
  const auto idx = total_degree_set(2, 3);
  const Eigen::MatrixXd psi = design_matrix(space, idx, doe);
  RngStream rng(5, {});
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) y[i] = std::sin(3 * doe.points(i, 0)) + doe.points(i, 1) + 0.1 * rng.uniform();

  double loo = 0;
  for (int i = 0; i < 40; ++i) {
    Eigen::MatrixXd a(39, psi.cols());
    Eigen::VectorXd b(39);
    for (int r = 0, k = 0; r < 40; ++r)
      if (r != i) {
        a.row(k) = psi.row(r);
        b[k++] = y[r];
      }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    loo += std::pow(y[i] - psi.row(i).dot(c), 2) / 40;
  }
  const double var = (y.array() - y.mean()).square().sum() / 39;
  const double factor = 40.0 / (40 - psi.cols()) * (1 + (psi.transpose() * psi).inverse().trace());
  CHECK(corrected_loo(psi, y) == doctest::Approx(loo / var * factor).epsilon(1e-9));
}

TEST_CASE("lars_select") {
  const auto space = cube(3);
  const auto doe = iid_sample(space, 50, RngStream(6, {}));
  const auto cands = total_degree_set(3, 2);
  // Single candidate proportional to the response.
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i) y[i] = 4.0 * basis_eval(space, cands[5], doe.row(i));
  const auto order = lars_select(doe, y, cands);
  REQUIRE(!order.empty());
  CHECK(order[0] == 5);
  const auto one = ols_fit(doe, y, {cands[5]});
  CHECK((one.evaluate(doe) - y).norm() < 1e-10);

  CHECK(lars_select(doe, Eigen::VectorXd::Zero(50), cands).empty());

  // Two-level full factorial: all non-constant multilinear columns are
  // centred and mutually orthogonal, so LARS enters them by |correlation|.
  Doe fact{space, PointMatrix(8, 3), 0, DoeKind::iid, {}};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 3; ++j) fact.points(i, j) = ((i >> j) & 1) ? 1.0 : -1.0;
  const std::vector<MultiIndex> ml{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
  const std::array<double, 7> w{0.3, -2.0, 0.9, 1.4, -0.1, 0.6, -1.1};
  Eigen::VectorXd yf = Eigen::VectorXd::Constant(8, 5.0);
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 7; ++k) yf[i] += w[k] * basis_eval(space, ml[k], fact.row(i));
  std::vector<std::pair<double, std::size_t>> corr;
  for (std::size_t k = 0; k < 7; ++k) {
    double num = 0, den = 0;
    for (int i = 0; i < 8; ++i) {
      const double v = basis_eval(space, ml[k], fact.row(i));
      num += v * (yf[i] - yf.mean());
      den += v * v;
    }
    corr.emplace_back(-std::abs(num) / std::sqrt(den), k);
  }
  std::sort(corr.begin(), corr.end());
  std::vector<std::size_t> expected;
  for (const auto& c : corr) expected.push_back(c.second);
  CHECK(lars_select(fact, yf, ml) == expected);
}

TEST_CASE("adaptive_fit recovers an exactly representable model") {
  const auto space = cube(3);
  RngStream rng(7, {});
  const auto truth = random_surrogate(space, 2, 5, rng);
  const auto doe = lhs_sample(space, 200, RngStream(8, {}), {1000, 0.01, 0.999});
  const auto y = truth.evaluate(doe);
  AdaptiveFitOptions opt;
  opt.p_max = 4;
  const auto fit = adaptive_fit(doe, y, opt);
  CHECK(fit.provenance().loo <= 1e-10);
  std::set<MultiIndex> got, want;
  for (std::size_t k = 1; k < fit.size(); ++k)
    if (std::abs(fit.coeffs()[k]) > 1e-8) got.insert(fit.indices()[k]);
  for (std::size_t k = 1; k < truth.size(); ++k) want.insert(truth.indices()[k]);
  CHECK(got == want);
  CHECK(fit.mean() == doctest::Approx(truth.mean()).epsilon(1e-10));

  const auto again = adaptive_fit(doe, y, opt);
  CHECK(again.coeffs() == fit.coeffs());
}

TEST_CASE("adaptive_fit on the coarse benchmark level") {
  HeatBenchmark bench;
  const auto doe = lhs_sample(bench.space(), 800, RngStream(1, {0, 0, Purpose::doe}));
  Eigen::VectorXd y(800);
  for (std::size_t i = 0; i < 800; ++i) y[static_cast<Eigen::Index>(i)] = bench.evaluate(0, doe.row(i));
  const auto fit = adaptive_fit(doe, y, {});
  const auto test = iid_sample(bench.space(), 10000, RngStream(1, {0, 0, Purpose::test}));
  const double q = q2(fit, [&](std::span<const double> x) { return bench.evaluate(0, x); }, test);
  MESSAGE("g0: p* = " << fit.provenance().degree << ", terms = " << fit.size() << ", Q2 = " << q);
  CHECK(q >= 0.9);
}

TEST_CASE("q2") {
  Eigen::VectorXd f(4);
  f << 1, 2, 3, 6;
  CHECK(q2(f, f) == 1.0);
  CHECK(q2(Eigen::VectorXd::Constant(4, f.mean()), f) == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(q2(f, Eigen::VectorXd::Constant(4, 2.0)), Error);
}

TEST_CASE("moments and covariances against sampling") {
  CHECK(pc_moments(PcSurrogate(cube(1), {{0}}, Eigen::VectorXd::Constant(1, 3.0))).variance == 0.0);
  Eigen::VectorXd c(3);
  c << 1, 2, 3;
  const auto s = PcSurrogate(cube(2), {{0, 0}, {1, 0}, {0, 1}}, c);
  CHECK(pc_moments(s).mean == 1.0);
  CHECK(pc_moments(s).variance == 13.0);
  CHECK(pc_covariance(s, s) == 13.0);
  const auto t = PcSurrogate(cube(2), {{0, 0}, {2, 0}}, Eigen::Vector2d(0.5, 1.0));
  CHECK(pc_covariance(s, t) == 0.0);
  CHECK_THROWS_AS(pc_covariance(s, PcSurrogate(cube(3), {{0, 0, 0}}, Eigen::VectorXd::Ones(1))), Error);

  const auto space = InputSpace({{-1, 1}, {0, 2}, {-3, 3}});
  RngStream rng(9, {});
  const int n = 1000000;
  for (int rep = 0; rep < 3; ++rep) {
    const auto a = random_surrogate(space, 3, 6, rng);
    const auto b = random_surrogate(space, 3, 6, rng);
    std::vector<double> va(n), vb(n), prod(n);
    RngStream xs(10 + rep, {});
    std::array<double, 3> x{};
    for (int i = 0; i < n; ++i) {
      sample_point(space, xs, x);
      va[i] = a.evaluate(x);
      vb[i] = b.evaluate(x);
    }
    const auto ma = mc_moments(va);
    CHECK(std::abs(ma.mean - a.mean()) < 3 * ma.se_mean);
    CHECK(std::abs(ma.var - a.variance()) < 3 * ma.se_var);
    const auto mb = mc_moments(vb);
    for (int i = 0; i < n; ++i) prod[i] = (va[i] - a.mean()) * (vb[i] - b.mean());
    const auto mp = mc_moments(prod);
    CHECK(std::abs(mp.mean - pc_covariance(a, b)) < 3 * mp.se_mean);
    (void)mb;
  }
}

TEST_CASE("galerkin tensor") {
  const auto s1 = cube(1);
  const GalerkinTensor phi1({{0}, {1}}, 3);
  CHECK(phi1(0, 0, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(phi1(1, 1, 1, 1) == doctest::Approx(9.0 / 5.0).epsilon(1e-13));
  CHECK_THROWS_AS(GalerkinTensor({{0}, {3}}, 6), Error);

  const auto idx = total_degree_set(3, 3);
  const GalerkinTensor phi(idx, 7);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j)
      REQUIRE(std::abs(phi(i, j, 0, 0) - (i == j ? 1.0 : 0.0)) < 1e-12);

  RngStream rng(11, {});
  double shared = 0, independent = 0;
  for (int t = 0; t < 200; ++t) {
    std::array<std::size_t, 4> k{};
    for (auto& v : k) v = rng.below(idx.size());
    const double base = phi(k[0], k[1], k[2], k[3]);
    std::array<std::size_t, 4> p = k;
    std::sort(p.begin(), p.end());
    do {
      shared = std::max(shared, std::abs(phi(p[0], p[1], p[2], p[3]) - base));
      independent = std::max(independent, std::abs(phi.compute(p[0], p[1], p[2], p[3]) - base));
    } while (std::next_permutation(p.begin(), p.end()));
  }
  CHECK(shared == 0.0);
  CHECK(independent < 1e-12);
  CHECK_THROWS_AS(phi.position({9, 0, 0}), Error);
}

TEST_CASE("covariance of centred squares") {
  const auto s1 = cube(1);
  const PcSurrogate lin(s1, {{0}, {1}}, Eigen::Vector2d(0.7, 1.0));  // 0.7 + √3 x
  const auto phi = galerkin_tensor_for({&lin});
  CHECK(centered_square_covariance(lin, lin, phi) == doctest::Approx(4.0 / 5.0).epsilon(1e-13));
  CHECK(projected_product_covariance(lin, lin, lin, lin) == doctest::Approx(4.0 / 5.0).epsilon(1e-13));

  const auto s2 = cube(2);
  const PcSurrogate a(s2, {{0, 0}, {1, 0}, {3, 0}}, Eigen::Vector3d(1, 0.4, -0.8));
  const PcSurrogate b(s2, {{0, 0}, {0, 2}, {0, 1}}, Eigen::Vector3d(-2, 1.1, 0.3));
  const auto phi2 = galerkin_tensor_for({&a, &b});
  CHECK(std::abs(centered_square_covariance(a, b, phi2)) < 1e-13);

  const auto space = InputSpace({{-1, 1}, {0, 2}, {-3, 3}});
  RngStream rng(12, {});
  const int n = 1000000;
  for (int rep = 0; rep < 2; ++rep) {
    const auto g = random_surrogate(space, 2, 5, rng);
    const auto h = random_surrogate(space, 2, 4, rng);
    const auto gt = pc_combine(1.0, g, -1.0, h);
    const auto phi3 = galerkin_tensor_for({&g, &h, &gt});
    const double quad = centered_square_covariance(g, h, phi3);
    CHECK(projected_product_covariance(g, g, h, h) == doctest::Approx(quad).epsilon(1e-11).scale(1.0));

    const DifferenceControl dc{&h, &g, &gt};
    const auto mixed = mixed_square_covariance(dc, dc, phi3);
    // Cross-check the mixed decomposition against the product-expansion route.
    const PcSurrogate sum = pc_combine(1.0, g, 1.0, gt);
    CHECK(mixed.total() == doctest::Approx(projected_product_covariance(h, sum, h, sum)).epsilon(1e-10));

    std::vector<double> prod(n);
    RngStream xs(20 + rep, {});
    std::array<double, 3> x{};
    for (int i = 0; i < n; ++i) {
      sample_point(space, xs, x);
      const double zg = g.evaluate(x) - g.mean(), zh = h.evaluate(x) - h.mean();
      prod[i] = (zg * zg - g.variance()) * (zh * zh - h.variance());
    }
    const auto m = mc_moments(prod);
    CHECK(std::abs(m.mean - quad) < 3 * m.se_mean);
  }
}

TEST_CASE("combination and serialization") {
  const auto space = InputSpace({{-1, 1}, {0, 2}});
  const PcSurrogate a(space, {{0, 0}, {1, 0}}, Eigen::Vector2d(1.0, 2.0));
  const PcSurrogate b(space, {{0, 0}, {0, 1}, {1, 0}}, Eigen::Vector3d(0.5, 3.0, 1.0));
  const auto d = pc_combine(1.0, a, -1.0, b);
  REQUIRE(d.size() == 3);
  CHECK(d.coeffs()[0] == 0.5);
  CHECK(d.coeffs()[1] == 1.0);
  CHECK(d.coeffs()[2] == -3.0);

  RngStream rng(13, {});
  auto s = random_surrogate(InputSpace({{-3.14159, 3.14159}, {0.001, 0.009}, {-1, 1}}), 4, 12, rng);
  const PcSurrogate withp(s.space(), s.indices(), s.coeffs() / 3.0, {"doe-7", 4, 0.0123, 35});
  const auto back = pc_from_json(nlohmann::json::parse(to_json(withp).dump()));
  CHECK(back.coeffs() == withp.coeffs());
  CHECK(back.indices() == withp.indices());
  CHECK(back.provenance().degree == 4);
  CHECK(back.provenance().doe_id == "doe-7");

  // The constant term is moved to the front.
  const PcSurrogate moved(space, {{1, 0}, {0, 0}}, Eigen::Vector2d(2.0, 7.0));
  CHECK(moved.mean() == 7.0);
  CHECK_THROWS_AS(PcSurrogate(space, {{1, 0}, {1, 0}}, Eigen::Vector2d(1, 1)), Error);
}
