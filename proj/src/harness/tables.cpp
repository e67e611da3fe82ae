#include "mlcv/harness/tables.hpp"

#include <sstream>

#include "mlcv/error.hpp"
#include "mlcv/estimators/allocation.hpp"
#include "mlcv/taylor/taylor.hpp"

namespace mlcv {

CorrelationTable correlation_table(const std::vector<Entity>& entities, const InputSpace& space, std::size_t n,
                                   RngStream stream) {
  if (n < 3) throw Error("invalid_argument", "correlation_table: need at least three points");
  const auto m = static_cast<Eigen::Index>(entities.size());
  Eigen::MatrixXd v(static_cast<Eigen::Index>(n), m);
  std::vector<double> x(space.dims());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    sample_point(space, stream, x);
    for (Eigen::Index k = 0; k < m; ++k) v(i, k) = entities[static_cast<std::size_t>(k)].f(x);
  }
  const Eigen::MatrixXd c = v.rowwise() - v.colwise().mean();
  const Eigen::MatrixXd cov = c.transpose() * c;
  CorrelationTable t;
  for (const auto& e : entities) t.names.push_back(e.name);
  t.r.resize(m, m);
  for (Eigen::Index k = 0; k < m; ++k)
    if (!(cov(k, k) > 0.0))
      throw Error("zero_variance", "correlation_table: '" + t.names[static_cast<std::size_t>(k)] + "' is constant");
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b)
      t.r(a, b) = a == b ? 1.0 : cov(a, b) / std::sqrt(cov(a, a) * cov(b, b));
  return t;
}

std::string to_csv(const CorrelationTable& t) {
  std::ostringstream os;
  os.precision(6);
  os << "entity";
  for (const auto& n : t.names) os << ',' << n;
  os << '\n';
  for (Eigen::Index a = 0; a < t.r.rows(); ++a) {
    os << t.names[static_cast<std::size_t>(a)];
    for (Eigen::Index b = 0; b < t.r.cols(); ++b) os << ',' << t.r(a, b);
    os << '\n';
  }
  return os.str();
}

std::vector<Entity> heat_entities(const std::string& set, const HeatBenchmark& bench, const SuiteBundle& b) {
  const std::size_t L = bench.finest();
  auto level = [&bench](std::size_t l) {
    return Entity{"Y" + std::to_string(l), [&bench, l](std::span<const double> x) { return bench.evaluate(l, x); }};
  };
  auto pc = [](const std::string& name, const std::shared_ptr<const PcSurrogate>& s) {
    return Entity{name, [s](std::span<const double> x) { return s->evaluate(x); }};
  };
  std::vector<Entity> out;
  if (set == "cv") {
    out.push_back(level(L));
    out.push_back(pc("gPC" + std::to_string(L), b.suite.mlcv.at(L)));
    auto t1 = std::make_shared<const PiecewiseT1>(heat_t1(bench.config(), L));
    out.push_back({"T1_" + std::to_string(L), [t1](std::span<const double> x) { return t1->evaluate(x); }});
  } else if (set == "mlcv") {
    out.push_back(level(L));
    for (std::size_t l = 0; l <= L; ++l) out.push_back(pc("g" + std::to_string(l), b.suite.mlcv.at(l)));
  } else if (set == "nested") {
    for (std::size_t l = 0; l <= L; ++l) out.push_back(level(l));
    for (std::size_t l = 1; l <= L; ++l)
      out.push_back({"Y" + std::to_string(l) + "-Y" + std::to_string(l - 1), [&bench, l](std::span<const double> x) {
                       return bench.evaluate(l, x) - bench.evaluate(l - 1, x);
                     }});
    for (std::size_t l = 0; l <= L; ++l) out.push_back(pc("g" + std::to_string(l), b.suite.g.at(l)));
    for (std::size_t l = 1; l <= L; ++l) out.push_back(pc("h" + std::to_string(l), b.suite.h.at(l)));
  } else {
    throw Error("invalid_argument", "unknown entity set '" + set + "'");
  }
  return out;
}

std::vector<LevelQuantities> level_quantities(const std::vector<Method>& methods, const HeatBenchmark& bench,
                                              const SuiteBundle& b, std::size_t n, std::uint64_t seed) {
  std::vector<LevelQuantities> out;
  for (Method m : methods) {
    if (!is_multilevel(m)) throw Error("invalid_argument", "level_quantities: " + to_string(m) + " is single-level");
    const auto plan = make_plan(m, Statistic::expectation, bench.finest(), b.suite);
    const auto r = estimate(plan, bench, std::vector<std::size_t>(plan.levels.size(), n), {seed, 0});
    LevelQuantities q{m, {}, {}, {}, {}, {}};
    std::vector<double> costs;
    for (const auto& l : r.levels) {
      q.variance.push_back(l.variance);
      q.r2.push_back(l.r2);
      q.variance_cv.push_back(l.variance_cv);
      costs.push_back(l.cost);
    }
    const auto a = optimal_allocation(q.variance_cv, costs, 1.0);
    q.shares = a.shares;
    for (double s : a.partial_sums) q.s2.push_back(s * s);
    out.push_back(std::move(q));
  }
  return out;
}

std::string to_csv(const std::vector<LevelQuantities>& qs) {
  std::ostringstream os;
  os.precision(8);
  os << "method,level,variance,r2,variance_cv,share,s2\n";
  for (const auto& q : qs)
    for (std::size_t l = 0; l < q.variance.size(); ++l)
      os << to_string(q.method) << ',' << l << ',' << q.variance[l] << ',' << q.r2[l] << ',' << q.variance_cv[l] << ','
         << q.shares[l] << ',' << q.s2[l] << '\n';
  return os.str();
}

} // namespace mlcv
