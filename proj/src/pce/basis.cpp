#include "mlcv/pce/basis.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "mlcv/error.hpp"

namespace mlcv {

int total_degree(const MultiIndex& beta) { return std::accumulate(beta.begin(), beta.end(), 0); }

namespace {

void compositions(std::size_t pos, int remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[pos] = v;
    compositions(pos + 1, remaining - v, cur, out);
  }
}

} // namespace

std::vector<MultiIndex> total_degree_set(std::size_t d, int p) {
  if (d == 0) throw Error("invalid_argument", "total_degree_set: d must be positive");
  if (p < 0) throw Error("invalid_argument", "total_degree_set: p must be nonnegative");
  std::vector<MultiIndex> out;
  MultiIndex cur(d, 0);
  for (int q = 0; q <= p; ++q) compositions(0, q, cur, out);
  return out;
}

void legendre_all(int pmax, double t, double* out) {
  double prev = 1.0, cur = t;
  out[0] = 1.0;
  if (pmax >= 1) out[1] = std::sqrt(3.0) * t;
  for (int n = 1; n < pmax; ++n) {
    const double next = ((2 * n + 1) * t * cur - n * prev) / (n + 1);
    prev = cur;
    cur = next;
    out[n + 1] = std::sqrt(2.0 * (n + 1) + 1.0) * cur;
  }
}

double legendre(int n, double t) {
  std::vector<double> v(n + 1);
  legendre_all(n, t, v.data());
  return v[n];
}

GaussRule gauss_legendre(int m) {
  if (m < 1) throw Error("invalid_argument", "gauss_legendre: need at least one node");
  GaussRule rule{std::vector<double>(m), std::vector<double>(m)};
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int n = 1; n < m; ++n) {
        const double p2 = ((2 * n + 1) * x * p1 - n * p0) / (n + 1);
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int n = 1; n < m; ++n) {
        const double p2 = ((2 * n + 1) * x * p1 - n * p0) / (n + 1);
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
    }
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = rule.weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double basis_eval(const InputSpace& space, const MultiIndex& beta, std::span<const double> x) {
  double v = 1.0;
  for (std::size_t j = 0; j < beta.size(); ++j)
    if (beta[j] > 0) v *= legendre(beta[j], 2.0 * space.to_unit(j, x[j]) - 1.0);
  return v;
}

LegendreTable::LegendreTable(std::size_t dims, int max_degree)
    : stride_(max_degree + 1), v_(dims * static_cast<std::size_t>(max_degree + 1), 1.0) {}

void LegendreTable::fill(const InputSpace& space, std::span<const double> x) {
  const std::size_t d = v_.size() / stride_;
  for (std::size_t j = 0; j < d; ++j)
    legendre_all(stride_ - 1, 2.0 * space.to_unit(j, x[j]) - 1.0, v_.data() + j * stride_);
}

} // namespace mlcv
