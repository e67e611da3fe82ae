#include "mlcv/estimators/allocation.hpp"

#include <cmath>

#include "mlcv/error.hpp"

namespace mlcv {

Allocation optimal_allocation(const std::vector<double>& v, const std::vector<double>& costs, double budget,
                              double n_init) {
  if (v.empty() || v.size() != costs.size())
    throw Error("invalid_argument", "optimal_allocation: one variance and one cost per level");
  if (!(budget > 0.0)) throw Error("invalid_argument", "optimal_allocation: budget must be positive");
  double remaining = budget;
  double s = 0.0;
  Allocation a;
  a.n.assign(v.size(), 0.0);
  for (std::size_t l = 0; l < v.size(); ++l) {
    if (!(costs[l] > 0.0)) throw Error("invalid_argument", "optimal_allocation: costs must be positive");
    if (!(v[l] >= 0.0)) throw Error("invalid_argument", "optimal_allocation: variances must be non-negative");
    if (v[l] == 0.0) {
      a.n[l] = n_init;
      remaining -= n_init * costs[l];
    }
    s += std::sqrt(costs[l] * v[l]);
    a.partial_sums.push_back(s);
  }
  if (s > 0.0 && !(remaining > 0.0))
    throw Error("invalid_argument", "optimal_allocation: budget exhausted by zero-variance levels");
  for (std::size_t l = 0; l < v.size(); ++l)
    if (v[l] > 0.0) a.n[l] = remaining / s * std::sqrt(v[l] / costs[l]);
  for (std::size_t l = 0; l < v.size(); ++l) a.shares.push_back(a.n[l] * costs[l] / budget);
  a.s2 = s * s;
  return a;
}

} // namespace mlcv
