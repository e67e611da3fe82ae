#pragma once

#include <vector>

namespace mlcv {

struct Allocation {
  std::vector<double> n;             // continuous optimal sample sizes
  std::vector<double> shares;        // n_l·cost_l / budget
  std::vector<double> partial_sums;  // S_l = Σ_{l'≤l} √(cost_l' V_l')
  double s2 = 0.0;                   // S_L²; the estimator variance is S_L²/budget
};

// Minimises Σ V_l/n_l subject to Σ n_l·cost_l = budget. Levels with zero
// variance get n_init samples, paid for before the others are allocated.
Allocation optimal_allocation(const std::vector<double>& variance, const std::vector<double>& costs, double budget,
                              double n_init = 30.0);

} // namespace mlcv
