#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

#include "mlcv/pce/surrogate.hpp"

namespace mlcv {

// n x P matrix of basis values, one row per design point.
Eigen::MatrixXd design_matrix(const InputSpace& space, const std::vector<MultiIndex>& indices,
                              const Doe& doe);

// Least squares on the given basis (the constant term is added if missing).
PcSurrogate ols_fit(const Doe& doe, const Eigen::VectorXd& y, const std::vector<MultiIndex>& indices);

// Corrected leave-one-out error of the least-squares fit on the columns of
// `psi` (which must include the constant column), relative to the empirical
// variance of y: mean((r_i/(1-h_i))²)/V[y] · n/(n-P) · (1 + tr((ΨᵀΨ)⁻¹)).
double corrected_loo(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y);

// LARS entry order over the non-constant candidates, as positions into
// `candidates`. Columns are centred and scaled to unit norm; collinear
// columns are skipped; the path stops at min(n-1, #candidates) entries or
// once the response is fully explained.
std::vector<std::size_t> lars_select(const Doe& doe, const Eigen::VectorXd& y,
                                     const std::vector<MultiIndex>& candidates);

struct AdaptiveFitOptions {
  int p_max = 10;
  // Stop the degree loop after this many degrees without a better LOO (0 disables).
  int degree_patience = 2;
  // Stop a LARS path once LOO has not improved for
  // max(min_step_patience, step_patience_fraction · path length) entries (0 disables).
  int min_step_patience = 20;
  double step_patience_fraction = 0.1;
  std::string doe_id;
};

// Basis-adaptive hybrid LARS: for p = 1..p_max, LARS on the total-degree
// candidates, least-squares refit of every path prefix scored by corrected
// LOO; returns the overall best model.
PcSurrogate adaptive_fit(const Doe& doe, const Eigen::VectorXd& y, const AdaptiveFitOptions& options = {});

// 1 - mean((g - f)²) / V[f], with population-form moments.
double q2(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth);
double q2(const PcSurrogate& s, const std::function<double(std::span<const double>)>& truth,
          const Doe& test);

} // namespace mlcv
