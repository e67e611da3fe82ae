#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>

#include "mlcv/heatbench/heat.hpp"

namespace mlcv {

using ScalarFunction = std::function<double(std::span<const double>)>;

/// First- or second-order Taylor polynomial around `center`, with the input
/// variances used by the moment formulas.
struct TaylorSurrogate {
  int order = 1;
  Eigen::VectorXd center;
  double value = 0.0;
  Eigen::VectorXd jacobian;
  Eigen::MatrixXd hessian;  // order 2 only; empty otherwise
  Eigen::VectorXd input_variances;

  double evaluate(std::span<const double> x) const;
};

struct AnalyticDerivatives {
  std::function<Eigen::VectorXd(std::span<const double>)> jacobian;
  std::function<Eigen::MatrixXd(std::span<const double>)> hessian;  // needed for order 2
};

struct FiniteDifferenceSteps {
  double jacobian = 1e-6;  // relative to the interval width
  double hessian = 1e-4;
};

// Taylor surrogate of f at `center` (default: the input means). Derivatives
// come from `analytic` when given, otherwise from central finite differences.
TaylorSurrogate t_fit(const ScalarFunction& f, const InputSpace& space, int order,
                      const std::optional<Eigen::VectorXd>& center = std::nullopt,
                      const AnalyticDerivatives* analytic = nullptr, FiniteDifferenceSteps steps = {});

struct TaylorMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// order 1: (f(μ), Σ J_i² σ_i²)
// order 2: (f(μ) + ½ Σ H_ii σ_i², Σ J_i² σ_i² + ½ Σ_ij H_ij² σ_i² σ_j²)
TaylorMoments t_moments(const TaylorSurrogate& s);

/// First-order surrogate whose slope in a coordinate may differ on either
/// side of a zero centre, for functions of |X_i|. Term i is
/// (X_i − μ_i)·slope_i with slope_i = right_i if μ_i ≠ 0, else left_i for
/// X_i < 0, right_i for X_i > 0 and 0 at X_i = 0.
class PiecewiseT1 {
public:
  PiecewiseT1(InputSpace space, Eigen::VectorXd center, double value, Eigen::VectorXd left,
              Eigen::VectorXd right);

  double evaluate(std::span<const double> x) const;
  // Exact under independent uniform inputs.
  double mean() const { return mean_; }
  double variance() const { return variance_; }

  const Eigen::VectorXd& left() const { return left_; }
  const Eigen::VectorXd& right() const { return right_; }
  double center_value() const { return value_; }
  const Eigen::VectorXd& center() const { return center_; }

private:
  InputSpace space_;
  Eigen::VectorXd center_;
  double value_;
  Eigen::VectorXd left_, right_;
  double mean_ = 0.0, variance_ = 0.0;
};

// Analytic piecewise first-order surrogate of benchmark level `level`
// around the input means.
PiecewiseT1 heat_t1(const HeatConfig& cfg, std::size_t level);

} // namespace mlcv
