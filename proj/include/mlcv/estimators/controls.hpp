#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlcv/estimators/cv.hpp"
#include "mlcv/pce/surrogate.hpp"
#include "mlcv/taylor/taylor.hpp"

namespace mlcv {

/// A scalar function of the inputs with exactly known mean and variance:
/// either a PC surrogate or an arbitrary callable (e.g. a Taylor model).
class ControlVariate {
public:
  static ControlVariate from_pc(std::shared_ptr<const PcSurrogate> s, std::string name);
  static ControlVariate from_function(ScalarFunction f, double mean, double variance, std::string name);

  const std::string& name() const { return name_; }
  const PcSurrogate* pc() const { return pc_.get(); }
  double mean() const { return mean_; }
  double variance() const { return variance_; }

  double evaluate(std::span<const double> x) const;
  // PC controls read the shared table filled at x.
  double evaluate(std::span<const double> x, const LegendreTable& table) const;

private:
  std::string name_;
  std::shared_ptr<const PcSurrogate> pc_;
  ScalarFunction f_;
  double mean_ = 0.0, variance_ = 0.0;
};

/// One control of an estimator: plus − minus (minus optional).
/// Expectation statistic: sample plus(X) − minus(X) with mean μ₊ − μ₋.
/// Variance statistic: (plus − μ₊)² − (minus − μ₋)² with mean σ²₊ − σ²₋.
struct ControlTerm {
  ControlVariate plus;
  std::optional<ControlVariate> minus;

  std::string name() const;
  double tau(Statistic s) const;
  bool is_pc() const;
};

// Exact covariance matrix of the term samples, available when every
// control is a PC surrogate.
std::optional<Eigen::MatrixXd> exact_control_covariance(const std::vector<ControlTerm>& terms, Statistic s);

/// Evaluates a fixed list of control terms at a point, sharing one
/// Legendre table between all PC controls.
class ControlEvaluator {
public:
  ControlEvaluator(const InputSpace& space, std::vector<ControlTerm> terms, Statistic s);

  std::size_t size() const { return terms_.size(); }
  const std::vector<ControlTerm>& terms() const { return terms_; }
  const Eigen::VectorXd& tau() const { return tau_; }
  void evaluate(std::span<const double> x, double* out);

private:
  const InputSpace* space_;
  std::vector<ControlTerm> terms_;
  Statistic statistic_;
  Eigen::VectorXd tau_;
  std::optional<LegendreTable> table_;
};

} // namespace mlcv
