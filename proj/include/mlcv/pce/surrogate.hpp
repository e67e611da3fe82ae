#pragma once

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlcv/pce/basis.hpp"

namespace mlcv {

struct PcProvenance {
  std::string doe_id;
  int degree = -1;  // selected total degree p*
  double loo = std::numeric_limits<double>::quiet_NaN();
  std::size_t candidates = 0;  // size of the candidate basis at p*
};

/// Polynomial chaos expansion over an orthonormal Legendre basis. Index 0 is
/// always the constant term.
class PcSurrogate {
public:
  PcSurrogate(InputSpace space, std::vector<MultiIndex> indices, Eigen::VectorXd coeffs,
              PcProvenance provenance = {});

  double evaluate(std::span<const double> x) const;
  // Uses a table filled at the same point; its degree must cover max_degree().
  double evaluate(const LegendreTable& table) const;
  Eigen::VectorXd evaluate(const Doe& doe) const;

  double mean() const { return coeffs_[0]; }
  double variance() const { return coeffs_.tail(coeffs_.size() - 1).squaredNorm(); }

  const InputSpace& space() const { return space_; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  const PcProvenance& provenance() const { return provenance_; }
  std::size_t size() const { return indices_.size(); }
  int max_degree() const { return max_degree_; }

private:
  InputSpace space_;
  std::vector<MultiIndex> indices_;
  Eigen::VectorXd coeffs_;
  PcProvenance provenance_;
  int max_degree_ = 0;
  // Nonzero exponents per term as (dim, degree) pairs, flattened.
  std::vector<int> term_start_;
  std::vector<std::pair<int, int>> factors_;
};

struct PcMoments {
  double mean = 0.0;
  double variance = 0.0;
};

PcMoments pc_moments(const PcSurrogate& s);

// Covariance from coefficients on shared non-constant multi-indices.
double pc_covariance(const PcSurrogate& a, const PcSurrogate& b);

// a_coef * a + b_coef * b on the union basis (a's order first).
PcSurrogate pc_combine(double a_coef, const PcSurrogate& a, double b_coef, const PcSurrogate& b);

nlohmann::json to_json(const PcSurrogate& s);
PcSurrogate pc_from_json(const nlohmann::json& j);

} // namespace mlcv
