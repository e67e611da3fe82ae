#pragma once

#include <Eigen/Dense>

#include <vector>

namespace mlcv {

enum class Statistic { expectation, variance };

const char* to_string(Statistic s) noexcept;
Statistic statistic_from_string(const std::string& s);

enum class SigmaSource { exact, same_sample, pilot };

// Variance-statistic controls: Ê[(Z−μ_Z)²] (known mean) or V̂[Z].
enum class VarianceForm { known_mean, unknown_mean };

struct CvProblem {
  Statistic statistic = Statistic::expectation;
  Eigen::VectorXd y;      // primary samples
  Eigen::MatrixXd z;      // n x M control samples on the same inputs
  Eigen::VectorXd mu_z;   // exact control means
  Eigen::VectorXd var_z;  // exact control variances (variance statistic)
  SigmaSource sigma_source = SigmaSource::same_sample;
  // Exact Σ: C[Z] for the expectation, C[Z̄^⊙2] for the variance statistic.
  Eigen::MatrixXd sigma;
  // Exact C[Z]; used by the unknown-mean variance form with an exact Σ.
  Eigen::MatrixXd sigma_linear;
  Eigen::VectorXd pilot_y;
  Eigen::MatrixXd pilot_z;
  VarianceForm variance_form = VarianceForm::known_mean;
  // Throw on a singular Σ instead of dropping controls.
  bool strict = false;
};

struct CvSolution {
  Eigen::MatrixXd sigma;
  Eigen::VectorXd c;
  Eigen::VectorXd alpha;
  double r2 = 0.0;
  // Per-sample variance of the uncorrected statistic (the R² denominator).
  double theta_variance = 0.0;
  std::vector<std::size_t> dropped;
};

struct PivotedSolve {
  Eigen::VectorXd x;
  std::vector<std::size_t> dropped;
};

// Solves Σ x = c by pivoted Cholesky, dropping pivots below
// tolerance · max diag(Σ); dropped entries of x are zero.
PivotedSolve solve_spd_pivoted(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& c, double tolerance = 1e-10);

CvSolution cv_solve(const CvProblem& problem);
// θ̂ − αᵀ(τ̂ − τ) on the problem's primary samples.
double cv_estimate(const CvProblem& problem, const CvSolution& solution);

// V[θ̂] − 2αᵀc + αᵀΣα.
double cv_quadratic(double theta_variance, const Eigen::VectorXd& c, const Eigen::MatrixXd& sigma,
                    const Eigen::VectorXd& alpha);

// Sample covariance between the columns of a and b (n x p, n x q).
Eigen::MatrixXd sample_cross_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

} // namespace mlcv
