#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace mlcv {

double mc_mean(std::span<const double> samples);
// Unbiased sample variance.
double mc_var(std::span<const double> samples);

// Finitely supported joint law of (Y, Z).
struct DiscreteJoint {
  std::vector<double> y, z, p;
};

struct MomentProducts {
  double a = 0.0;  // E[Ê[Ȳ²] Ê[Z̄²]]
  double b = 0.0;  // E[Ê[Ȳ]² Ê[Z̄]²]
  double c = 0.0;  // E[Ê[Ȳ²] Ê[Z̄]²]
};

// Closed forms in terms of the moments of the law:
//   a_n = C[Ȳ², Z̄²]/n + V[Y]V[Z],  b_n = a_n/n² + 2(n−1)/n³ C[Y,Z]²,  c_n = a_n/n.
MomentProducts centered_moment_products(const DiscreteJoint& law, int n);

/// Mean and covariance of a vector stream, updated in O(d²) per sample.
/// Accumulates around the first observation to limit cancellation.
class RunningMoments {
public:
  explicit RunningMoments(Eigen::Index dims = 0);

  void add(const Eigen::Ref<const Eigen::VectorXd>& v);
  std::size_t count() const { return n_; }
  Eigen::Index dims() const { return shift_.size(); }
  Eigen::VectorXd mean() const;
  // Unbiased covariance (needs count() >= 2).
  Eigen::MatrixXd covariance() const;

private:
  std::size_t n_ = 0;
  Eigen::VectorXd shift_, sum_;
  Eigen::MatrixXd cross_;
};

} // namespace mlcv
