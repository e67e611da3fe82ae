#include "mlcv/estimators/stats.hpp"

#include "mlcv/error.hpp"

namespace mlcv {

double mc_mean(std::span<const double> s) {
  if (s.empty()) throw Error("insufficient_samples", "mc_mean: need at least one sample");
  double acc = 0.0;
  for (double v : s) acc += v;
  return acc / static_cast<double>(s.size());
}

double mc_var(std::span<const double> s) {
  if (s.size() < 2) throw Error("insufficient_samples", "mc_var: need at least two samples");
  const double m = mc_mean(s);
  double acc = 0.0;
  for (double v : s) acc += (v - m) * (v - m);
  return acc / static_cast<double>(s.size() - 1);
}

MomentProducts centered_moment_products(const DiscreteJoint& law, int n) {
  if (n < 1) throw Error("invalid_argument", "centered_moment_products: n must be positive");
  if (law.y.size() != law.z.size() || law.y.size() != law.p.size())
    throw Error("invalid_argument", "centered_moment_products: atoms and weights differ in length");
  double my = 0, mz = 0;
  for (std::size_t k = 0; k < law.p.size(); ++k) {
    my += law.p[k] * law.y[k];
    mz += law.p[k] * law.z[k];
  }
  double vy = 0, vz = 0, cyz = 0, eyz2 = 0;
  for (std::size_t k = 0; k < law.p.size(); ++k) {
    const double dy = law.y[k] - my, dz = law.z[k] - mz;
    vy += law.p[k] * dy * dy;
    vz += law.p[k] * dz * dz;
    cyz += law.p[k] * dy * dz;
    eyz2 += law.p[k] * dy * dy * dz * dz;
  }
  const double nn = n;
  MomentProducts out;
  out.a = (eyz2 - vy * vz) / nn + vy * vz;
  out.b = out.a / (nn * nn) + 2.0 * (nn - 1.0) / (nn * nn * nn) * cyz * cyz;
  out.c = out.a / nn;
  return out;
}

RunningMoments::RunningMoments(Eigen::Index dims)
    : shift_(Eigen::VectorXd::Zero(dims)), sum_(Eigen::VectorXd::Zero(dims)),
      cross_(Eigen::MatrixXd::Zero(dims, dims)) {}

void RunningMoments::add(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (n_ == 0) shift_ = v;
  const Eigen::VectorXd d = v - shift_;
  sum_ += d;
  cross_.selfadjointView<Eigen::Lower>().rankUpdate(d);
  ++n_;
}

Eigen::VectorXd RunningMoments::mean() const {
  if (n_ == 0) throw Error("insufficient_samples", "mean of an empty stream");
  return shift_ + sum_ / static_cast<double>(n_);
}

Eigen::MatrixXd RunningMoments::covariance() const {
  if (n_ < 2) throw Error("insufficient_samples", "covariance needs at least two samples");
  const double n = static_cast<double>(n_);
  Eigen::MatrixXd c = cross_.selfadjointView<Eigen::Lower>();
  c -= sum_ * sum_.transpose() / n;
  return c / (n - 1.0);
}

} // namespace mlcv
