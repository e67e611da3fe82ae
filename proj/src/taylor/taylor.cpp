#include "mlcv/taylor/taylor.hpp"

#include <cmath>
#include <numbers>

#include "mlcv/error.hpp"

namespace mlcv {

double TaylorSurrogate::evaluate(std::span<const double> x) const {
  const Eigen::VectorXd dx = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) - center;
  double y = value + jacobian.dot(dx);
  if (order == 2) y += 0.5 * dx.dot(hessian * dx);
  return y;
}

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error("nonfinite_derivative", std::string("t_fit: non-finite ") + what);
}

} // namespace

TaylorSurrogate t_fit(const ScalarFunction& f, const InputSpace& space, int order,
                      const std::optional<Eigen::VectorXd>& center, const AnalyticDerivatives* analytic,
                      FiniteDifferenceSteps steps) {
  if (order != 1 && order != 2) throw Error("invalid_argument", "t_fit: order must be 1 or 2");
  const auto d = static_cast<Eigen::Index>(space.dims());
  TaylorSurrogate s;
  s.order = order;
  s.center = center ? *center : space.means();
  if (s.center.size() != d) throw Error("invalid_argument", "t_fit: centre has wrong dimension");
  s.input_variances = space.variances();
  const std::span<const double> mu(s.center.data(), static_cast<std::size_t>(d));
  s.value = f(mu);
  require_finite(s.value, "value");

  if (analytic) {
    s.jacobian = analytic->jacobian(mu);
    if (order == 2) {
      if (!analytic->hessian) throw Error("invalid_argument", "t_fit: analytic Hessian missing");
      s.hessian = analytic->hessian(mu);
    }
  } else {
    Eigen::VectorXd x = s.center;
    auto at = [&](const Eigen::VectorXd& p) { return f({p.data(), static_cast<std::size_t>(d)}); };
    s.jacobian.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double h = steps.jacobian * (space[i].upper - space[i].lower);
      x[i] = s.center[i] + h;
      const double fp = at(x);
      x[i] = s.center[i] - h;
      const double fm = at(x);
      x[i] = s.center[i];
      s.jacobian[i] = (fp - fm) / (2 * h);
    }
    if (order == 2) {
      s.hessian.resize(d, d);
      for (Eigen::Index i = 0; i < d; ++i) {
        const double hi = steps.hessian * (space[i].upper - space[i].lower);
        x[i] = s.center[i] + hi;
        const double fp = at(x);
        x[i] = s.center[i] - hi;
        const double fm = at(x);
        x[i] = s.center[i];
        s.hessian(i, i) = (fp - 2 * s.value + fm) / (hi * hi);
        for (Eigen::Index j = 0; j < i; ++j) {
          const double hj = steps.hessian * (space[j].upper - space[j].lower);
          double acc = 0.0;
          for (int si : {1, -1})
            for (int sj : {1, -1}) {
              x[i] = s.center[i] + si * hi;
              x[j] = s.center[j] + sj * hj;
              acc += si * sj * at(x);
            }
          x[i] = s.center[i];
          x[j] = s.center[j];
          s.hessian(i, j) = s.hessian(j, i) = acc / (4 * hi * hj);
        }
      }
    }
  }
  for (Eigen::Index i = 0; i < s.jacobian.size(); ++i) require_finite(s.jacobian[i], "Jacobian");
  if (order == 2) {
    if (s.hessian.rows() != d || s.hessian.cols() != d) throw Error("invalid_argument", "t_fit: Hessian has wrong shape");
    for (Eigen::Index i = 0; i < s.hessian.size(); ++i) require_finite(s.hessian.data()[i], "Hessian");
    s.hessian = 0.5 * (s.hessian + s.hessian.transpose()).eval();
  }
  return s;
}

TaylorMoments t_moments(const TaylorSurrogate& s) {
  const Eigen::VectorXd& v = s.input_variances;
  TaylorMoments m{s.value, s.jacobian.array().square().matrix().dot(v)};
  if (s.order == 2) {
    m.mean += 0.5 * s.hessian.diagonal().dot(v);
    m.variance += 0.5 * v.dot(s.hessian.array().square().matrix() * v);
  }
  return m;
}

PiecewiseT1::PiecewiseT1(InputSpace space, Eigen::VectorXd center, double value, Eigen::VectorXd left,
                         Eigen::VectorXd right)
    : space_(std::move(space)), center_(std::move(center)), value_(value), left_(std::move(left)),
      right_(std::move(right)) {
  const auto d = static_cast<Eigen::Index>(space_.dims());
  if (center_.size() != d || left_.size() != d || right_.size() != d)
    throw Error("invalid_argument", "piecewise surrogate: dimension mismatch");
  mean_ = value_;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double a = space_[i].lower, b = space_[i].upper, w = b - a;
    if (center_[i] != 0.0) {
      variance_ += right_[i] * right_[i] * w * w / 12.0;
      continue;
    }
    // E[X 1{X<0}], E[X 1{X>0}] and the matching second moments for U[a,b].
    const double lo = std::min(b, 0.0), hi = std::max(a, 0.0);
    const double e_neg = (lo * lo - a * a) / (2 * w), e_pos = (b * b - hi * hi) / (2 * w);
    const double s_neg = (lo * lo * lo - a * a * a) / (3 * w), s_pos = (b * b * b - hi * hi * hi) / (3 * w);
    const double m1 = left_[i] * e_neg + right_[i] * e_pos;
    const double m2 = left_[i] * left_[i] * s_neg + right_[i] * right_[i] * s_pos;
    mean_ += m1;
    variance_ += m2 - m1 * m1;
  }
}

double PiecewiseT1::evaluate(std::span<const double> x) const {
  double y = value_;
  for (Eigen::Index i = 0; i < center_.size(); ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    double slope;
    if (center_[i] != 0.0) slope = right_[i];
    else if (xi < 0.0) slope = left_[i];
    else if (xi > 0.0) slope = right_[i];
    else slope = 0.0;
    y += (xi - center_[i]) * slope;
  }
  return y;
}

PiecewiseT1 heat_t1(const HeatConfig& cfg, std::size_t level) {
  using std::numbers::pi;
  const HeatLevelTable t = heat_level_table(cfg, level);
  const InputSpace space = heat_input_space(cfg);
  const Eigen::VectorXd mu = space.means();
  const double nu = mu[3];
  // At the centre the shape amplitude I vanishes and G = 50·(−1)³.
  const double g_mu = -50.0;
  const double value = evaluate_level(cfg, level, {mu.data(), 7});
  double c1 = 0.0, c4 = 0.0, c5 = 0.0;
  for (int k = 1; k <= cfg.K; ++k) {
    const double kk = static_cast<double>(k) * k * pi * pi * cfg.T;
    const double decay = std::exp(-nu * kk);
    const double b = decay * t.s[k - 1];      // B_k at the centre
    const double a = g_mu * t.p[k - 1];       // A_k at the centre
    c1 += 3.5 * t.q[k - 1] * b;               // ∂I/∂X1 = 3.5 at X1 = X3 = 0
    c4 += -kk * decay * a * t.s[k - 1];
    c5 += 200.0 * t.p[k - 1] * b;             // |∂G/∂X_i| at X_i = 0±, other factors at −1
  }
  Eigen::VectorXd left = Eigen::VectorXd::Zero(7), right = Eigen::VectorXd::Zero(7);
  left[0] = right[0] = c1;
  left[3] = right[3] = c4;
  for (int i = 4; i < 7; ++i) {
    left[i] = -c5;
    right[i] = c5;
  }
  return PiecewiseT1(space, mu, value, left, right);
}

} // namespace mlcv
