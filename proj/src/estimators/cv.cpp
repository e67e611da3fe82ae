#include "mlcv/estimators/cv.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mlcv/error.hpp"

namespace mlcv {

const char* to_string(Statistic s) noexcept {
  return s == Statistic::expectation ? "expectation" : "variance";
}

Statistic statistic_from_string(const std::string& s) {
  if (s == "expectation" || s == "mean") return Statistic::expectation;
  if (s == "variance") return Statistic::variance;
  throw Error("invalid_argument", "unknown statistic '" + s + "'");
}

PivotedSolve solve_spd_pivoted(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& c, double tolerance) {
  const Eigen::Index m = sigma.rows();
  PivotedSolve out{Eigen::VectorXd::Zero(m), {}};
  if (m == 0) return out;
  Eigen::MatrixXd a = sigma;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  const double max_diag = sigma.diagonal().maxCoeff();
  const double tol = tolerance * std::max(max_diag, 0.0);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  Eigen::Index rank = 0;
  for (; rank < m; ++rank) {
    Eigen::Index piv = rank;
    for (Eigen::Index i = rank + 1; i < m; ++i)
      if (a(i, i) > a(piv, piv)) piv = i;
    if (!(a(piv, piv) > tol) || !(max_diag > 0.0)) break;
    if (piv != rank) {
      a.row(rank).swap(a.row(piv));
      a.col(rank).swap(a.col(piv));
      L.row(rank).swap(L.row(piv));
      std::swap(perm[rank], perm[piv]);
    }
    const double d = std::sqrt(a(rank, rank));
    L(rank, rank) = d;
    for (Eigen::Index i = rank + 1; i < m; ++i) L(i, rank) = a(i, rank) / d;
    for (Eigen::Index i = rank + 1; i < m; ++i)
      for (Eigen::Index j = rank + 1; j <= i; ++j) {
        a(i, j) -= L(i, rank) * L(j, rank);
        a(j, i) = a(i, j);
      }
  }
  for (Eigen::Index i = rank; i < m; ++i) out.dropped.push_back(static_cast<std::size_t>(perm[i]));
  std::sort(out.dropped.begin(), out.dropped.end());
  if (rank == 0) return out;
  Eigen::VectorXd rhs(rank);
  for (Eigen::Index i = 0; i < rank; ++i) rhs[i] = c[perm[i]];
  const auto Lr = L.topLeftCorner(rank, rank).triangularView<Eigen::Lower>();
  const Eigen::VectorXd x = Lr.transpose().solve(Lr.solve(rhs));
  for (Eigen::Index i = 0; i < rank; ++i) out.x[perm[i]] = x[i];
  return out;
}

Eigen::MatrixXd sample_cross_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double n = static_cast<double>(a.rows());
  if (a.rows() < 2 || a.rows() != b.rows())
    throw Error("insufficient_samples", "covariance needs at least two matched samples");
  const Eigen::MatrixXd ac = a.rowwise() - a.colwise().mean();
  const Eigen::MatrixXd bc = b.rowwise() - b.colwise().mean();
  return ac.transpose() * bc / (n - 1.0);
}

double cv_quadratic(double theta_variance, const Eigen::VectorXd& c, const Eigen::MatrixXd& sigma,
                    const Eigen::VectorXd& alpha) {
  return theta_variance - 2.0 * alpha.dot(c) + alpha.dot(sigma * alpha);
}

namespace {

// Moment inputs of the optimal-parameter formulas, computed on (y, z).
struct CvMoments {
  Eigen::MatrixXd sigma;
  Eigen::VectorXd c;
  double theta_variance;
};

CvMoments sample_moments(const CvProblem& p, const Eigen::VectorXd& y, const Eigen::MatrixXd& z) {
  const auto n = y.size();
  const double nn = static_cast<double>(n);
  if (n < 2) throw Error("insufficient_samples", "cv_solve: need at least two samples");
  CvMoments m;
  if (p.statistic == Statistic::expectation) {
    m.sigma = sample_cross_covariance(z, z);
    m.c = sample_cross_covariance(y, z).transpose();
    m.theta_variance = sample_cross_covariance(y, y)(0, 0);
    return m;
  }
  const Eigen::VectorXd yc = y.array() - y.mean();
  const Eigen::VectorXd y2 = yc.array().square();
  const Eigen::MatrixXd z2 = (z.rowwise() - p.mu_z.transpose()).array().square();
  const double vy = yc.squaredNorm() / (nn - 1.0);
  m.sigma = sample_cross_covariance(z2, z2);
  m.c = sample_cross_covariance(y2, z2).transpose();
  m.theta_variance = sample_cross_covariance(y2, y2)(0, 0) + 2.0 / (nn - 1.0) * vy * vy;
  if (p.variance_form == VarianceForm::unknown_mean) {
    const Eigen::MatrixXd cz = sample_cross_covariance(z, z);
    const Eigen::VectorXd cyz = sample_cross_covariance(y, z).transpose();
    m.sigma += 2.0 / (nn - 1.0) * cz.array().square().matrix();
    m.c += 2.0 / (nn - 1.0) * cyz.array().square().matrix();
  }
  return m;
}

} // namespace

CvSolution cv_solve(const CvProblem& p) {
  const auto M = p.z.cols();
  if (M < 1) throw Error("invalid_argument", "cv_solve: at least one control is required");
  if (p.z.rows() != p.y.size()) throw Error("invalid_argument", "cv_solve: control samples must match primary samples");
  if (p.mu_z.size() != M) throw Error("invalid_argument", "cv_solve: one exact mean per control is required");
  if (p.statistic == Statistic::variance && p.var_z.size() != M)
    throw Error("invalid_argument", "cv_solve: one exact variance per control is required");

  CvMoments m;
  if (p.sigma_source == SigmaSource::pilot) {
    if (p.pilot_z.cols() != M || p.pilot_z.rows() != p.pilot_y.size())
      throw Error("invalid_argument", "cv_solve: pilot sample shape mismatch");
    m = sample_moments(p, p.pilot_y, p.pilot_z);
  } else {
    m = sample_moments(p, p.y, p.z);
    if (p.sigma_source == SigmaSource::exact) {
      if (p.sigma.rows() != M || p.sigma.cols() != M)
        throw Error("invalid_argument", "cv_solve: exact covariance has wrong shape");
      m.sigma = p.sigma;
      if (p.statistic == Statistic::variance && p.variance_form == VarianceForm::unknown_mean) {
        if (p.sigma_linear.rows() != M) throw Error("invalid_argument", "cv_solve: exact C[Z] required");
        const double nn = static_cast<double>(p.y.size());
        m.sigma += 2.0 / (nn - 1.0) * p.sigma_linear.array().square().matrix();
      }
    }
  }

  CvSolution s;
  s.sigma = m.sigma;
  s.c = m.c;
  s.theta_variance = m.theta_variance;
  const auto solved = solve_spd_pivoted(m.sigma, m.c);
  if (!solved.dropped.empty() && p.strict) {
    std::string which;
    for (auto i : solved.dropped) which += (which.empty() ? "" : ", ") + std::to_string(i);
    throw Error("singular_covariance", "cv_solve: control covariance is singular; dependent controls: " + which);
  }
  s.alpha = solved.x;
  s.dropped = solved.dropped;
  s.r2 = m.theta_variance > 0.0 ? s.alpha.dot(s.c) / m.theta_variance : 0.0;
  return s;
}

double cv_estimate(const CvProblem& p, const CvSolution& s) {
  const double nn = static_cast<double>(p.y.size());
  if (p.statistic == Statistic::expectation) {
    const Eigen::VectorXd zbar = p.z.colwise().mean().transpose();
    return p.y.mean() - s.alpha.dot(zbar - p.mu_z);
  }
  const double vy = (p.y.array() - p.y.mean()).square().sum() / (nn - 1.0);
  Eigen::VectorXd tau_hat(p.z.cols());
  for (Eigen::Index m = 0; m < p.z.cols(); ++m) {
    if (p.variance_form == VarianceForm::known_mean)
      tau_hat[m] = (p.z.col(m).array() - p.mu_z[m]).square().mean();
    else
      tau_hat[m] = (p.z.col(m).array() - p.z.col(m).mean()).square().sum() / (nn - 1.0);
  }
  return vy - s.alpha.dot(tau_hat - p.var_z);
}

} // namespace mlcv
