#include "mlcv/pce/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mlcv/error.hpp"

namespace mlcv {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::vector<MultiIndex> with_constant_first(const std::vector<MultiIndex>& indices, std::size_t d) {
  const MultiIndex zero(d, 0);
  std::vector<MultiIndex> out{zero};
  for (const auto& b : indices)
    if (b != zero) out.push_back(b);
  return out;
}

// LARS on standardized columns of psi.leftCols(m); columns are raw basis
// values, centring/scaling is applied implicitly.
class LarsPath {
public:
  LarsPath(const Eigen::MatrixXd& psi, Eigen::Index m, const Eigen::VectorXd& y)
      : psi_(psi), m_(m), n_(psi.rows()) {
    const double nn = static_cast<double>(n_);
    mean_ = psi_.leftCols(m_).colwise().mean().transpose();
    norm_.resize(m_);
    for (Eigen::Index j = 0; j < m_; ++j)
      norm_[j] = std::sqrt(std::max(0.0, psi_.col(j).squaredNorm() - nn * mean_[j] * mean_[j]));
    const Eigen::VectorXd yc = y.array() - y.mean();
    c_.resize(m_);
    excluded_.assign(static_cast<std::size_t>(m_), false);
    active_flag_.assign(static_cast<std::size_t>(m_), false);
    for (Eigen::Index j = 0; j < m_; ++j) {
      if (norm_[j] <= 1e-12 * std::sqrt(nn)) {
        excluded_[j] = true;
        c_[j] = 0.0;
      } else {
        c_[j] = psi_.col(j).dot(yc) / norm_[j];
      }
    }
    max_entries_ = std::min<Eigen::Index>(n_ - 1, m_);
    L_.resize(std::max<Eigen::Index>(max_entries_, 1), std::max<Eigen::Index>(max_entries_, 1));
    c0_ = c_.cwiseAbs().maxCoeff();
  }

  Eigen::Index max_entries() const { return max_entries_; }

  // Next entering column, or -1 when the path is complete.
  Eigen::Index step() {
    for (;;) {
      if (done_ || static_cast<Eigen::Index>(active_.size()) >= max_entries_) return -1;
      if (!(c0_ > 0.0)) return -1;
      if (active_.empty()) {
        Eigen::Index best = -1;
        for (Eigen::Index j = 0; j < m_; ++j)
          if (!excluded_[j] && (best < 0 || std::abs(c_[j]) > std::abs(c_[best]))) best = j;
        if (best < 0) return -1;
        if (add(best)) return best;
        continue;
      }

      const auto k = static_cast<Eigen::Index>(active_.size());
      double C = 0.0;
      for (auto j : active_) C = std::max(C, std::abs(c_[j]));
      if (C <= 1e-12 * c0_) {
        done_ = true;
        return -1;
      }
      Eigen::VectorXd s(k);
      for (Eigen::Index i = 0; i < k; ++i) s[i] = c_[active_[i]] >= 0 ? 1.0 : -1.0;
      const auto Lk = L_.topLeftCorner(k, k).triangularView<Eigen::Lower>();
      Eigen::VectorXd w = Lk.solve(s);
      w = Lk.transpose().solve(w);
      const double AA = 1.0 / std::sqrt(s.dot(w));
      w *= AA;
      Eigen::VectorXd u = Eigen::VectorXd::Zero(n_);
      double shift = 0.0;
      for (Eigen::Index i = 0; i < k; ++i) {
        const double coef = w[i] / norm_[active_[i]];
        u.noalias() += coef * psi_.col(active_[i]);
        shift += coef * mean_[active_[i]];
      }
      u.array() -= shift;
      const Eigen::VectorXd a = (psi_.leftCols(m_).transpose() * u).cwiseQuotient(norm_);

      double gamma = inf;
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < m_; ++j) {
        if (excluded_[j] || active_flag_[j]) continue;
        const double g1 = (C - c_[j]) / (AA - a[j]);
        const double g2 = (C + c_[j]) / (AA + a[j]);
        for (double g : {g1, g2})
          if (g > 1e-14 && g < gamma) {
            gamma = g;
            enter = j;
          }
      }
      if (enter < 0) {
        // No inactive competitor: move to the least-squares fit and stop.
        c_ -= (C / AA) * a;
        done_ = true;
        return -1;
      }
      c_ -= gamma * a;
      if (add(enter)) return enter;
    }
  }

private:
  // Extends the Cholesky factor of the Gram matrix; rejects collinear columns.
  bool add(Eigen::Index j) {
    const auto k = static_cast<Eigen::Index>(active_.size());
    const double nn = static_cast<double>(n_);
    Eigen::VectorXd g(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const Eigen::Index a = active_[i];
      g[i] = (psi_.col(a).dot(psi_.col(j)) - nn * mean_[a] * mean_[j]) / (norm_[a] * norm_[j]);
    }
    Eigen::VectorXd z = k ? Eigen::VectorXd(L_.topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(g))
                          : Eigen::VectorXd();
    const double dd = 1.0 - z.squaredNorm();
    if (dd <= 1e-10) {
      excluded_[j] = true;
      return false;
    }
    L_.row(k).head(k) = z.transpose();
    L_(k, k) = std::sqrt(dd);
    active_.push_back(j);
    active_flag_[j] = true;
    return true;
  }

  const Eigen::MatrixXd& psi_;
  Eigen::Index m_, n_;
  Eigen::VectorXd mean_, norm_, c_;
  Eigen::MatrixXd L_;
  std::vector<Eigen::Index> active_;
  std::vector<bool> excluded_, active_flag_;
  Eigen::Index max_entries_ = 0;
  double c0_ = 0.0;
  bool done_ = false;
};

// Incremental least squares over [1, columns in entry order] with the
// corrected leave-one-out score of every prefix.
class HybridLoo {
public:
  HybridLoo(const Eigen::VectorXd& y, Eigen::Index max_terms)
      : y_(y), n_(y.size()), Q_(y.size(), max_terms), Rinv_(Eigen::MatrixXd::Zero(max_terms, max_terms)),
        qty_(max_terms) {
    const double nn = static_cast<double>(n_);
    var_y_ = (y.array() - y.mean()).square().sum() / (nn - 1.0);
    Q_.col(0).setConstant(1.0 / std::sqrt(nn));
    Rinv_(0, 0) = 1.0 / std::sqrt(nn);
    qty_[0] = Q_.col(0).dot(y);
    h_ = Eigen::VectorXd::Constant(n_, 1.0 / nn);
    res_ = y - qty_[0] * Q_.col(0);
    fro_ = 1.0 / nn;
    k_ = 1;
  }

  Eigen::Index terms() const { return k_; }

  bool add(const Eigen::VectorXd& col) {
    if (k_ >= Q_.cols()) return false;
    Eigen::VectorXd v = col;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(k_);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd proj = Q_.leftCols(k_).transpose() * v;
      v.noalias() -= Q_.leftCols(k_) * proj;
      r += proj;
    }
    const double rho = v.norm();
    if (rho <= 1e-10 * col.norm()) return false;
    Q_.col(k_) = v / rho;
    const Eigen::VectorXd t = Rinv_.topLeftCorner(k_, k_).triangularView<Eigen::Upper>() * r;
    Rinv_.col(k_).head(k_) = -t / rho;
    Rinv_(k_, k_) = 1.0 / rho;
    fro_ += t.squaredNorm() / (rho * rho) + 1.0 / (rho * rho);
    qty_[k_] = Q_.col(k_).dot(y_);
    h_.array() += Q_.col(k_).array().square();
    res_.noalias() -= qty_[k_] * Q_.col(k_);
    ++k_;
    return true;
  }

  double loo() const {
    const double nn = static_cast<double>(n_);
    const double P = static_cast<double>(k_);
    if (nn - P <= 0.0) return inf;
    if (!(var_y_ > 0.0)) return res_.squaredNorm() == 0.0 ? 0.0 : inf;
    double s = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double one_minus_h = 1.0 - h_[i];
      if (one_minus_h <= 1e-12) return inf;
      const double e = res_[i] / one_minus_h;
      s += e * e;
    }
    return s / nn / var_y_ * (nn / (nn - P)) * (1.0 + fro_);
  }

  // Coefficients of the first k terms.
  Eigen::VectorXd coefficients(Eigen::Index k) const {
    return Rinv_.topLeftCorner(k, k).triangularView<Eigen::Upper>() * qty_.head(k);
  }

private:
  const Eigen::VectorXd& y_;
  Eigen::Index n_;
  Eigen::MatrixXd Q_, Rinv_;
  Eigen::VectorXd qty_, h_, res_;
  double var_y_ = 0.0, fro_ = 0.0;
  Eigen::Index k_ = 0;
};

struct DegreeFit {
  double loo = inf;
  std::vector<Eigen::Index> columns;  // positions in the non-constant candidate list
  Eigen::VectorXd coeffs;             // constant first, then `columns`
};

DegreeFit hybrid_lars(const Eigen::MatrixXd& psi, Eigen::Index m, const Eigen::VectorXd& y,
                      const AdaptiveFitOptions& opt) {
  LarsPath path(psi, m, y);
  HybridLoo hybrid(y, std::min<Eigen::Index>(path.max_entries(), y.size() - 1) + 1);
  DegreeFit best;
  best.loo = hybrid.loo();
  best.coeffs = hybrid.coefficients(1);
  std::vector<Eigen::Index> accepted;
  const Eigen::Index patience =
      opt.min_step_patience <= 0
          ? std::numeric_limits<Eigen::Index>::max()
          : std::max<Eigen::Index>(opt.min_step_patience,
                                   static_cast<Eigen::Index>(opt.step_patience_fraction * path.max_entries()));
  Eigen::Index stale = 0;
  for (;;) {
    const Eigen::Index j = path.step();
    if (j < 0) break;
    if (!hybrid.add(psi.col(j))) continue;
    accepted.push_back(j);
    const double loo = hybrid.loo();
    if (loo < best.loo) {
      best.loo = loo;
      best.columns = accepted;
      best.coeffs = hybrid.coefficients(hybrid.terms());
      stale = 0;
    } else if (++stale >= patience) {
      break;
    }
  }
  return best;
}

} // namespace

Eigen::MatrixXd design_matrix(const InputSpace& space, const std::vector<MultiIndex>& indices,
                              const Doe& doe) {
  int pmax = 0;
  for (const auto& b : indices)
    for (int e : b) pmax = std::max(pmax, e);
  LegendreTable table(space.dims(), pmax);
  Eigen::MatrixXd psi(doe.size(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < doe.size(); ++i) {
    table.fill(space, doe.row(i));
    for (std::size_t k = 0; k < indices.size(); ++k) {
      double v = 1.0;
      for (std::size_t j = 0; j < space.dims(); ++j)
        if (indices[k][j] > 0) v *= table(j, indices[k][j]);
      psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
    }
  }
  return psi;
}

PcSurrogate ols_fit(const Doe& doe, const Eigen::VectorXd& y, const std::vector<MultiIndex>& indices) {
  if (static_cast<std::size_t>(y.size()) != doe.size())
    throw Error("invalid_argument", "ols_fit: one response per design point is required");
  const auto idx = with_constant_first(indices, doe.space.dims());
  if (doe.size() <= idx.size())
    throw Error("singular_design", "ols_fit: need more points than basis terms");
  const Eigen::MatrixXd psi = design_matrix(doe.space, idx, doe);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(psi);
  qr.setThreshold(1e-10);
  if (qr.rank() < psi.cols()) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi);
    const auto& sv = svd.singularValues();
    std::ostringstream msg;
    msg << "ols_fit: design matrix is rank deficient (rank " << qr.rank() << " of " << psi.cols()
        << ", condition number " << sv[0] / sv[sv.size() - 1] << ")";
    throw Error("singular_design", msg.str());
  }
  return PcSurrogate(doe.space, idx, qr.solve(y));
}

double corrected_loo(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y) {
  const double n = static_cast<double>(psi.rows());
  const double P = static_cast<double>(psi.cols());
  if (n - P <= 0.0) return inf;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(psi);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(psi.rows(), psi.cols());
  const Eigen::VectorXd h = Q.rowwise().squaredNorm();
  const Eigen::VectorXd res = y - Q * (Q.transpose() * y);
  const Eigen::MatrixXd gram_inv = (psi.transpose() * psi).inverse();
  const double var_y = (y.array() - y.mean()).square().sum() / (n - 1.0);
  const double err = (res.array() / (1.0 - h.array())).square().mean() / var_y;
  return err * (n / (n - P)) * (1.0 + gram_inv.trace());
}

std::vector<std::size_t> lars_select(const Doe& doe, const Eigen::VectorXd& y,
                                     const std::vector<MultiIndex>& candidates) {
  if (static_cast<std::size_t>(y.size()) != doe.size())
    throw Error("invalid_argument", "lars_select: one response per design point is required");
  const MultiIndex zero(doe.space.dims(), 0);
  std::vector<std::size_t> pos;
  std::vector<MultiIndex> cols;
  for (std::size_t k = 0; k < candidates.size(); ++k)
    if (candidates[k] != zero) {
      pos.push_back(k);
      cols.push_back(candidates[k]);
    }
  std::vector<std::size_t> order;
  if (cols.empty() || doe.size() < 2) return order;
  const Eigen::MatrixXd psi = design_matrix(doe.space, cols, doe);
  LarsPath path(psi, psi.cols(), y);
  for (Eigen::Index j; (j = path.step()) >= 0;) order.push_back(pos[static_cast<std::size_t>(j)]);
  return order;
}

PcSurrogate adaptive_fit(const Doe& doe, const Eigen::VectorXd& y, const AdaptiveFitOptions& opt) {
  const std::size_t d = doe.space.dims();
  if (static_cast<std::size_t>(y.size()) != doe.size())
    throw Error("invalid_argument", "adaptive_fit: one response per design point is required");
  if (doe.size() < d + 2) throw Error("singular_design", "adaptive_fit: need at least d+2 points");
  if (opt.p_max < 1) throw Error("invalid_argument", "adaptive_fit: p_max must be at least 1");

  // Graded ordering makes each degree's candidates a prefix of the next.
  auto full = total_degree_set(d, opt.p_max);
  full.erase(full.begin());
  const Eigen::MatrixXd psi = design_matrix(doe.space, full, doe);

  DegreeFit best;
  int best_p = 0;
  std::size_t best_candidates = 0;
  int stale = 0;
  std::size_t m = 0;
  for (int p = 1; p <= opt.p_max; ++p) {
    while (m < full.size() && total_degree(full[m]) <= p) ++m;
    DegreeFit fit = hybrid_lars(psi, static_cast<Eigen::Index>(m), y, opt);
    if (fit.loo < best.loo || best_p == 0) {
      best = std::move(fit);
      best_p = p;
      best_candidates = m + 1;
      stale = 0;
    } else if (opt.degree_patience > 0 && ++stale >= opt.degree_patience) {
      break;
    }
  }

  std::vector<MultiIndex> idx{MultiIndex(d, 0)};
  for (auto j : best.columns) idx.push_back(full[static_cast<std::size_t>(j)]);
  PcProvenance prov{opt.doe_id, best_p, best.loo, best_candidates};
  return PcSurrogate(doe.space, std::move(idx), best.coeffs, std::move(prov));
}

double q2(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
  if (truth.size() < 2 || predicted.size() != truth.size())
    throw Error("invalid_argument", "q2: need at least two matched test values");
  const double var = (truth.array() - truth.mean()).square().mean();
  if (!(var > 0.0)) throw Error("zero_variance", "q2: truth has zero empirical variance");
  return 1.0 - (predicted - truth).squaredNorm() / static_cast<double>(truth.size()) / var;
}

double q2(const PcSurrogate& s, const std::function<double(std::span<const double>)>& truth,
          const Doe& test) {
  Eigen::VectorXd f(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) f[static_cast<Eigen::Index>(i)] = truth(test.row(i));
  return q2(s.evaluate(test), f);
}

} // namespace mlcv
