#include "mlcv/estimators/controls.hpp"

#include <algorithm>

#include "mlcv/error.hpp"
#include "mlcv/pce/galerkin.hpp"

namespace mlcv {

ControlVariate ControlVariate::from_pc(std::shared_ptr<const PcSurrogate> s, std::string name) {
  if (!s) throw Error("invalid_surrogate", "control '" + name + "' has no surrogate");
  ControlVariate c;
  c.name_ = std::move(name);
  c.mean_ = s->mean();
  c.variance_ = s->variance();
  c.pc_ = std::move(s);
  return c;
}

ControlVariate ControlVariate::from_function(ScalarFunction f, double mean, double variance, std::string name) {
  if (!f) throw Error("invalid_surrogate", "control '" + name + "' has no function");
  if (!(variance >= 0.0)) throw Error("invalid_surrogate", "control '" + name + "' has negative variance");
  ControlVariate c;
  c.name_ = std::move(name);
  c.f_ = std::move(f);
  c.mean_ = mean;
  c.variance_ = variance;
  return c;
}

double ControlVariate::evaluate(std::span<const double> x) const {
  return pc_ ? pc_->evaluate(x) : f_(x);
}

double ControlVariate::evaluate(std::span<const double> x, const LegendreTable& table) const {
  return pc_ ? pc_->evaluate(table) : f_(x);
}

std::string ControlTerm::name() const {
  return minus ? plus.name() + "-" + minus->name() : plus.name();
}

double ControlTerm::tau(Statistic s) const {
  if (s == Statistic::expectation) return plus.mean() - (minus ? minus->mean() : 0.0);
  return plus.variance() - (minus ? minus->variance() : 0.0);
}

bool ControlTerm::is_pc() const {
  return plus.pc() && (!minus || minus->pc());
}

namespace {

using Expansion = std::map<MultiIndex, double>;

// Non-constant expansion of (plus − μ₊)² − (minus − μ₋)².
Expansion square_difference_expansion(const ControlTerm& t) {
  Expansion e = centered_product_expansion(*t.plus.pc(), *t.plus.pc());
  if (t.minus) {
    for (const auto& [beta, v] : centered_product_expansion(*t.minus->pc(), *t.minus->pc())) e[beta] -= v;
  }
  const MultiIndex zero(t.plus.pc()->space().dims(), 0);
  e.erase(zero);
  return e;
}

double expansion_dot(const Expansion& a, const Expansion& b) {
  double s = 0.0;
  for (const auto& [beta, v] : a) {
    const auto it = b.find(beta);
    if (it != b.end()) s += v * it->second;
  }
  return s;
}

double linear_covariance(const ControlTerm& a, const ControlTerm& b) {
  double s = pc_covariance(*a.plus.pc(), *b.plus.pc());
  if (b.minus) s -= pc_covariance(*a.plus.pc(), *b.minus->pc());
  if (a.minus) s -= pc_covariance(*a.minus->pc(), *b.plus.pc());
  if (a.minus && b.minus) s += pc_covariance(*a.minus->pc(), *b.minus->pc());
  return s;
}

} // namespace

std::optional<Eigen::MatrixXd> exact_control_covariance(const std::vector<ControlTerm>& terms, Statistic s) {
  for (const auto& t : terms)
    if (!t.is_pc()) return std::nullopt;
  const auto m = static_cast<Eigen::Index>(terms.size());
  Eigen::MatrixXd sigma(m, m);
  if (s == Statistic::expectation) {
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) sigma(i, j) = sigma(j, i) = linear_covariance(terms[i], terms[j]);
    return sigma;
  }
  std::vector<Expansion> e;
  for (const auto& t : terms) e.push_back(square_difference_expansion(t));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) sigma(i, j) = sigma(j, i) = expansion_dot(e[i], e[j]);
  return sigma;
}

ControlEvaluator::ControlEvaluator(const InputSpace& space, std::vector<ControlTerm> terms, Statistic s)
    : space_(&space), terms_(std::move(terms)), statistic_(s), tau_(terms_.size()) {
  int degree = -1;
  auto note = [&](const ControlVariate& c) {
    if (!c.pc()) return;
    if (!(c.pc()->space() == space)) throw Error("mismatched_space", "control '" + c.name() + "' lives on another input space");
    degree = std::max(degree, c.pc()->max_degree());
  };
  for (std::size_t m = 0; m < terms_.size(); ++m) {
    note(terms_[m].plus);
    if (terms_[m].minus) note(*terms_[m].minus);
    tau_[static_cast<Eigen::Index>(m)] = terms_[m].tau(s);
  }
  if (degree >= 0) table_.emplace(space.dims(), std::max(degree, 1));
}

void ControlEvaluator::evaluate(std::span<const double> x, double* out) {
  if (table_) table_->fill(*space_, x);
  const LegendreTable* t = table_ ? &*table_ : nullptr;
  auto value = [&](const ControlVariate& c) { return t ? c.evaluate(x, *t) : c.evaluate(x); };
  for (std::size_t m = 0; m < terms_.size(); ++m) {
    const auto& term = terms_[m];
    const double a = value(term.plus);
    if (statistic_ == Statistic::expectation) {
      out[m] = term.minus ? a - value(*term.minus) : a;
    } else {
      const double da = a - term.plus.mean();
      double v = da * da;
      if (term.minus) {
        const double db = value(*term.minus) - term.minus->mean();
        v -= db * db;
      }
      out[m] = v;
    }
  }
}

} // namespace mlcv
