#include "mlcv/pce/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mlcv/error.hpp"

namespace mlcv {

PcSurrogate::PcSurrogate(InputSpace space, std::vector<MultiIndex> indices, Eigen::VectorXd coeffs,
                         PcProvenance provenance)
    : space_(std::move(space)), provenance_(std::move(provenance)) {
  if (indices.size() != static_cast<std::size_t>(coeffs.size()))
    throw Error("invalid_surrogate", "indices and coefficients differ in length");
  const std::size_t d = space_.dims();
  std::map<MultiIndex, double> seen;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k].size() != d) throw Error("invalid_surrogate", "multi-index of wrong length");
    for (int e : indices[k])
      if (e < 0) throw Error("invalid_surrogate", "negative exponent");
    if (!seen.emplace(indices[k], coeffs[k]).second)
      throw Error("invalid_surrogate", "duplicate multi-index");
  }
  // Constant term first, inserted with a zero coefficient if absent.
  const MultiIndex zero(d, 0);
  indices_.push_back(zero);
  std::vector<double> c{seen.count(zero) ? seen[zero] : 0.0};
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] == zero) continue;
    indices_.push_back(indices[k]);
    c.push_back(coeffs[k]);
  }
  coeffs_ = Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));

  for (const auto& beta : indices_) {
    term_start_.push_back(static_cast<int>(factors_.size()));
    for (std::size_t j = 0; j < d; ++j)
      if (beta[j] > 0) {
        factors_.emplace_back(static_cast<int>(j), beta[j]);
        max_degree_ = std::max(max_degree_, beta[j]);
      }
  }
  term_start_.push_back(static_cast<int>(factors_.size()));
}

double PcSurrogate::evaluate(const LegendreTable& table) const {
  double y = 0.0;
  const std::size_t P = indices_.size();
  for (std::size_t k = 0; k < P; ++k) {
    double v = coeffs_[static_cast<Eigen::Index>(k)];
    for (int f = term_start_[k]; f < term_start_[k + 1]; ++f)
      v *= table(static_cast<std::size_t>(factors_[f].first), factors_[f].second);
    y += v;
  }
  return y;
}

double PcSurrogate::evaluate(std::span<const double> x) const {
  LegendreTable table(space_.dims(), max_degree_);
  table.fill(space_, x);
  return evaluate(table);
}

Eigen::VectorXd PcSurrogate::evaluate(const Doe& doe) const {
  LegendreTable table(space_.dims(), max_degree_);
  Eigen::VectorXd y(doe.size());
  for (std::size_t i = 0; i < doe.size(); ++i) {
    table.fill(space_, doe.row(i));
    y[static_cast<Eigen::Index>(i)] = evaluate(table);
  }
  return y;
}

PcMoments pc_moments(const PcSurrogate& s) { return {s.mean(), s.variance()}; }

double pc_covariance(const PcSurrogate& a, const PcSurrogate& b) {
  if (!(a.space() == b.space())) throw Error("mismatched_space", "surrogates live on different input spaces");
  std::map<MultiIndex, double> bc;
  for (std::size_t k = 1; k < b.size(); ++k) bc.emplace(b.indices()[k], b.coeffs()[k]);
  double cov = 0.0;
  for (std::size_t k = 1; k < a.size(); ++k) {
    const auto it = bc.find(a.indices()[k]);
    if (it != bc.end()) cov += a.coeffs()[k] * it->second;
  }
  return cov;
}

PcSurrogate pc_combine(double a_coef, const PcSurrogate& a, double b_coef, const PcSurrogate& b) {
  if (!(a.space() == b.space())) throw Error("mismatched_space", "surrogates live on different input spaces");
  std::vector<MultiIndex> idx = a.indices();
  std::vector<double> c(a.size());
  std::map<MultiIndex, std::size_t> pos;
  for (std::size_t k = 0; k < a.size(); ++k) {
    c[k] = a_coef * a.coeffs()[k];
    pos.emplace(a.indices()[k], k);
  }
  for (std::size_t k = 0; k < b.size(); ++k) {
    const auto it = pos.find(b.indices()[k]);
    if (it != pos.end()) {
      c[it->second] += b_coef * b.coeffs()[k];
    } else {
      idx.push_back(b.indices()[k]);
      c.push_back(b_coef * b.coeffs()[k]);
    }
  }
  return PcSurrogate(a.space(), std::move(idx),
                     Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));
}

nlohmann::json to_json(const PcSurrogate& s) {
  nlohmann::json j;
  j["space"] = nlohmann::json::array();
  for (const auto& b : s.space().bounds()) j["space"].push_back({b.lower, b.upper});
  j["indices"] = s.indices();
  // The JSON number printer emits shortest round-trip decimals.
  j["coeffs"] = std::vector<double>(s.coeffs().data(), s.coeffs().data() + s.coeffs().size());
  const auto& p = s.provenance();
  j["provenance"] = {{"doe_id", p.doe_id}, {"degree", p.degree}, {"candidates", p.candidates}};
  j["provenance"]["loo"] = std::isfinite(p.loo) ? nlohmann::json(p.loo) : nlohmann::json(nullptr);
  return j;
}

PcSurrogate pc_from_json(const nlohmann::json& j) {
  std::vector<Interval> bounds;
  for (const auto& b : j.at("space")) bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  auto idx = j.at("indices").get<std::vector<MultiIndex>>();
  auto c = j.at("coeffs").get<std::vector<double>>();
  PcProvenance p;
  if (j.contains("provenance")) {
    const auto& pj = j.at("provenance");
    p.doe_id = pj.value("doe_id", std::string{});
    p.degree = pj.value("degree", -1);
    p.candidates = pj.value("candidates", std::size_t{0});
    if (pj.contains("loo") && !pj.at("loo").is_null()) p.loo = pj.at("loo").get<double>();
  }
  return PcSurrogate(InputSpace(std::move(bounds)), std::move(idx),
                     Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())),
                     std::move(p));
}

} // namespace mlcv
