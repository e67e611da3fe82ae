#include "mlcv/estimators/multilevel.hpp"

#include <algorithm>
#include <cmath>

#include "mlcv/error.hpp"
#include "mlcv/estimators/allocation.hpp"
#include "mlcv/estimators/stats.hpp"
#include "mlcv/sampling/rng.hpp"

namespace mlcv {

const char* to_string(AlphaMode m) noexcept {
  switch (m) {
  case AlphaMode::same_sample: return "same-sample";
  case AlphaMode::pilot: return "pilot";
  case AlphaMode::zero: return "zero";
  }
  return "?";
}

AlphaMode alpha_mode_from_string(const std::string& s) {
  if (s == "same-sample") return AlphaMode::same_sample;
  if (s == "pilot") return AlphaMode::pilot;
  if (s == "zero") return AlphaMode::zero;
  throw Error("invalid_argument", "unknown alpha mode '" + s + "'");
}

namespace {

/// Independent sample of one plan level, grown in batches.
class LevelSampler {
public:
  LevelSampler(const LevelSpec& spec, const Hierarchy& h, Statistic s, std::uint64_t seed, std::uint32_t replicate,
               Purpose purpose)
      : spec_(&spec), h_(&h), stat_(s),
        stream_(seed, StreamId{static_cast<std::uint32_t>(spec.fine), replicate, purpose}),
        eval_(h.space(), spec.controls, s), m_(spec.controls.size()),
        moments_(static_cast<Eigen::Index>(m_ + 1)), x_(h.space().dims()), row_(m_ + 1) {
    if (spec.fine >= h.levels() || (spec.coarse && *spec.coarse >= h.levels()))
      throw Error("level_out_of_range", "plan level " + std::to_string(spec.fine) + " is outside the hierarchy");
  }

  double unit_cost() const {
    return h_->cost(spec_->fine) + (spec_->coarse ? h_->cost(*spec_->coarse) : 0.0);
  }
  std::size_t count() const { return n_; }

  void draw(std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      sample_point(h_->space(), stream_, x_);
      const double yf = h_->evaluate(spec_->fine, x_);
      const double yc = spec_->coarse ? h_->evaluate(*spec_->coarse, x_) : 0.0;
      eval_.evaluate(x_, row_.data() + 1);
      if (stat_ == Statistic::expectation) {
        row_[0] = yf - yc;
        moments_.add(Eigen::Map<const Eigen::VectorXd>(row_.data(), static_cast<Eigen::Index>(m_ + 1)));
      } else {
        yf_.push_back(yf);
        yc_.push_back(yc);
        u_.insert(u_.end(), row_.begin() + 1, row_.end());
      }
      ++n_;
    }
  }

  LevelReport report(AlphaMode mode, const Eigen::VectorXd* fixed) const {
    LevelReport r;
    r.level = spec_->fine;
    r.n = n_;
    r.cost = unit_cost();
    const auto M = static_cast<Eigen::Index>(m_);
    const Eigen::VectorXd tau = eval_.tau();
    double theta = 0.0, sqq = 0.0;
    Eigen::VectorXd ubar = Eigen::VectorXd::Zero(M), c = Eigen::VectorXd::Zero(M);
    Eigen::MatrixXd suu = Eigen::MatrixXd::Zero(M, M);

    if (stat_ == Statistic::expectation) {
      if (n_ == 0) throw Error("insufficient_samples", "level " + std::to_string(r.level) + " has no samples");
      const Eigen::VectorXd mean = moments_.mean();
      theta = mean[0];
      ubar = mean.tail(M);
      if (n_ >= 2) {
        const Eigen::MatrixXd cov = moments_.covariance();
        sqq = cov(0, 0);
        c = cov.col(0).tail(M);
        suu = cov.bottomRightCorner(M, M);
      }
    } else {
      if (n_ < 2) throw Error("insufficient_samples", "level " + std::to_string(r.level) + " needs two samples");
      const auto n = static_cast<Eigen::Index>(n_);
      const Eigen::Map<const Eigen::VectorXd> yf(yf_.data(), n), yc(yc_.data(), n);
      const Eigen::VectorXd w = (yf.array() - yf.mean()).square() - (yc.array() - yc.mean()).square();
      theta = mc_var(yf_) - (spec_->coarse ? mc_var(yc_) : 0.0);
      sqq = sample_cross_covariance(w, w)(0, 0);
      if (M > 0) {
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> U(u_.data(), n, M);
        const Eigen::MatrixXd Ud = U;
        ubar = Ud.colwise().mean().transpose();
        c = sample_cross_covariance(w, Ud).transpose();
        suu = sample_cross_covariance(Ud, Ud);
      }
    }

    r.alpha = Eigen::VectorXd::Zero(M);
    if (M > 0) {
      if (mode == AlphaMode::pilot) {
        if (!fixed || fixed->size() != M) throw Error("invalid_argument", "pilot α has the wrong size");
        r.alpha = *fixed;
      } else if (mode == AlphaMode::same_sample && n_ >= 2) {
        const auto solved = solve_spd_pivoted(spec_->sigma ? *spec_->sigma : suu, c);
        r.alpha = solved.x;
        for (auto i : solved.dropped) r.dropped.push_back(spec_->controls[i].name());
      }
    }
    r.estimate = theta - r.alpha.dot(ubar - tau);
    r.variance = sqq;
    r.variance_cv = std::max(0.0, cv_quadratic(sqq, c, suu, r.alpha));
    r.r2 = sqq > 0.0 ? 1.0 - r.variance_cv / sqq : 0.0;
    return r;
  }

private:
  const LevelSpec* spec_;
  const Hierarchy* h_;
  Statistic stat_;
  RngStream stream_;
  ControlEvaluator eval_;
  std::size_t m_;
  std::size_t n_ = 0;
  RunningMoments moments_;
  std::vector<double> yf_, yc_, u_;
  std::vector<double> x_, row_;
};

std::vector<LevelSampler> make_samplers(const EstimatorPlan& plan, const Hierarchy& h, const RunOptions& o,
                                        Purpose purpose) {
  if (plan.levels.empty()) throw Error("invalid_argument", "plan has no levels");
  std::vector<LevelSampler> s;
  s.reserve(plan.levels.size());
  for (const auto& spec : plan.levels) s.emplace_back(spec, h, plan.statistic, o.seed, o.replicate, purpose);
  return s;
}

// α per level from an independent pilot sample (empty vectors for other modes).
std::vector<Eigen::VectorXd> pilot_alphas(const EstimatorPlan& plan, const Hierarchy& h, const RunOptions& o,
                                          std::vector<LevelReport>* reports = nullptr) {
  std::vector<Eigen::VectorXd> alphas(plan.levels.size());
  if (o.alpha != AlphaMode::pilot) return alphas;
  if (o.pilot_samples < 2) throw Error("invalid_argument", "pilot sample needs at least two points");
  auto pilots = make_samplers(plan, h, o, Purpose::pilot);
  for (std::size_t i = 0; i < pilots.size(); ++i) {
    pilots[i].draw(o.pilot_samples);
    auto rep = pilots[i].report(AlphaMode::same_sample, nullptr);
    alphas[i] = rep.alpha;
    if (reports) reports->push_back(std::move(rep));
  }
  return alphas;
}

EstimateResult collect(const std::vector<LevelSampler>& samplers, const RunOptions& o,
                       const std::vector<Eigen::VectorXd>& alphas) {
  EstimateResult out;
  for (std::size_t i = 0; i < samplers.size(); ++i) {
    auto rep = samplers[i].report(o.alpha, o.alpha == AlphaMode::pilot ? &alphas[i] : nullptr);
    out.value += rep.estimate;
    out.consumed += static_cast<double>(rep.n) * rep.cost;
    out.levels.push_back(std::move(rep));
  }
  return out;
}

std::size_t min_samples(Statistic s) { return s == Statistic::variance ? 2 : 1; }

} // namespace

EstimateResult estimate(const EstimatorPlan& plan, const Hierarchy& h, const std::vector<std::size_t>& n,
                        const RunOptions& o) {
  if (n.size() != plan.levels.size())
    throw Error("invalid_argument", "estimate: one sample size per plan level is required");
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] < min_samples(plan.statistic))
      throw Error("insufficient_samples", "estimate: too few samples at plan level " + std::to_string(i));
  const auto alphas = pilot_alphas(plan, h, o);
  auto samplers = make_samplers(plan, h, o, Purpose::sample);
  for (std::size_t i = 0; i < n.size(); ++i) samplers[i].draw(n[i]);
  return collect(samplers, o, alphas);
}

EstimateResult mlmc_estimate(const Hierarchy& h, const std::vector<std::size_t>& n, Statistic s, const RunOptions& o) {
  return estimate(make_plan(Method::mlmc, s, h.finest(), {}), h, n, o);
}

EstimateResult mlcv_estimate(const Hierarchy& h, const std::vector<std::shared_ptr<const PcSurrogate>>& g,
                             std::size_t n, Statistic s, const RunOptions& o) {
  EstimatorPlan plan;
  plan.method = Method::mlcv;
  plan.statistic = s;
  LevelSpec spec;
  spec.fine = h.finest();
  for (std::size_t i = 0; i < g.size(); ++i)
    spec.controls.push_back({ControlVariate::from_pc(g[i], "g" + std::to_string(i)), std::nullopt});
  if (spec.controls.empty()) throw Error("invalid_argument", "mlcv_estimate: at least one surrogate is required");
  spec.sigma = exact_control_covariance(spec.controls, s);
  plan.levels.push_back(std::move(spec));
  return estimate(plan, h, {n}, o);
}

EstimateResult mlmc_cv_estimate(const Hierarchy& h, const SurrogateSuite& suite, const std::vector<std::size_t>& n,
                                Statistic s, bool coarse_only, const RunOptions& o) {
  return estimate(make_plan(coarse_only ? Method::mlmc_cv0 : Method::mlmc_cv, s, h.finest(), suite), h, n, o);
}

EstimateResult mlmc_mlcv_estimate(const Hierarchy& h, const SurrogateSuite& suite, const std::vector<std::size_t>& n,
                                  Statistic s, bool coarse_only, const RunOptions& o) {
  return estimate(make_plan(coarse_only ? Method::mlmc_mlcv0 : Method::mlmc_mlcv, s, h.finest(), suite), h, n, o);
}

AdaptiveResult adaptive_run(const EstimatorPlan& plan, const Hierarchy& h, double budget, const AdaptiveOptions& ao) {
  if (ao.n_init < 2) throw Error("invalid_argument", "adaptive_run: n_init must be at least 2");
  if (!(ao.r > 1.0)) throw Error("invalid_argument", "adaptive_run: r must exceed 1");
  const auto& o = ao.run;
  const auto alphas = pilot_alphas(plan, h, o);
  auto samplers = make_samplers(plan, h, o, Purpose::sample);
  const std::size_t L = samplers.size();
  AdaptiveResult out;

  if (!plan.multilevel()) {
    const auto n = static_cast<std::size_t>(std::floor(budget / samplers[0].unit_cost()));
    if (n < std::max<std::size_t>(2, min_samples(plan.statistic)))
      throw Error("budget_too_small", "adaptive_run: budget buys fewer than two samples");
    samplers[0].draw(n);
    out.result = collect(samplers, o, alphas);
    out.trace.push_back({0, {n}, out.result.consumed, {out.result.levels[0].variance_cv}, 0, 0});
    return out;
  }

  double initial = 0.0;
  for (const auto& s : samplers) initial += static_cast<double>(ao.n_init) * s.unit_cost();
  if (budget < initial)
    throw Error("budget_too_small", "adaptive_run: budget " + std::to_string(budget) +
                                        " is below the initial round cost " + std::to_string(initial));

  std::vector<std::size_t> delta(L, ao.n_init);
  double consumed = 0.0;
  for (std::size_t it = 0; consumed <= budget; ++it) {
    for (std::size_t l = 0; l < L; ++l) {
      samplers[l].draw(delta[l]);
      consumed += static_cast<double>(delta[l]) * samplers[l].unit_cost();
    }
    TraceStep step;
    step.iteration = it;
    step.consumed = consumed;
    double best = -1.0;
    for (std::size_t l = 0; l < L; ++l) {
      const auto rep = samplers[l].report(o.alpha, o.alpha == AlphaMode::pilot ? &alphas[l] : nullptr);
      const double n = static_cast<double>(rep.n);
      const double score = rep.variance_cv / (ao.r * n * n * rep.cost);
      step.n.push_back(rep.n);
      step.variance_cv.push_back(rep.variance_cv);
      if (score > best) {  // strict: ties keep the lowest level
        best = score;
        step.chosen = l;
      }
    }
    std::fill(delta.begin(), delta.end(), 0);
    const auto grow = static_cast<std::size_t>(std::floor((ao.r - 1.0) * static_cast<double>(step.n[step.chosen])));
    delta[step.chosen] = std::max<std::size_t>(grow, 1);
    step.increment = delta[step.chosen];
    out.trace.push_back(std::move(step));
  }
  out.result = collect(samplers, o, alphas);
  return out;
}

EstimateResult two_stage_run(const EstimatorPlan& plan, const Hierarchy& h, double budget, const RunOptions& ro) {
  RunOptions o = ro;
  o.alpha = AlphaMode::pilot;
  std::vector<LevelReport> pilot;
  const auto alphas = pilot_alphas(plan, h, o, &pilot);
  auto samplers = make_samplers(plan, h, o, Purpose::sample);
  std::vector<double> v, costs;
  for (std::size_t i = 0; i < pilot.size(); ++i) {
    // Proxy of the corrected variance with the pilot α held fixed.
    v.push_back(pilot[i].variance_cv);
    costs.push_back(samplers[i].unit_cost());
  }
  const std::size_t floor_n = std::max<std::size_t>(2, min_samples(plan.statistic));
  std::vector<std::size_t> n;
  if (plan.multilevel()) {
    const auto a = optimal_allocation(v, costs, budget, static_cast<double>(o.pilot_samples));
    for (double x : a.n) n.push_back(std::max(floor_n, static_cast<std::size_t>(std::floor(x))));
  } else {
    n.push_back(static_cast<std::size_t>(std::floor(budget / costs[0])));
    if (n[0] < floor_n) throw Error("budget_too_small", "two_stage_run: budget buys fewer than two samples");
  }
  for (std::size_t i = 0; i < n.size(); ++i) samplers[i].draw(n[i]);
  return collect(samplers, o, alphas);
}

} // namespace mlcv
