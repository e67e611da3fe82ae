#include "mlcv/sampling/doe.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "mlcv/error.hpp"

namespace mlcv {

InputSpace::InputSpace(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
  if (bounds_.empty()) throw Error("invalid_space", "input space needs at least one dimension");
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    if (!(bounds_[i].lower < bounds_[i].upper))
      throw Error("invalid_space", "empty interval in dimension " + std::to_string(i));
  }
}

bool InputSpace::contains(std::span<const double> x) const noexcept {
  if (x.size() != bounds_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < bounds_[i].lower || x[i] > bounds_[i].upper) return false;
  return true;
}

Eigen::VectorXd InputSpace::means() const {
  Eigen::VectorXd m(dims());
  for (std::size_t i = 0; i < dims(); ++i) m[i] = 0.5 * (bounds_[i].lower + bounds_[i].upper);
  return m;
}

Eigen::VectorXd InputSpace::variances() const {
  Eigen::VectorXd v(dims());
  for (std::size_t i = 0; i < dims(); ++i) {
    const double w = bounds_[i].upper - bounds_[i].lower;
    v[i] = w * w / 12.0;
  }
  return v;
}

const char* to_string(DoeKind kind) noexcept {
  switch (kind) {
  case DoeKind::iid: return "iid";
  case DoeKind::lhs: return "lhs";
  case DoeKind::nested_subset: return "nested-subset";
  }
  return "?";
}

DoeKind doe_kind_from_string(const std::string& s) {
  if (s == "iid") return DoeKind::iid;
  if (s == "lhs") return DoeKind::lhs;
  if (s == "nested-subset") return DoeKind::nested_subset;
  throw Error("invalid_argument", "unknown design kind '" + s + "'");
}

void sample_point(const InputSpace& space, RngStream& stream, std::span<double> out) {
  for (std::size_t j = 0; j < space.dims(); ++j)
    out[j] = space.from_unit(j, stream.uniform());
}

Doe iid_sample(const InputSpace& space, std::size_t n, RngStream stream) {
  if (n == 0) throw Error("empty_design", "iid_sample: n must be positive");
  Doe doe{space, PointMatrix(n, space.dims()), stream.seed(), DoeKind::iid, {}};
  for (std::size_t i = 0; i < n; ++i)
    sample_point(space, stream, {doe.points.data() + i * space.dims(), space.dims()});
  return doe;
}

PointMatrix to_unit_cube(const Doe& doe) {
  PointMatrix u(doe.points.rows(), doe.points.cols());
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j)
      u(i, j) = doe.space.to_unit(static_cast<std::size_t>(j), doe.points(i, j));
  return u;
}

namespace {

// Per-row term of the centered L2 discrepancy: prod_k (1 + |z-1/2|/2 - |z-1/2|²/2).
double row_term(const double* z, std::size_t d) {
  double p = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double a = std::abs(z[k] - 0.5);
    p *= 1.0 + 0.5 * a - 0.5 * a * a;
  }
  return p;
}

double pair_term(const double* zi, const double* zj, std::size_t d) {
  double p = 1.0;
  for (std::size_t k = 0; k < d; ++k)
    p *= 1.0 + 0.5 * std::abs(zi[k] - 0.5) + 0.5 * std::abs(zj[k] - 0.5) -
         0.5 * std::abs(zi[k] - zj[k]);
  return p;
}

// Incremental discrepancy state for the column-swap annealer: keeps the row
// terms and the full pair matrix so a swap costs O(n d).
class DiscrepancyState {
public:
  explicit DiscrepancyState(const PointMatrix& z) : z_(z), n_(z.rows()), d_(z.cols()) {
    rows_.resize(n_);
    pairs_.resize(n_, n_);
    for (Eigen::Index i = 0; i < n_; ++i) rows_[i] = row_term(z_.row(i).data(), d_);
    for (Eigen::Index i = 0; i < n_; ++i)
      for (Eigen::Index j = i; j < n_; ++j)
        pairs_(i, j) = pairs_(j, i) = pair_term(z_.row(i).data(), z_.row(j).data(), d_);
    row_sum_ = rows_.sum();
    pair_sum_ = pairs_.sum();
  }

  double value() const { return discrepancy(row_sum_, pair_sum_); }

  // Discrepancy after swapping column k between rows a and b (not applied).
  double trial(Eigen::Index a, Eigen::Index b, Eigen::Index k) {
    z_(a, k) = std::exchange(z_(b, k), z_(a, k));
    new_row_a_ = row_term(z_.row(a).data(), d_);
    new_row_b_ = row_term(z_.row(b).data(), d_);
    new_pair_a_.resize(n_);
    new_pair_b_.resize(n_);
    double pairs = pair_sum_;
    for (Eigen::Index j = 0; j < n_; ++j) {
      new_pair_a_[j] = pair_term(z_.row(a).data(), z_.row(j).data(), d_);
      new_pair_b_[j] = pair_term(z_.row(b).data(), z_.row(j).data(), d_);
    }
    // Rows/columns a and b of the pair matrix change; entries (a,b),(b,a),(a,a),(b,b)
    // are counted once each below.
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (j != a && j != b) {
        pairs += 2.0 * (new_pair_a_[j] - pairs_(a, j));
        pairs += 2.0 * (new_pair_b_[j] - pairs_(b, j));
      }
    }
    pairs += new_pair_a_[a] - pairs_(a, a) + new_pair_b_[b] - pairs_(b, b);
    pairs += 2.0 * (new_pair_a_[b] - pairs_(a, b));
    trial_pair_sum_ = pairs;
    trial_row_sum_ = row_sum_ + new_row_a_ - rows_[a] + new_row_b_ - rows_[b];
    z_(a, k) = std::exchange(z_(b, k), z_(a, k));
    return discrepancy(trial_row_sum_, trial_pair_sum_);
  }

  void accept(Eigen::Index a, Eigen::Index b, Eigen::Index k) {
    z_(a, k) = std::exchange(z_(b, k), z_(a, k));
    rows_[a] = new_row_a_;
    rows_[b] = new_row_b_;
    for (Eigen::Index j = 0; j < n_; ++j) {
      pairs_(a, j) = pairs_(j, a) = new_pair_a_[j];
    }
    for (Eigen::Index j = 0; j < n_; ++j) {
      pairs_(b, j) = pairs_(j, b) = new_pair_b_[j];
    }
    row_sum_ = trial_row_sum_;
    pair_sum_ = trial_pair_sum_;
  }

  const PointMatrix& points() const { return z_; }

private:
  double discrepancy(double rows, double pairs) const {
    const double n = static_cast<double>(n_);
    return std::pow(13.0 / 12.0, static_cast<double>(d_)) - 2.0 / n * rows + pairs / (n * n);
  }

  PointMatrix z_;
  Eigen::Index n_, d_;
  Eigen::VectorXd rows_;
  Eigen::MatrixXd pairs_;
  double row_sum_ = 0.0, pair_sum_ = 0.0;
  double new_row_a_ = 0.0, new_row_b_ = 0.0;
  double trial_row_sum_ = 0.0, trial_pair_sum_ = 0.0;
  Eigen::VectorXd new_pair_a_, new_pair_b_;
};

} // namespace

double centered_l2_discrepancy_unit(const PointMatrix& z) {
  const auto n = static_cast<std::size_t>(z.rows());
  const auto d = static_cast<std::size_t>(z.cols());
  if (n == 0) throw Error("empty_design", "discrepancy of an empty design");
  double rows = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rows += row_term(z.row(i).data(), d);
    pairs += pair_term(z.row(i).data(), z.row(i).data(), d);
    for (std::size_t j = i + 1; j < n; ++j) pairs += 2.0 * pair_term(z.row(i).data(), z.row(j).data(), d);
  }
  const double nn = static_cast<double>(n);
  return std::pow(13.0 / 12.0, static_cast<double>(d)) - 2.0 / nn * rows + pairs / (nn * nn);
}

double centered_l2_discrepancy(const Doe& doe) {
  return centered_l2_discrepancy_unit(to_unit_cube(doe));
}

Doe lhs_sample(const InputSpace& space, std::size_t n, RngStream stream,
               const AnnealOptions& anneal) {
  if (n < 2) throw Error("empty_design", "lhs_sample: n must be at least 2");
  const std::size_t d = space.dims();
  PointMatrix z(n, d);
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < d; ++k) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[stream.below(i + 1)]);
    for (std::size_t i = 0; i < n; ++i)
      z(i, k) = (static_cast<double>(perm[i]) + stream.uniform()) / static_cast<double>(n);
  }

  DiscrepancyState state(z);
  double current = state.value();
  double best = current;
  PointMatrix best_points = state.points();
  double temperature = anneal.initial_temperature * current;
  for (std::size_t it = 0; it < anneal.iterations; ++it) {
    const auto k = static_cast<Eigen::Index>(stream.below(d));
    const auto a = static_cast<Eigen::Index>(stream.below(n));
    auto b = static_cast<Eigen::Index>(stream.below(n - 1));
    if (b >= a) ++b;
    const double candidate = state.trial(a, b, k);
    const double u = stream.uniform();
    if (candidate <= current || (temperature > 0.0 && u < std::exp((current - candidate) / temperature))) {
      state.accept(a, b, k);
      current = candidate;
      if (current < best) {
        best = current;
        best_points = state.points();
      }
    }
    temperature *= anneal.cooling;
  }

  Doe doe{space, PointMatrix(n, d), stream.seed(), DoeKind::lhs, {}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) doe.points(i, k) = space.from_unit(k, best_points(i, k));
  return doe;
}

Doe nested_subset(const Doe& parent, std::size_t m, std::size_t pool, RngStream stream) {
  const std::size_t n = parent.size();
  if (m == 0) throw Error("empty_design", "nested_subset: m must be positive");
  if (m > n) throw Error("invalid_argument", "nested_subset: m exceeds parent size");
  if (pool == 0) throw Error("invalid_argument", "nested_subset: pool must be positive");
  const PointMatrix z = to_unit_cube(parent);
  const std::size_t d = parent.space.dims();

  Eigen::VectorXd rows(n);
  Eigen::MatrixXd pairs(n, n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = row_term(z.row(i).data(), d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      pairs(i, j) = pairs(j, i) = pair_term(z.row(i).data(), z.row(j).data(), d);

  const double mm = static_cast<double>(m);
  const double base = std::pow(13.0 / 12.0, static_cast<double>(d));
  auto score = [&](const std::vector<std::size_t>& idx) {
    double r = 0.0, p = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      r += rows[idx[a]];
      p += pairs(idx[a], idx[a]);
      for (std::size_t b = a + 1; b < m; ++b) p += 2.0 * pairs(idx[a], idx[b]);
    }
    return base - 2.0 / mm * r + p / (mm * mm);
  };

  std::vector<std::size_t> all(n), cand(m), best;
  double best_score = 0.0;
  const std::size_t draws = (m == n) ? 1 : pool;
  for (std::size_t t = 0; t < draws; ++t) {
    // Partial Fisher-Yates gives a uniform m-subset.
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) std::swap(all[i], all[i + stream.below(n - i)]);
    std::copy_n(all.begin(), m, cand.begin());
    std::sort(cand.begin(), cand.end());
    const double s = score(cand);
    if (best.empty() || s < best_score) {
      best_score = s;
      best = cand;
    }
  }

  Doe doe{parent.space, PointMatrix(m, d), stream.seed(), DoeKind::nested_subset, best};
  for (std::size_t i = 0; i < m; ++i) doe.points.row(i) = parent.points.row(best[i]);
  return doe;
}

void write_doe_csv(const Doe& doe, std::ostream& out) {
  const std::size_t d = doe.space.dims();
  for (std::size_t k = 0; k < d; ++k) out << (k ? "," : "") << 'x' << (k + 1);
  out << '\n';
  std::ostringstream buf;
  buf.precision(17);
  for (std::size_t i = 0; i < doe.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) buf << (k ? "," : "") << doe.points(i, k);
    buf << '\n';
  }
  out << buf.str();
}

std::string doe_metadata_json(const Doe& doe) {
  nlohmann::json j;
  j["seed"] = doe.seed;
  j["kind"] = to_string(doe.kind);
  j["bounds"] = nlohmann::json::array();
  for (const auto& b : doe.space.bounds()) j["bounds"].push_back({b.lower, b.upper});
  if (!doe.parent_rows.empty()) j["parent_rows"] = doe.parent_rows;
  return j.dump(2);
}

Doe read_doe(std::istream& csv, const std::string& metadata_json) {
  const auto meta = nlohmann::json::parse(metadata_json);
  std::vector<Interval> bounds;
  for (const auto& b : meta.at("bounds")) bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  InputSpace space(std::move(bounds));
  const std::size_t d = space.dims();

  std::string line;
  if (!std::getline(csv, line)) throw Error("invalid_doe", "missing CSV header");
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++cols;
    }
    if (cols != d) throw Error("invalid_doe", "row " + std::to_string(rows + 1) + " has wrong width");
    ++rows;
  }
  if (rows == 0) throw Error("empty_design", "design file has no rows");
  Doe doe{space, PointMatrix(rows, d), meta.at("seed").get<std::uint64_t>(),
          doe_kind_from_string(meta.at("kind").get<std::string>()), {}};
  std::copy(values.begin(), values.end(), doe.points.data());
  if (meta.contains("parent_rows")) doe.parent_rows = meta["parent_rows"].get<std::vector<std::size_t>>();
  return doe;
}

} // namespace mlcv
