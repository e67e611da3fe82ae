#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mlcv/sampling/rng.hpp"

namespace mlcv {

// Row-major so that a point is a contiguous span.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
  bool operator==(const Interval&) const = default;
};

/// Box of independent uniform inputs.
class InputSpace {
public:
  explicit InputSpace(std::vector<Interval> bounds);

  std::size_t dims() const noexcept { return bounds_.size(); }
  const Interval& operator[](std::size_t i) const { return bounds_[i]; }
  const std::vector<Interval>& bounds() const noexcept { return bounds_; }

  double to_unit(std::size_t i, double x) const noexcept {
    return (x - bounds_[i].lower) / (bounds_[i].upper - bounds_[i].lower);
  }
  double from_unit(std::size_t i, double u) const noexcept {
    return bounds_[i].lower + (bounds_[i].upper - bounds_[i].lower) * u;
  }
  bool contains(std::span<const double> x) const noexcept;

  Eigen::VectorXd means() const;
  Eigen::VectorXd variances() const;

  bool operator==(const InputSpace&) const = default;

private:
  std::vector<Interval> bounds_;
};

enum class DoeKind { iid, lhs, nested_subset };

const char* to_string(DoeKind kind) noexcept;
DoeKind doe_kind_from_string(const std::string& s);

struct Doe {
  InputSpace space;
  PointMatrix points;
  std::uint64_t seed = 0;
  DoeKind kind = DoeKind::iid;
  // Parent row of each point, for nested subsets only.
  std::vector<std::size_t> parent_rows;

  std::size_t size() const noexcept { return static_cast<std::size_t>(points.rows()); }
  std::span<const double> row(std::size_t i) const {
    return {points.data() + i * space.dims(), space.dims()};
  }
};

struct AnnealOptions {
  std::size_t iterations = 10000;
  // Initial temperature as a fraction of the initial discrepancy.
  double initial_temperature = 0.01;
  double cooling = 0.999;
};

// Draws one point uniformly from `space` into `out`.
void sample_point(const InputSpace& space, RngStream& stream, std::span<double> out);

Doe iid_sample(const InputSpace& space, std::size_t n, RngStream stream);

// Random LHS (midpoint-free: uniform within each stratum), then annealed swaps
// within columns. Returns the lowest-discrepancy design visited.
Doe lhs_sample(const InputSpace& space, std::size_t n, RngStream stream,
               const AnnealOptions& anneal = {});

// Squared centered L2 discrepancy on coordinates rescaled to the unit cube.
double centered_l2_discrepancy(const Doe& doe);
double centered_l2_discrepancy_unit(const PointMatrix& unit_points);

// Best of `pool` uniformly drawn m-row subsets of `parent` under the
// centered L2 discrepancy.
Doe nested_subset(const Doe& parent, std::size_t m, std::size_t pool, RngStream stream);

PointMatrix to_unit_cube(const Doe& doe);

void write_doe_csv(const Doe& doe, std::ostream& out);
std::string doe_metadata_json(const Doe& doe);
Doe read_doe(std::istream& csv, const std::string& metadata_json);

} // namespace mlcv
