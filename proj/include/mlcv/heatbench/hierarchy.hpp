#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mlcv/sampling/doe.hpp"

namespace mlcv {

/// Ordered simulators f_0..f_L of increasing accuracy, with per-evaluation costs.
class Hierarchy {
public:
  virtual ~Hierarchy() = default;

  virtual std::size_t levels() const = 0;
  virtual const InputSpace& space() const = 0;
  virtual double evaluate(std::size_t level, std::span<const double> x) const = 0;
  virtual double cost(std::size_t level) const = 0;

  std::size_t finest() const { return levels() - 1; }
  // C_l + C_{l-1}, with C_{-1} = 0.
  double correction_cost(std::size_t level) const;
};

// Hierarchy from plain callables; used for synthetic problems.
class FunctionHierarchy final : public Hierarchy {
public:
  using Simulator = std::function<double(std::span<const double>)>;

  FunctionHierarchy(InputSpace space, std::vector<Simulator> simulators, std::vector<double> costs);

  std::size_t levels() const override { return simulators_.size(); }
  const InputSpace& space() const override { return space_; }
  double evaluate(std::size_t level, std::span<const double> x) const override;
  double cost(std::size_t level) const override;

private:
  InputSpace space_;
  std::vector<Simulator> simulators_;
  std::vector<double> costs_;
};

} // namespace mlcv
