#include "mlcv/heatbench/hierarchy.hpp"

#include "mlcv/error.hpp"

namespace mlcv {

double Hierarchy::correction_cost(std::size_t level) const {
  return cost(level) + (level > 0 ? cost(level - 1) : 0.0);
}

FunctionHierarchy::FunctionHierarchy(InputSpace space, std::vector<Simulator> simulators,
                                     std::vector<double> costs)
    : space_(std::move(space)), simulators_(std::move(simulators)), costs_(std::move(costs)) {
  if (simulators_.empty()) throw Error("invalid_argument", "hierarchy needs at least one level");
  if (simulators_.size() != costs_.size())
    throw Error("invalid_argument", "one cost per simulator is required");
  for (double c : costs_)
    if (!(c > 0.0)) throw Error("invalid_argument", "costs must be positive");
}

double FunctionHierarchy::evaluate(std::size_t level, std::span<const double> x) const {
  if (level >= simulators_.size()) throw Error("level_out_of_range", "level index out of range");
  return simulators_[level](x);
}

double FunctionHierarchy::cost(std::size_t level) const {
  if (level >= costs_.size()) throw Error("level_out_of_range", "level index out of range");
  return costs_[level];
}

} // namespace mlcv
