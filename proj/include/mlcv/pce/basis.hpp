#pragma once

#include <span>
#include <vector>

#include "mlcv/sampling/doe.hpp"

namespace mlcv {

using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& beta);

// All multi-indices with |beta| <= p, graded by total degree; within a degree,
// lexicographically descending (so d=2, p=1 gives (0,0), (1,0), (0,1)).
std::vector<MultiIndex> total_degree_set(std::size_t d, int p);

// Orthonormal Legendre polynomial sqrt(2n+1) P_n(t) on [-1,1] w.r.t. dt/2.
double legendre(int n, double t);
// psi_0..psi_pmax at t into out[0..pmax].
void legendre_all(int pmax, double t, double* out);

// Gauss-Legendre rule with m nodes on [-1,1]; weights sum to 2.
struct GaussRule {
  std::vector<double> nodes, weights;
};
GaussRule gauss_legendre(int m);

// Product of univariate orthonormal polynomials, inputs rescaled from `space`.
double basis_eval(const InputSpace& space, const MultiIndex& beta, std::span<const double> x);

/// Univariate polynomial values of one point for all dimensions, shared by
/// every surrogate evaluated at that point.
class LegendreTable {
public:
  LegendreTable(std::size_t dims, int max_degree);

  void fill(const InputSpace& space, std::span<const double> x);
  double operator()(std::size_t dim, int degree) const { return v_[dim * stride_ + degree]; }
  int max_degree() const { return stride_ - 1; }

private:
  int stride_;
  std::vector<double> v_;
};

} // namespace mlcv
