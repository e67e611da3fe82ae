#pragma once

#include <array>
#include <map>
#include <mutex>
#include <vector>

#include "mlcv/pce/surrogate.hpp"

namespace mlcv {

/// Fourth-order product tensor E[Ψ_i Ψ_j Ψ_q Ψ_r] over a fixed list of
/// multi-indices, by tensorised Gauss-Legendre quadrature. Entries are
/// computed on demand and stored once per sorted 4-tuple.
class GalerkinTensor {
public:
  // Requires quadrature_order >= 2·(largest exponent) + 1.
  GalerkinTensor(std::vector<MultiIndex> indices, int quadrature_order);

  std::size_t size() const { return indices_.size(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  // Position of `beta` in the index list; throws if absent.
  std::size_t position(const MultiIndex& beta) const;

  double operator()(std::size_t i, std::size_t j, std::size_t q, std::size_t r) const;
  // Direct quadrature in the given argument order, bypassing storage.
  double compute(std::size_t i, std::size_t j, std::size_t q, std::size_t r) const;
  std::size_t stored_entries() const;

private:
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, std::size_t> lookup_;
  std::vector<double> weights_;           // Gauss weights / 2
  std::vector<std::vector<double>> vals_;  // vals_[degree][node]
  mutable std::mutex mutex_;
  mutable std::map<std::array<std::size_t, 4>, double> entries_;
};

// Tensor over the union of the surrogates' bases with an exact quadrature order.
GalerkinTensor galerkin_tensor_for(const std::vector<const PcSurrogate*>& surrogates);

// C[ā b̄, c̄ d̄] for centred surrogates via the quadruple sum
// Σ a_i b_j c_q d_r (Φ_ijqr − δ_ij δ_qr) over non-constant terms.
double product_covariance(const PcSurrogate& a, const PcSurrogate& b, const PcSurrogate& c,
                          const PcSurrogate& d, const GalerkinTensor& phi);

// C[Z̄₁², Z̄₂²].
double centered_square_covariance(const PcSurrogate& s1, const PcSurrogate& s2, const GalerkinTensor& phi);

// Covariance of W̄_m(Z̄_m + Z̃̄_m) and W̄_m'(Z̄_m' + Z̃̄_m') split as A + B + C + C_swapped,
// with W = h, Z = g, Z̃ = g̃.
struct MixedCovariance {
  double A = 0.0;          // C[W̄_m Z̄_m, W̄_m' Z̄_m']
  double B = 0.0;          // C[W̄_m Z̃̄_m, W̄_m' Z̃̄_m']
  double C = 0.0;          // C[W̄_m Z̃̄_m, W̄_m' Z̄_m']
  double C_swapped = 0.0;  // C[W̄_m' Z̃̄_m', W̄_m Z̄_m]
  double total() const { return A + B + C + C_swapped; }
};

struct DifferenceControl {
  const PcSurrogate* h;        // W
  const PcSurrogate* g;        // Z
  const PcSurrogate* g_tilde;  // Z̃ = g − h
};

MixedCovariance mixed_square_covariance(const DifferenceControl& m, const DifferenceControl& mp,
                                        const GalerkinTensor& phi);

// Orthonormal expansion of the product of the centred surrogates ā·b̄
// (exact: products of Legendre polynomials are finite sums of them).
std::map<MultiIndex, double> centered_product_expansion(const PcSurrogate& a, const PcSurrogate& b);

// C[ā b̄, c̄ d̄] from the product expansions; equals product_covariance
// without forming the fourth-order tensor.
double projected_product_covariance(const PcSurrogate& a, const PcSurrogate& b, const PcSurrogate& c,
                                    const PcSurrogate& d);

// E[ψ_a ψ_b ψ_c] for univariate orthonormal Legendre polynomials.
double legendre_triple(int a, int b, int c);

} // namespace mlcv
