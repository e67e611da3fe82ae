#include "mlcv/pce/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mlcv/error.hpp"

namespace mlcv {

GalerkinTensor::GalerkinTensor(std::vector<MultiIndex> indices, int quadrature_order)
    : indices_(std::move(indices)) {
  int pmax = 0;
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (!lookup_.emplace(indices_[k], k).second)
      throw Error("invalid_argument", "galerkin tensor: duplicate multi-index");
    for (int e : indices_[k]) pmax = std::max(pmax, e);
  }
  if (quadrature_order < 2 * pmax + 1)
    throw Error("insufficient_quadrature",
                "galerkin tensor: quadrature order " + std::to_string(quadrature_order) +
                    " below 2*" + std::to_string(pmax) + "+1");
  const GaussRule rule = gauss_legendre(quadrature_order);
  weights_.resize(rule.weights.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) weights_[k] = 0.5 * rule.weights[k];
  vals_.assign(static_cast<std::size_t>(pmax + 1), std::vector<double>(rule.nodes.size()));
  std::vector<double> tmp(static_cast<std::size_t>(pmax + 1));
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    legendre_all(pmax, rule.nodes[k], tmp.data());
    for (int p = 0; p <= pmax; ++p) vals_[p][k] = tmp[p];
  }
}

std::size_t GalerkinTensor::position(const MultiIndex& beta) const {
  const auto it = lookup_.find(beta);
  if (it == lookup_.end()) throw Error("missing_tensor_entry", "multi-index not covered by the tensor");
  return it->second;
}

double GalerkinTensor::compute(std::size_t i, std::size_t j, std::size_t q, std::size_t r) const {
  const auto& a = indices_.at(i);
  const auto& b = indices_.at(j);
  const auto& c = indices_.at(q);
  const auto& e = indices_.at(r);
  double v = 1.0;
  for (std::size_t dim = 0; dim < a.size(); ++dim) {
    if (a[dim] + b[dim] + c[dim] + e[dim] == 0) continue;
    const auto& va = vals_[a[dim]];
    const auto& vb = vals_[b[dim]];
    const auto& vc = vals_[c[dim]];
    const auto& ve = vals_[e[dim]];
    double s = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) s += weights_[k] * va[k] * vb[k] * vc[k] * ve[k];
    v *= s;
    if (v == 0.0) break;
  }
  return v;
}

double GalerkinTensor::operator()(std::size_t i, std::size_t j, std::size_t q, std::size_t r) const {
  std::array<std::size_t, 4> key{i, j, q, r};
  std::sort(key.begin(), key.end());
  {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  const double v = compute(key[0], key[1], key[2], key[3]);
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.emplace(key, v).first->second;
}

std::size_t GalerkinTensor::stored_entries() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

GalerkinTensor galerkin_tensor_for(const std::vector<const PcSurrogate*>& surrogates) {
  std::set<MultiIndex> seen;
  std::vector<MultiIndex> idx;
  int pmax = 0;
  for (const auto* s : surrogates)
    for (const auto& b : s->indices())
      if (seen.insert(b).second) {
        idx.push_back(b);
        for (int e : b) pmax = std::max(pmax, e);
      }
  return GalerkinTensor(std::move(idx), 2 * pmax + 1);
}

namespace {

struct Terms {
  std::vector<std::size_t> pos;
  std::vector<double> coef;
};

Terms non_constant_terms(const PcSurrogate& s, const GalerkinTensor& phi) {
  Terms t;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s.coeffs()[k] == 0.0) continue;
    t.pos.push_back(phi.position(s.indices()[k]));
    t.coef.push_back(s.coeffs()[k]);
  }
  return t;
}

} // namespace

double product_covariance(const PcSurrogate& a, const PcSurrogate& b, const PcSurrogate& c,
                          const PcSurrogate& d, const GalerkinTensor& phi) {
  const Terms ta = non_constant_terms(a, phi), tb = non_constant_terms(b, phi);
  const Terms tc = non_constant_terms(c, phi), td = non_constant_terms(d, phi);
  double s = 0.0;
  for (std::size_t i = 0; i < ta.pos.size(); ++i)
    for (std::size_t j = 0; j < tb.pos.size(); ++j) {
      const double ab = ta.coef[i] * tb.coef[j];
      const bool dij = ta.pos[i] == tb.pos[j];
      for (std::size_t q = 0; q < tc.pos.size(); ++q)
        for (std::size_t r = 0; r < td.pos.size(); ++r) {
          double v = phi(ta.pos[i], tb.pos[j], tc.pos[q], td.pos[r]);
          if (dij && tc.pos[q] == td.pos[r]) v -= 1.0;
          s += ab * tc.coef[q] * td.coef[r] * v;
        }
    }
  return s;
}

double centered_square_covariance(const PcSurrogate& s1, const PcSurrogate& s2, const GalerkinTensor& phi) {
  return product_covariance(s1, s1, s2, s2, phi);
}

MixedCovariance mixed_square_covariance(const DifferenceControl& m, const DifferenceControl& mp,
                                        const GalerkinTensor& phi) {
  MixedCovariance out;
  out.A = product_covariance(*m.h, *m.g, *mp.h, *mp.g, phi);
  out.B = product_covariance(*m.h, *m.g_tilde, *mp.h, *mp.g_tilde, phi);
  out.C = product_covariance(*m.h, *m.g_tilde, *mp.h, *mp.g, phi);
  out.C_swapped = product_covariance(*mp.h, *mp.g_tilde, *m.h, *m.g, phi);
  return out;
}

namespace {

// Triple products up to a degree, cached per call site via a static table
// guarded by a mutex.
class TripleTable {
public:
  double get(int a, int b, int c) {
    const int need = std::max({a, b, c});
    std::lock_guard<std::mutex> lock(mutex_);
    if (need > pmax_) build(std::max(need, 2 * pmax_ + 4));
    return t_[(static_cast<std::size_t>(a) * (pmax_ + 1) + b) * (pmax_ + 1) + c];
  }

private:
  void build(int pmax) {
    pmax_ = pmax;
    const std::size_t s = static_cast<std::size_t>(pmax + 1);
    const GaussRule rule = gauss_legendre(3 * pmax / 2 + 2);
    std::vector<std::vector<double>> v(s, std::vector<double>(rule.nodes.size()));
    std::vector<double> tmp(s);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      legendre_all(pmax, rule.nodes[k], tmp.data());
      for (std::size_t p = 0; p < s; ++p) v[p][k] = tmp[p];
    }
    t_.assign(s * s * s, 0.0);
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t b = 0; b < s; ++b)
        for (std::size_t c = 0; c < s; ++c) {
          // Zero unless the triangle inequality holds and a+b+c is even.
          if (c > a + b || a > b + c || b > a + c || (a + b + c) % 2) continue;
          double sum = 0.0;
          for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += 0.5 * rule.weights[k] * v[a][k] * v[b][k] * v[c][k];
          t_[(a * s + b) * s + c] = sum;
        }
  }

  std::mutex mutex_;
  int pmax_ = -1;
  std::vector<double> t_;
};

TripleTable& triple_table() {
  static TripleTable table;
  return table;
}

void expand_pair(const MultiIndex& a, const MultiIndex& b, double coef, std::size_t dim, MultiIndex& cur,
                 std::map<MultiIndex, double>& out) {
  if (dim == a.size()) {
    out[cur] += coef;
    return;
  }
  const int lo = std::abs(a[dim] - b[dim]), hi = a[dim] + b[dim];
  for (int c = lo; c <= hi; c += 2) {
    cur[dim] = c;
    expand_pair(a, b, coef * legendre_triple(a[dim], b[dim], c), dim + 1, cur, out);
  }
}

} // namespace

double legendre_triple(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) return 0.0;
  return triple_table().get(a, b, c);
}

std::map<MultiIndex, double> centered_product_expansion(const PcSurrogate& a, const PcSurrogate& b) {
  if (!(a.space() == b.space())) throw Error("mismatched_space", "surrogates live on different input spaces");
  std::map<MultiIndex, double> out;
  MultiIndex cur(a.space().dims(), 0);
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (a.coeffs()[i] == 0.0) continue;
    for (std::size_t j = 1; j < b.size(); ++j) {
      if (b.coeffs()[j] == 0.0) continue;
      expand_pair(a.indices()[i], b.indices()[j], a.coeffs()[i] * b.coeffs()[j], 0, cur, out);
    }
  }
  return out;
}

double projected_product_covariance(const PcSurrogate& a, const PcSurrogate& b, const PcSurrogate& c,
                                    const PcSurrogate& d) {
  const auto ab = centered_product_expansion(a, b);
  const auto cd = (&a == &c && &b == &d) ? ab : centered_product_expansion(c, d);
  const MultiIndex zero(a.space().dims(), 0);
  double s = 0.0;
  for (const auto& [beta, v] : ab) {
    if (beta == zero) continue;
    const auto it = cd.find(beta);
    if (it != cd.end()) s += v * it->second;
  }
  return s;
}

} // namespace mlcv
