// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "anisolab/operators.hpp"

namespace anisolab {

/// kappa = sum_k (alpha_k + sigma_k) / l_k.
inline double kappa_index(const std::vector<int>& alpha, const std::vector<int>& l,
                          const std::vector<double>& sigma) {
  if (alpha.size() != l.size() || sigma.size() != l.size())
    throw DimensionMismatch("alpha, l and sigma must share a length");
  double k = 0.0;
  for (std::size_t j = 0; j < l.size(); ++j) {
    if (l[j] < 1) throw ParameterOutOfRange("orders l_k must be positive integers");
    k += (alpha[j] + sigma[j]) / static_cast<double>(l[j]);
  }
  return k;
}

/// T(t) = prod_k t_k^{(alpha_k + sigma_k)/l_k}.
inline double t_factor(const std::vector<double>& t, const std::vector<int>& alpha,
                       const std::vector<int>& l, const std::vector<double>& sigma) {
  if (t.size() != alpha.size() || alpha.size() != l.size() || sigma.size() != l.size())
    throw DimensionMismatch("t, alpha, l and sigma must share a length");
  double f = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] > 0.0)) throw ParameterOutOfRange("parameters t_k must be positive");
    f *= std::pow(t[k], (alpha[k] + sigma[k]) / static_cast<double>(l[k]));
  }
  return f;
}

/// Parameter tuple shared by the multiplier symbols. Construction checks
/// t_k, h > 0, sigma_k >= 0 and 0 <= mu <= 1 - kappa.
struct SymbolParams {
  std::vector<double> t;
  double h = 1.0;
  double mu = 0.0;
  cx lambda{0.0, 0.0};
  std::vector<int> l;
  std::vector<int> alpha;
  std::vector<double> sigma;

  double kappa() const { return kappa_index(alpha, l, sigma); }

  static SymbolParams make(std::vector<double> t, double h, double mu, cx lambda,
                           std::vector<int> l, std::vector<int> alpha,
                           std::vector<double> sigma) {
    SymbolParams sp{std::move(t), h, mu, lambda, std::move(l), std::move(alpha),
                    std::move(sigma)};
    const std::size_t n = sp.l.size();
    if (sp.t.size() != n || sp.alpha.size() != n || sp.sigma.size() != n)
      throw DimensionMismatch("symbol parameter vectors must share a length");
    for (double tk : sp.t)
      if (!(tk > 0.0)) throw ParameterOutOfRange("t_k must be positive");
    if (!(sp.h > 0.0)) throw ParameterOutOfRange("h must be positive");
    for (double sk : sp.sigma)
      if (sk < 0.0) throw ParameterOutOfRange("sigma_k must be nonnegative");
    for (int ak : sp.alpha)
      if (ak < 0) throw ParameterOutOfRange("alpha_k must be nonnegative");
    const double kap = sp.kappa();
    if (!(sp.mu >= 0.0 && sp.mu <= 1.0 - kap + 1e-15))
      throw ParameterOutOfRange("mu must satisfy 0 <= mu <= 1 - kappa");
    return sp;
  }
};

/// Bounded symbol behind the embedding estimate:
///   Psi(xi) = T(t) |xi|^{alpha+sigma} A^{1-kappa-mu} h^{-mu}
///             [ A + sum_k t_k |xi_k|^{l_k} + 1/h ]^{-1},
/// evaluated entrywise on the diagonal of A.
inline std::vector<cx> psi_symbol(std::span<const double> xi, const SymbolParams& sp,
                                  const DiagOperator& a) {
  if (xi.size() != sp.l.size()) throw DimensionMismatch("frequency dimension mismatch");
  const double kap = sp.kappa();
  double magnitude = t_factor(sp.t, sp.alpha, sp.l, sp.sigma) * std::pow(sp.h, -sp.mu);
  for (std::size_t k = 0; k < xi.size(); ++k)
    magnitude *= std::pow(std::abs(xi[k]), sp.alpha[k] + sp.sigma[k]);
  double shift = 1.0 / sp.h;
  for (std::size_t k = 0; k < xi.size(); ++k)
    shift += sp.t[k] * std::pow(std::abs(xi[k]), sp.l[k]);

  std::vector<cx> out(a.components());
  for (int m = 0; m < a.components(); ++m) {
    const double d = a.entry(m);
    out[m] = magnitude * std::pow(d, 1.0 - kap - sp.mu) / (d + shift);
  }
  return out;
}

/// Resolvent symbol of the principal part: (A + lambda + sum t_k xi_k^{2 l_k})^{-1}.
inline std::vector<cx> principal_symbol(std::span<const double> xi, cx lambda,
                                        const std::vector<double>& t, const std::vector<int>& l,
                                        const DiagOperator& a) {
  if (xi.size() != l.size() || t.size() != l.size())
    throw DimensionMismatch("frequency dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) s += t[k] * std::pow(xi[k], 2 * l[k]);
  std::vector<cx> out(a.components());
  for (int m = 0; m < a.components(); ++m) {
    const double d = a.entry(m);
    const cx den = d + lambda + s;
    if (std::abs(den) <= 1e-14 * (d + std::abs(lambda) + s))
      throw SingularResolvent("principal symbol denominator vanishes");
    out[m] = 1.0 / den;
  }
  return out;
}

/// Graded term t_k^{i/2l_k} |lambda|^{1-i/2l_k} xi_k^i (A+lambda+sum ...)^{-1}.
inline std::vector<cx> coercive_symbol_term(std::span<const double> xi, cx lambda,
                                            const std::vector<double>& t,
                                            const std::vector<int>& l, int axis, int order,
                                            const DiagOperator& a) {
  if (axis < 0 || axis >= static_cast<int>(l.size()))
    throw DimensionMismatch("axis index out of range");
  if (order < 0 || order > 2 * l[axis])
    throw ParameterOutOfRange("derivative order must satisfy 0 <= i <= 2 l_k");
  const double grade = static_cast<double>(order) / (2.0 * l[axis]);
  const double factor = std::pow(t[axis], grade) * std::pow(std::abs(lambda), 1.0 - grade) *
                        std::pow(xi[axis], order);
  std::vector<cx> out = principal_symbol(xi, lambda, t, l, a);
  for (cx& v : out) v *= factor;
  return out;
}

using SymbolFn = std::function<std::vector<cx>(std::span<const double>)>;
using SymbolDerivativeFn =
    std::function<std::vector<cx>(std::span<const double>, const std::vector<int>&)>;

/// Cartesian sample set for the multiplier condition; per-axis coordinate
/// lists, none of which may touch xi_k = 0.
struct SymbolGrid {
  std::vector<std::vector<double>> per_axis;

  /// Signed dyadic coordinates { +-2^{j/per_octave} } covering
  /// 2^{j_min} .. 2^{j_max} on every axis.
  static SymbolGrid dyadic(int dim, int j_min = -10, int j_max = 10, int per_octave = 1) {
    SymbolGrid g;
    g.per_axis.resize(dim);
    for (int k = 0; k < dim; ++k) {
      for (int j = j_min * per_octave; j <= j_max * per_octave; ++j) {
        const double mag = std::exp2(static_cast<double>(j) / per_octave);
        g.per_axis[k].push_back(mag);
        g.per_axis[k].push_back(-mag);
      }
    }
    return g;
  }

  std::size_t total() const {
    std::size_t n = 1;
    for (const auto& axis : per_axis) n *= axis.size();
    return n;
  }
};

namespace detail {

inline std::vector<cx> symbol_derivative_fd(const SymbolFn& symbol, std::span<const double> xi,
                                            const std::vector<int>& beta) {
  std::vector<int> active;
  for (std::size_t k = 0; k < beta.size(); ++k)
    if (beta[k] == 1) active.push_back(static_cast<int>(k));

  std::vector<double> point(xi.begin(), xi.end());
  if (active.empty()) return symbol(point);

  double denom = 1.0;
  std::vector<double> step(active.size());
  for (std::size_t j = 0; j < active.size(); ++j) {
    step[j] = 1e-4 * std::abs(xi[active[j]]);
    denom *= 2.0 * step[j];
  }

  std::vector<cx> acc;
  for (unsigned corner = 0; corner < (1u << active.size()); ++corner) {
    double sign = 1.0;
    for (std::size_t j = 0; j < active.size(); ++j) {
      const double eps = (corner >> j) & 1 ? 1.0 : -1.0;
      point[active[j]] = xi[active[j]] + eps * step[j];
      sign *= eps;
    }
    std::vector<cx> v = symbol(point);
    if (acc.empty()) acc.assign(v.size(), cx{0.0, 0.0});
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += sign * v[i];
    for (std::size_t j = 0; j < active.size(); ++j) point[active[j]] = xi[active[j]];
  }
  for (cx& v : acc) v /= denom;
  return acc;
}

}  // namespace detail

/// Numerical check of the Mikhlin-type bound: returns
///   max over the grid of prod_k |xi_k|^{beta_k + sigma_k} ||D^beta Psi(xi)||,
/// derivatives by nested central differences with per-axis step 1e-4 |xi_k|
/// unless an analytic derivative callback is supplied.
inline double mikhlin_sup(const SymbolFn& symbol, const std::vector<int>& beta,
                          const std::vector<double>& sigma, const SymbolGrid& grid,
                          const SymbolDerivativeFn& analytic = nullptr) {
  const int n = static_cast<int>(grid.per_axis.size());
  if (static_cast<int>(beta.size()) != n || static_cast<int>(sigma.size()) != n)
    throw DimensionMismatch("beta and sigma must match the grid dimension");
  for (int b : beta)
    if (b != 0 && b != 1) throw ParameterOutOfRange("beta components must be 0 or 1");
  for (const auto& axis : grid.per_axis)
    for (double c : axis)
      if (c == 0.0) throw GridTouchesAxis("sample grid touches a coordinate axis");

  std::vector<std::size_t> idx(n, 0);
  std::vector<double> xi(n);
  double sup = 0.0;
  const std::size_t total = grid.total();
  for (std::size_t count = 0; count < total; ++count) {
    std::size_t rem = count;
    for (int k = 0; k < n; ++k) {
      idx[k] = rem % grid.per_axis[k].size();
      rem /= grid.per_axis[k].size();
      xi[k] = grid.per_axis[k][idx[k]];
    }
    const std::vector<cx> d =
        analytic ? analytic(xi, beta) : detail::symbol_derivative_fd(symbol, xi, beta);
    double scale = 1.0;
    for (int k = 0; k < n; ++k) scale *= std::pow(std::abs(xi[k]), beta[k] + sigma[k]);
    sup = std::max(sup, scale * opnorm_diag(d));
  }
  return sup;
}

}  // namespace anisolab
