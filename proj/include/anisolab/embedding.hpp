// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "anisolab/symbols.hpp"

namespace anisolab {

inline std::vector<double> sigma_vec(const MixedExponents& p, const MixedExponents& q) {
  if (p.p.size() != q.p.size()) throw DimensionMismatch("p and q must share a length");
  std::vector<double> s(p.p.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k] = 1.0 / p.p[k] - 1.0 / q.p[k];
    if (s[k] < -1e-15) throw ParameterOutOfRange("exponents must satisfy p_k <= q_k");
    s[k] = std::max(s[k], 0.0);
  }
  return s;
}

/// kappa = sum_k (alpha_k + 1/p_k - 1/q_k) / l_k.
inline double kappa(const std::vector<int>& alpha, const std::vector<int>& l,
                    const MixedExponents& p, const MixedExponents& q) {
  return kappa_index(alpha, l, sigma_vec(p, q));
}

/// Everything the embedding estimates consume. The component space and its
/// exponent ride on the operator; p and q are the spatial exponents.
struct EmbeddingParams {
  std::vector<int> alpha;
  std::vector<int> l;
  MixedExponents p;
  MixedExponents q;
  double mu = 0.0;
  std::vector<double> t;
  double h = 1.0;
  DiagOperator a;
  Weight weight = Weight::unit();

  double kappa_value() const { return kappa(alpha, l, p, q); }
};

inline void validate(const EmbeddingParams& ep, const Grid& grid) {
  const int n = grid.dim();
  if (static_cast<int>(ep.alpha.size()) != n || static_cast<int>(ep.l.size()) != n ||
      static_cast<int>(ep.t.size()) != n)
    throw DimensionMismatch("embedding parameters must match the grid dimension");
  validate(ep.p, n);
  validate(ep.q, n);
  const double kap = ep.kappa_value();
  if (kap > 1.0 + 1e-15) throw ParameterOutOfRange("kappa must not exceed 1");
  if (!(ep.mu >= 0.0 && ep.mu <= 1.0 - kap + 1e-15))
    throw ParameterOutOfRange("mu must satisfy 0 <= mu <= 1 - kappa");
  if (!(ep.h > 0.0)) throw ParameterOutOfRange("h must be positive");
  for (double tk : ep.t)
    if (!(tk > 0.0)) throw ParameterOutOfRange("t_k must be positive");
}

namespace detail {

// pointwise E(A^theta) graph norm ||A^theta v|| + ||v||
inline std::function<double(std::span<const cx>)> graph_norm_fn(const DiagOperator& a,
                                                                double theta) {
  return [&a, theta](std::span<const cx> v) {
    const std::vector<cx> powered = a.fractional_apply(theta, v);
    return component_norm(powered, a.q()) + component_norm(v, a.q());
  };
}

}  // namespace detail

/// Parametrized Sobolev-style norm ||u||_{E(A)} + sum_k || t_k D_k^{l_k} u ||.
inline double sobolev_norm(const Field& u, const EmbeddingParams& ep) {
  double norm = mixed_norm_with(u, ep.p, ep.weight, detail::graph_norm_fn(ep.a, 1.0));
  std::vector<int> alpha(u.grid.dim(), 0);
  for (int k = 0; k < u.grid.dim(); ++k) {
    std::fill(alpha.begin(), alpha.end(), 0);
    alpha[k] = ep.l[k];
    norm += ep.t[k] * mixed_norm(spectral_derivative(u, alpha), ep.p, ep.weight, ep.a.q());
  }
  return norm;
}

struct EmbeddingReport {
  double lhs = 0.0;
  double sobolev = 0.0;
  double lebesgue = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// Two-sided evaluation of the graded embedding estimate: the weighted
/// q-norm of D^alpha u in the E(A^{1-kappa-mu}) graph norm, against
/// h^mu ||u||_{W,t} + h^{-(1-mu)} ||u||_{L_p}.
inline EmbeddingReport embedding_inequality_report(const Field& u, const EmbeddingParams& ep) {
  validate(ep, u.grid);
  const double kap = ep.kappa_value();
  const double theta = 1.0 - kap - ep.mu;
  const std::vector<double> sigma = sigma_vec(ep.p, ep.q);

  EmbeddingReport rep;
  const Field d = spectral_derivative(u, ep.alpha);
  rep.lhs = t_factor(ep.t, ep.alpha, ep.l, sigma) *
            mixed_norm_with(d, ep.q, ep.weight, detail::graph_norm_fn(ep.a, theta));
  rep.sobolev = sobolev_norm(u, ep);
  rep.lebesgue = mixed_norm(u, ep.p, ep.weight, ep.a.q());
  rep.rhs = std::pow(ep.h, ep.mu) * rep.sobolev +
            std::pow(ep.h, -(1.0 - ep.mu)) * rep.lebesgue;
  rep.ratio = rep.rhs == 0.0 ? 0.0 : rep.lhs / rep.rhs;
  return rep;
}

struct MultiplicativeReport {
  double lhs = 0.0;
  double sobolev = 0.0;
  double lebesgue = 0.0;
  double h_star = 0.0;
  double constant = 0.0;
};

/// Interpolation-free form: the empirical constant of
///   T(t) ||D^alpha u||  <=  C ||u||_W^{1-mu} ||u||_{L_p}^mu,
/// obtained by substituting the balancing h* = ||u||_{L_p} / ||u||_W.
inline MultiplicativeReport multiplicative_report(const Field& u, const EmbeddingParams& ep) {
  validate(ep, u.grid);
  const double kap = ep.kappa_value();
  const double theta = 1.0 - kap - ep.mu;
  const std::vector<double> sigma = sigma_vec(ep.p, ep.q);

  MultiplicativeReport rep;
  rep.lebesgue = mixed_norm(u, ep.p, ep.weight, ep.a.q());
  if (rep.lebesgue == 0.0) throw ZeroField("multiplicative estimate needs a nonzero field");
  rep.sobolev = sobolev_norm(u, ep);
  rep.h_star = rep.lebesgue / rep.sobolev;

  const Field d = spectral_derivative(u, ep.alpha);
  rep.lhs = t_factor(ep.t, ep.alpha, ep.l, sigma) *
            mixed_norm_with(d, ep.q, ep.weight, detail::graph_norm_fn(ep.a, theta));
  rep.constant =
      rep.lhs / (std::pow(rep.sobolev, 1.0 - ep.mu) * std::pow(rep.lebesgue, ep.mu));
  return rep;
}

struct InterpolationEmbeddingReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
};

/// Embedding into the interpolation-space target: the spatial q-norm of the
/// pointwise interpolation norm of D^alpha u, with index theta = kappa + mu.
/// The pointwise norm is the canonical integral, or the realized
/// ||A^{1-theta} v|| + ||v|| when realized is set.
inline InterpolationEmbeddingReport interpolation_embedding_report(const Field& u,
                                                                   const EmbeddingParams& ep,
                                                                   double sigma_exponent,
                                                                   bool realized = false) {
  validate(ep, u.grid);
  const double kap = ep.kappa_value();
  if (!(ep.mu > 0.0 && ep.mu < 1.0 - kap))
    throw ParameterOutOfRange("interpolation embedding needs 0 < mu < 1 - kappa");
  const double theta = kap + ep.mu;

  InterpParams ip;
  ip.theta = theta;
  ip.sigma = sigma_exponent;
  const auto pointwise = [&](std::span<const cx> v) {
    return realized ? interpolation_norm_realized(ep.a, v, theta)
                    : interpolation_norm(ep.a, v, ip);
  };

  InterpolationEmbeddingReport rep;
  const Field d = spectral_derivative(u, ep.alpha);
  rep.lhs = mixed_norm_with(d, ep.q, ep.weight, pointwise);
  rep.rhs = std::pow(ep.h, ep.mu) * sobolev_norm(u, ep) +
            std::pow(ep.h, -(1.0 - ep.mu)) * mixed_norm(u, ep.p, ep.weight, ep.a.q());
  rep.constant = rep.rhs == 0.0 ? 0.0 : rep.lhs / rep.rhs;
  return rep;
}

}  // namespace anisolab
