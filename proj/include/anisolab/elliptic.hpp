// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "anisolab/norms.hpp"
#include "anisolab/operators.hpp"
#include "anisolab/report.hpp"

namespace anisolab {

/// One lower-order perturbation: the operator
///   prod_k t_k^{alpha_k / 2 l_k} * coeff(x) * A^{theta_power} * D^alpha,
/// admissible while |alpha : 2l| < 1 and theta_power < 1 - |alpha : 2l|.
struct LowerTerm {
  std::vector<int> alpha;
  double theta_power = 0.0;
  std::variant<cx, std::vector<cx>> coeff;
};

struct EllipticProblem {
  DiagOperator a;
  std::vector<double> t;
  cx lambda{0.0, 0.0};
  std::vector<int> l;
  std::vector<LowerTerm> lower_terms;
};

inline double alpha_to_2l_ratio(const std::vector<int>& alpha, const std::vector<int>& l) {
  double r = 0.0;
  for (std::size_t k = 0; k < l.size(); ++k) r += alpha[k] / (2.0 * l[k]);
  return r;
}

inline void validate(const EllipticProblem& prob, const Grid& grid) {
  const int n = grid.dim();
  if (static_cast<int>(prob.t.size()) != n || static_cast<int>(prob.l.size()) != n)
    throw DimensionMismatch("problem parameters must match the grid dimension");
  for (double tk : prob.t)
    if (!(tk > 0.0)) throw ParameterOutOfRange("t_k must be positive");
  for (int lk : prob.l)
    if (lk < 1) throw ParameterOutOfRange("orders l_k must be positive integers");
  for (const LowerTerm& term : prob.lower_terms) {
    if (static_cast<int>(term.alpha.size()) != n)
      throw DimensionMismatch("lower-term multi-index must match the grid dimension");
    for (int ak : term.alpha)
      if (ak < 0) throw ParameterOutOfRange("lower-term orders must be nonnegative");
    const double ratio = alpha_to_2l_ratio(term.alpha, prob.l);
    if (!(ratio < 1.0))
      throw ParameterOutOfRange("lower term must satisfy |alpha : 2l| < 1");
    if (!(term.theta_power < 1.0 - ratio))
      throw ParameterOutOfRange("operator power must satisfy theta < 1 - |alpha : 2l|");
    if (const auto* samples = std::get_if<std::vector<cx>>(&term.coeff))
      if (samples->size() != grid.total_points())
        throw DimensionMismatch("coefficient samples must cover the lattice");
  }
}

namespace detail {

inline double principal_sum(const Grid& g, const std::vector<int>& multi,
                            const std::vector<double>& t, const std::vector<int>& l) {
  double s = 0.0;
  for (int k = 0; k < g.dim(); ++k)
    s += t[k] * std::pow(g.frequency(k, multi[k]), 2 * l[k]);
  return s;
}

}  // namespace detail

/// (principal + A + lambda) u, evaluated spectrally.
inline Field apply_principal(const EllipticProblem& prob, const Field& u) {
  validate(prob, u.grid);
  Field hat = forward_transform(u);
  std::vector<int> multi;
  for (std::size_t p = 0; p < u.grid.total_points(); ++p) {
    u.grid.unflatten(p, multi);
    const double s = detail::principal_sum(u.grid, multi, prob.t, prob.l);
    for (int m = 0; m < hat.m_components; ++m)
      hat.at(p, m) *= s + prob.a.entry(m) + prob.lambda;
  }
  return inverse_transform(hat);
}

/// Sum of the lower-order terms applied to u.
inline Field apply_lower_terms(const EllipticProblem& prob, const Field& u) {
  Field out = make_field(u.grid, u.m_components);
  for (const LowerTerm& term : prob.lower_terms) {
    Field d = spectral_derivative(u, term.alpha);
    double prefactor = 1.0;
    for (std::size_t k = 0; k < prob.t.size(); ++k)
      prefactor *= std::pow(prob.t[k], term.alpha[k] / (2.0 * prob.l[k]));
    for (std::size_t p = 0; p < u.grid.total_points(); ++p) {
      const cx c = std::holds_alternative<cx>(term.coeff)
                       ? std::get<cx>(term.coeff)
                       : std::get<std::vector<cx>>(term.coeff)[p];
      for (int m = 0; m < u.m_components; ++m) {
        const double power = std::pow(prob.a.entry(m), term.theta_power);
        out.at(p, m) += prefactor * c * power * d.at(p, m);
      }
    }
  }
  return out;
}

inline Field apply_full(const EllipticProblem& prob, const Field& u) {
  Field principal = apply_principal(prob, u);
  if (prob.lower_terms.empty()) return principal;
  const Field lower = apply_lower_terms(prob, u);
  axpy(principal, cx(1.0), lower);
  return principal;
}

inline Field residual_field(const EllipticProblem& prob, const Field& u, const Field& f) {
  Field r = apply_full(prob, u);
  axpy(r, cx(-1.0), f);
  return r;
}

namespace detail {

// Per-mode division by the principal denominator; shared by the direct
// solve and the perturbation iteration.
inline Field principal_inverse(const EllipticProblem& prob, const Field& f) {
  Field hat = forward_transform(f);
  std::vector<int> multi;
  for (std::size_t p = 0; p < f.grid.total_points(); ++p) {
    f.grid.unflatten(p, multi);
    const double s = principal_sum(f.grid, multi, prob.t, prob.l);
    for (int m = 0; m < hat.m_components; ++m) {
      const cx den = s + prob.a.entry(m) + prob.lambda;
      if (std::abs(den) <= 1e-14 * (s + prob.a.entry(m) + std::abs(prob.lambda)))
        throw SingularResolvent("principal denominator vanishes at a lattice mode");
      hat.at(p, m) /= den;
    }
  }
  return inverse_transform(hat);
}

}  // namespace detail

/// Direct spectral solve of the principal problem. The returned field
/// satisfies the equation to 1e-10 * ||f||_inf, enforced.
inline Field solve_principal(const Field& f, const EllipticProblem& prob) {
  validate(prob, f.grid);
  if (!prob.lower_terms.empty())
    throw ParameterOutOfRange("solve_principal expects a problem without lower terms");
  Field u = detail::principal_inverse(prob, f);
  const double f_sup = sup_norm(f);
  const double r_sup = sup_norm(residual_field(prob, u, f));
  if (f_sup > 0.0 && r_sup > 1e-10 * f_sup)
    throw ResidualTooLarge("principal solve residual exceeds its contract");
  return u;
}

/// Graded-term table of the coercive estimate and its empirical constant
/// (sum of the graded derivative norms plus ||A u||, against ||f||).
struct CoercivityReport {
  std::vector<std::vector<double>> terms;  // terms[k][i], i = 0..2 l_k
  double au_norm = 0.0;
  double f_norm = 0.0;
  double empirical_constant = 0.0;
  double residual_sup = 0.0;
};

inline CoercivityReport coercivity_report(const Field& u, const Field& f,
                                          const EllipticProblem& prob, const MixedExponents& p,
                                          const Weight& weight,
                                          double residual_tolerance = 1e-8) {
  validate(prob, u.grid);
  const double q = prob.a.q();
  CoercivityReport rep;
  rep.f_norm = mixed_norm(f, p, weight, q);
  if (rep.f_norm == 0.0) throw ZeroField("coercivity report needs a nonzero datum");

  rep.residual_sup = sup_norm(residual_field(prob, u, f));
  if (rep.residual_sup > residual_tolerance * sup_norm(f))
    throw ResidualTooLarge("field does not solve the problem to the required residual");

  const int n = u.grid.dim();
  double total = 0.0;
  rep.terms.resize(n);
  std::vector<int> alpha(n, 0);
  for (int k = 0; k < n; ++k) {
    rep.terms[k].assign(2 * prob.l[k] + 1, 0.0);
    for (int i = 0; i <= 2 * prob.l[k]; ++i) {
      std::fill(alpha.begin(), alpha.end(), 0);
      alpha[k] = i;
      const double grade = static_cast<double>(i) / (2.0 * prob.l[k]);
      const double factor =
          std::pow(prob.t[k], grade) * std::pow(std::abs(prob.lambda), 1.0 - grade);
      const double norm = mixed_norm(spectral_derivative(u, alpha), p, weight, q);
      rep.terms[k][i] = factor * norm;
      total += rep.terms[k][i];
    }
  }

  Field au = u;
  for (std::size_t pt = 0; pt < u.grid.total_points(); ++pt)
    for (int m = 0; m < u.m_components; ++m) au.at(pt, m) *= prob.a.entry(m);
  rep.au_norm = mixed_norm(au, p, weight, q);

  rep.empirical_constant = (total + rep.au_norm) / rep.f_norm;
  return rep;
}

inline double l2_norm(const Field& f) {
  double s = 0.0;
  for (const cx& v : f.values) s += std::norm(v);
  return std::sqrt(s);
}

struct PerturbedSolve {
  Field u;
  std::vector<double> gaps;  // successive-iterate norm gaps, one per iteration
  double rho = 0.0;          // estimated contraction factor
  int iterations = 0;
};

namespace detail {

inline double contraction_estimate(const EllipticProblem& prob, const Grid& grid,
                                   int m_components, const Field& f) {
  CounterRng rng(0x50524f4245ULL);
  double rho = 0.0;
  for (int probe = 0; probe <= 8; ++probe) {
    const Field g = probe == 0 ? f : random_band_limited(grid, m_components, rng);
    const double gn = l2_norm(g);
    if (gn == 0.0) continue;
    const Field mapped = apply_lower_terms(prob, principal_inverse(prob, g));
    rho = std::max(rho, l2_norm(mapped) / gn);
  }
  return rho;
}

}  // namespace detail

/// Fixed-point iteration u_{j+1} = (O_0 + lambda)^{-1} (f - O_1 u_j) for the
/// perturbed problem. Throws NotContractive when the probe-estimated factor
/// reaches 1, carrying the smallest shift on a doubling schedule that brings
/// it under 0.9.
inline PerturbedSolve solve_perturbed(const Field& f, const EllipticProblem& prob,
                                      double tol = 1e-10, int maxit = 200) {
  validate(prob, f.grid);
  const double rho = detail::contraction_estimate(prob, f.grid, f.m_components, f);
  if (rho >= 1.0) {
    std::optional<double> suggestion;
    EllipticProblem shifted = prob;
    double lam = std::max(1.0, std::abs(prob.lambda));
    for (int k = 0; k <= 20; ++k) {
      shifted.lambda = cx(lam);
      if (detail::contraction_estimate(shifted, f.grid, f.m_components, f) < 0.9) {
        suggestion = lam;
        break;
      }
      lam *= 2.0;
    }
    throw NotContractive("perturbation is not contractive at this shift (rho=" +
                             format_number(rho) + ")",
                         rho, suggestion);
  }

  PerturbedSolve out;
  out.rho = rho;
  const double f_l2 = l2_norm(f);
  const double f_sup = sup_norm(f);
  Field u = detail::principal_inverse(prob, f);
  for (int j = 0; j < maxit; ++j) {
    Field rhs = f;
    if (!prob.lower_terms.empty()) axpy(rhs, cx(-1.0), apply_lower_terms(prob, u));
    Field next = detail::principal_inverse(prob, rhs);
    Field diff = next;
    axpy(diff, cx(-1.0), u);
    const double gap = l2_norm(diff);
    out.gaps.push_back(gap);
    u = std::move(next);
    ++out.iterations;
    if (gap <= tol * std::max(f_l2, 1e-300) &&
        sup_norm(residual_field(prob, u, f)) <= 10.0 * tol * std::max(f_sup, 1e-300)) {
      out.u = std::move(u);
      return out;
    }
  }
  throw MaxIterations("perturbation iteration did not converge in " +
                      std::to_string(maxit) + " steps");
}

/// Sweep of the empirical coercivity constant over a shift grid. Each cell
/// takes the worst constant over the probe set; expected singularities
/// surface as status rows rather than exceptions.
inline Report resolvent_sweep(const EllipticProblem& prob_template,
                              const std::vector<cx>& lambdas, const std::vector<Field>& probes,
                              const MixedExponents& p, const Weight& weight) {
  Report rep;
  rep.columns = {"lambda_re", "lambda_im", "empirical_constant", "status"};
  double worst = 0.0, best = std::numeric_limits<double>::infinity();
  for (const cx lambda : lambdas) {
    EllipticProblem prob = prob_template;
    prob.lambda = lambda;
    double cell = 0.0;
    std::string status = "ok";
    try {
      for (const Field& f : probes) {
        const Field u = prob.lower_terms.empty() ? solve_principal(f, prob)
                                                 : solve_perturbed(f, prob).u;
        cell = std::max(cell, coercivity_report(u, f, prob, p, weight).empirical_constant);
      }
      worst = std::max(worst, cell);
      best = std::min(best, cell);
    } catch (const SingularResolvent&) {
      status = "singular";
      cell = std::numeric_limits<double>::quiet_NaN();
    } catch (const NotContractive&) {
      status = "not_contractive";
      cell = std::numeric_limits<double>::quiet_NaN();
    }
    rep.add_row({lambda.real(), lambda.imag(), cell, status});
  }
  rep.summary["max_constant"] = worst;
  rep.summary["min_constant"] = best;
  rep.summary["max_over_min"] = worst / best;
  return rep;
}

}  // namespace anisolab
