// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "anisolab/norms.hpp"
#include "anisolab/rng.hpp"

namespace anisolab {

/// Truncated diagonal positive operator on the q-normed component space:
/// (A v)_m = d_m v_m with d_m > 0, m = 1..M. When built geometrically the
/// growth exponent s with d_m = 2^{s m} is kept alongside.
class DiagOperator {
 public:
  static DiagOperator from_diag(std::vector<double> diag, double q = 2.0) {
    DiagOperator a;
    a.diag_ = std::move(diag);
    a.q_ = q;
    a.validate();
    return a;
  }

  /// d_m = 2^{s m} for m = 1..M.
  static DiagOperator geometric(int m_components, double s, double q = 2.0) {
    std::vector<double> d(m_components);
    for (int m = 0; m < m_components; ++m) d[m] = std::exp2(s * (m + 1));
    DiagOperator a = from_diag(std::move(d), q);
    a.s_ = s;
    return a;
  }

  int components() const { return static_cast<int>(diag_.size()); }
  double q() const { return q_; }
  double entry(int m) const { return diag_[m]; }
  const std::vector<double>& diag() const { return diag_; }
  std::optional<double> growth_exponent() const { return s_; }
  double min_entry() const {
    double v = diag_[0];
    for (double d : diag_) v = std::min(v, d);
    return v;
  }

  std::vector<cx> apply(std::span<const cx> v) const;
  std::vector<cx> resolvent_apply(cx xi, std::span<const cx> v) const;
  std::vector<cx> fractional_apply(double theta, std::span<const cx> v) const;

 private:
  void validate() const {
    if (diag_.empty()) throw InvalidDimension("operator needs at least one entry");
    for (double d : diag_)
      if (!(d > 0.0) || !std::isfinite(d))
        throw ParameterOutOfRange("diagonal entries must be positive and finite");
    if (!(q_ >= 1.0)) throw ParameterOutOfRange("component exponent q must be >= 1");
  }

  std::vector<double> diag_;
  double q_ = 2.0;
  std::optional<double> s_;
};

namespace detail {
inline void check_length(const DiagOperator& a, std::span<const cx> v) {
  if (static_cast<int>(v.size()) != a.components())
    throw DimensionMismatch("vector length must equal the operator size");
}
inline void check_regular(double dm, cx shift) {
  if (std::abs(cx(dm) + shift) <= 1e-14 * (dm + std::abs(shift)))
    throw SingularResolvent("shift hits the spectrum of the diagonal operator");
}
}  // namespace detail

inline std::vector<cx> DiagOperator::apply(std::span<const cx> v) const {
  detail::check_length(*this, v);
  std::vector<cx> out(v.size());
  for (int m = 0; m < components(); ++m) out[m] = diag_[m] * v[m];
  return out;
}

inline std::vector<cx> DiagOperator::resolvent_apply(cx xi, std::span<const cx> v) const {
  detail::check_length(*this, v);
  std::vector<cx> out(v.size());
  for (int m = 0; m < components(); ++m) {
    detail::check_regular(diag_[m], xi);
    out[m] = v[m] / (diag_[m] + xi);
  }
  return out;
}

inline std::vector<cx> DiagOperator::fractional_apply(double theta, std::span<const cx> v) const {
  detail::check_length(*this, v);
  std::vector<cx> out(v.size());
  for (int m = 0; m < components(); ++m) out[m] = std::pow(diag_[m], theta) * v[m];
  return out;
}

/// Operator norm of a diagonal operator on the q-normed space; exact for
/// every q, so no q-dependent branching.
inline double opnorm_diag(std::span<const cx> entries) {
  double s = 0.0;
  for (const cx& e : entries) s = std::max(s, std::abs(e));
  return s;
}

/// Sampled sector { r e^{i a} : r in radii, |a| <= phi } plus the origin.
struct Sector {
  double phi = 0.0;
  std::vector<double> radii;
  std::vector<double> angles;

  static std::vector<double> log_radii(double r_min, double r_max, int count) {
    std::vector<double> r(count);
    const double lo = std::log(r_min), hi = std::log(r_max);
    for (int i = 0; i < count; ++i)
      r[i] = std::exp(lo + (hi - lo) * i / std::max(1, count - 1));
    return r;
  }

  static Sector make(double phi, std::vector<double> radii, std::vector<double> angles) {
    if (!(phi >= 0.0) || phi >= std::numbers::pi)
      throw ParameterOutOfRange("sector half-angle must lie in [0, pi)");
    for (double a : angles)
      if (std::abs(a) > phi + 1e-15)
        throw ParameterOutOfRange("sampled angle falls outside the sector");
    if (radii.empty() || angles.empty())
      throw ParameterOutOfRange("sector sampling must be non-empty");
    return Sector{phi, std::move(radii), std::move(angles)};
  }

  std::vector<cx> samples() const {
    std::vector<cx> xs;
    xs.reserve(radii.size() * angles.size() + 1);
    xs.emplace_back(0.0, 0.0);
    for (double r : radii)
      for (double a : angles) xs.emplace_back(r * std::cos(a), r * std::sin(a));
    return xs;
  }
};

/// Empirical positivity constant: max over sampled xi of
/// (1 + |xi|) * ||(A + xi)^{-1}||.
inline double positivity_constant(const DiagOperator& a, const Sector& sector) {
  double worst = 0.0;
  std::vector<cx> resolvent(a.components());
  for (const cx xi : sector.samples()) {
    for (int m = 0; m < a.components(); ++m) {
      detail::check_regular(a.entry(m), xi);
      resolvent[m] = 1.0 / (a.entry(m) + xi);
    }
    worst = std::max(worst, (1.0 + std::abs(xi)) * opnorm_diag(resolvent));
  }
  return worst;
}

/// Quadrature parameters for the canonical interpolation-space integral.
struct InterpParams {
  double theta = 0.5;
  double sigma = 2.0;
  double y_min = 1e-6;
  double y_max = 1e6;
  int points = 200;
};

inline void validate(const InterpParams& ip) {
  if (!(ip.theta > 0.0 && ip.theta < 1.0))
    throw ParameterOutOfRange("interpolation index theta must lie in (0, 1)");
  if (!(ip.sigma >= 1.0) || std::isinf(ip.sigma))
    throw ParameterOutOfRange("interpolation exponent sigma must lie in [1, inf)");
  if (!(ip.y_min > 0.0) || !(ip.y_min <= 1.0 && 1.0 <= ip.y_max))
    throw ParameterOutOfRange("y-grid must straddle 1");
  if (ip.points < 8) throw ParameterOutOfRange("y-grid needs at least 8 points");
}

/// Canonical integral form of the interpolation-space norm:
/// ( int ||y^{1-theta-1/sigma} A^theta (A+y)^{-1} v||_q^sigma dy )^{1/sigma},
/// trapezoid in log y.
inline double interpolation_norm(const DiagOperator& a, std::span<const cx> v,
                                 const InterpParams& ip) {
  validate(ip);
  detail::check_length(a, v);
  if (ip.y_max / ip.y_min < 1e4)
    throw DegenerateGrid("y-grid spans fewer than four decades");

  const double lo = std::log(ip.y_min), hi = std::log(ip.y_max);
  const double du = (hi - lo) / (ip.points - 1);
  const double power = ip.sigma * (1.0 - ip.theta - 1.0 / ip.sigma);

  std::vector<cx> w(v.size());
  double integral = 0.0;
  for (int i = 0; i < ip.points; ++i) {
    const double y = std::exp(lo + i * du);
    for (int m = 0; m < a.components(); ++m) {
      const double d = a.entry(m);
      w[m] = std::pow(d, ip.theta) / (d + y) * v[m];
    }
    const double g = std::pow(y, power) * std::pow(component_norm(w, a.q()), ip.sigma) * y;
    integral += (i == 0 || i == ip.points - 1) ? 0.5 * g * du : g * du;
  }
  return std::pow(integral, 1.0 / ip.sigma);
}

/// Realized target-space norm ||A^{1-theta} v||_q + ||v||_q.
inline double interpolation_norm_realized(const DiagOperator& a, std::span<const cx> v,
                                          double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw ParameterOutOfRange("interpolation index theta must lie in (0, 1)");
  const std::vector<cx> w = a.fractional_apply(1.0 - theta, v);
  return component_norm(w, a.q()) + component_norm(v, a.q());
}

/// Randomized-sum boundedness ratio
///   E || sum_j r_j T_j f_j ||_q / E || sum_j r_j f_j ||_q
/// with exact sign enumeration for families of size <= 12 and fixed-seed
/// Monte Carlo above.
inline double r_bound_estimate(const std::vector<DiagOperator>& ops,
                               const std::vector<std::vector<cx>>& vectors, int trials = 4096) {
  if (ops.empty() || ops.size() != vectors.size())
    throw DimensionMismatch("operator and vector families must match and be non-empty");
  const int m = static_cast<int>(ops.size());
  const int comps = ops[0].components();
  const double q = ops[0].q();
  for (int j = 0; j < m; ++j) {
    if (ops[j].components() != comps)
      throw DimensionMismatch("all operators must share the component count");
    detail::check_length(ops[j], vectors[j]);
  }
  bool any_nonzero = false;
  for (const auto& f : vectors)
    for (const cx& c : f)
      if (c != cx{0.0, 0.0}) any_nonzero = true;
  if (!any_nonzero) throw ZeroDenominator("all vectors in the family are zero");

  std::vector<std::vector<cx>> transformed(m);
  for (int j = 0; j < m; ++j) transformed[j] = ops[j].apply(vectors[j]);

  std::vector<cx> num(comps), den(comps);
  double num_sum = 0.0, den_sum = 0.0;
  const auto accumulate = [&](const std::vector<int>& signs) {
    std::fill(num.begin(), num.end(), cx{0.0, 0.0});
    std::fill(den.begin(), den.end(), cx{0.0, 0.0});
    for (int j = 0; j < m; ++j) {
      const double s = signs[j] ? 1.0 : -1.0;
      for (int c = 0; c < comps; ++c) {
        num[c] += s * transformed[j][c];
        den[c] += s * vectors[j][c];
      }
    }
    num_sum += component_norm(num, q);
    den_sum += component_norm(den, q);
  };

  std::vector<int> signs(m);
  if (m <= 12) {
    for (unsigned long mask = 0; mask < (1ul << m); ++mask) {
      for (int j = 0; j < m; ++j) signs[j] = (mask >> j) & 1;
      accumulate(signs);
    }
  } else {
    CounterRng rng(0x52424f554e44ULL);  // fixed stream, independent of callers
    for (int t = 0; t < trials; ++t) {
      for (int j = 0; j < m; ++j) signs[j] = rng.next_u64() & 1;
      accumulate(signs);
    }
  }
  return num_sum / den_sum;
}

}  // namespace anisolab
