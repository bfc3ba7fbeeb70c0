// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "anisolab/grid.hpp"

namespace anisolab {

/// Scalar weight gamma(x), one of: identically 1, per-axis power |x_k|^{a_k},
/// or a product of user-supplied per-axis positive functions.
///
/// Power weights have two readings. raw_value is the literal |x|^a used for
/// cube averages on the line. periodic_value substitutes the periodic analog
/// (2|sin(pi x/L)| L/(2pi))^a per axis, which agrees with |x|^a near the
/// origin and is what lattice quadrature uses.
class Weight {
 public:
  enum class Kind { unit, power_per_axis, product_form };

  static Weight unit() { return Weight(Kind::unit); }

  static Weight power(std::vector<double> exponents) {
    Weight w(Kind::power_per_axis);
    w.exponents_ = std::move(exponents);
    return w;
  }

  static Weight product_form(std::vector<std::function<double(double)>> per_axis) {
    Weight w(Kind::product_form);
    w.per_axis_ = std::move(per_axis);
    return w;
  }

  Kind kind() const { return kind_; }
  const std::vector<double>& exponents() const { return exponents_; }

  double raw_value(std::span<const double> x) const {
    switch (kind_) {
      case Kind::unit:
        return 1.0;
      case Kind::power_per_axis: {
        double v = 1.0;
        for (std::size_t k = 0; k < x.size(); ++k)
          v *= std::pow(std::abs(x[k]), exponents_[k]);
        return v;
      }
      case Kind::product_form: {
        double v = 1.0;
        for (std::size_t k = 0; k < x.size(); ++k) v *= per_axis_[k](x[k]);
        return v;
      }
    }
    return 1.0;
  }

  double periodic_value(std::span<const double> x, const Grid& grid) const {
    if (kind_ != Kind::power_per_axis) return raw_value(x);
    double v = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double L = grid.periods()[k];
      const double s =
          2.0 * std::abs(std::sin(std::numbers::pi * x[k] / L)) * L / (2.0 * std::numbers::pi);
      v *= std::pow(s, exponents_[k]);
    }
    return v;
  }

  /// Whether the power exponents sit inside the Muckenhoupt range for p.
  bool ap_range_ok(double p) const {
    if (kind_ != Kind::power_per_axis) return true;
    for (double a : exponents_)
      if (!(a > -1.0 && a < p - 1.0)) return false;
    return true;
  }

 private:
  explicit Weight(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::vector<double> exponents_;
  std::vector<std::function<double(double)>> per_axis_;
};

struct MixedExponents {
  std::vector<double> p;
  std::optional<double> p0;
};

inline void validate(const MixedExponents& me, int dim) {
  if (static_cast<int>(me.p.size()) != dim)
    throw DimensionMismatch("exponent vector length must equal grid dimension");
  for (double pk : me.p)
    if (!(pk >= 1.0) || !std::isfinite(pk))
      throw ParameterOutOfRange("mixed exponents must satisfy 1 <= p_k < inf");
  if (me.p0 && (!(*me.p0 >= 1.0) || !std::isfinite(*me.p0)))
    throw ParameterOutOfRange("time exponent must satisfy 1 <= p0 < inf");
}

/// q-norm over the component slot; q = infinity takes the max modulus.
inline double component_norm(std::span<const cx> v, double q) {
  if (std::isinf(q)) {
    double s = 0.0;
    for (const cx& c : v) s = std::max(s, std::abs(c));
    return s;
  }
  double acc = 0.0;
  for (const cx& c : v) acc += std::pow(std::abs(c), q);
  return std::pow(acc, 1.0 / q);
}

/// Iterated mixed norm, innermost axis first, rectangle-rule quadrature.
/// The weight multiplies the innermost measure only. pointwise maps the
/// component vector at a lattice point to its E-norm.
inline double mixed_norm_with(const Field& u, const MixedExponents& me, const Weight& weight,
                              const std::function<double(std::span<const cx>)>& pointwise) {
  if (u.side != Side::physical) throw SideMismatch("mixed_norm expects a physical-side field");
  const Grid& g = u.grid;
  validate(me, g.dim());

  const std::size_t total = g.total_points();
  std::vector<double> a(total);
  for (std::size_t p = 0; p < total; ++p)
    a[p] = pointwise(std::span<const cx>(u.values.data() + p * u.m_components,
                                         static_cast<std::size_t>(u.m_components)));

  std::vector<double> x;
  std::vector<double> next;
  for (int k = 0; k < g.dim(); ++k) {
    const int n = g.sizes()[k];
    const double dx = g.spacing(k);
    const double pk = me.p[k];
    const std::size_t rest = a.size() / n;
    next.assign(rest, 0.0);
    for (std::size_t r = 0; r < rest; ++r) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        double term = std::pow(a[j * rest + r], pk) * dx;
        if (k == 0) {
          g.point(static_cast<std::size_t>(j) * g.strides()[0] + r, x);
          const double w = weight.periodic_value(x, g);
          if (w < 0.0 || std::isnan(w))
            throw NonPositiveWeight("weight is negative or undefined at a lattice point");
          term *= w;
        }
        acc += term;
      }
      next[r] = std::pow(acc, 1.0 / pk);
    }
    a.swap(next);
  }
  return a[0];
}

inline double mixed_norm(const Field& u, const MixedExponents& me, const Weight& weight,
                         double q = 2.0) {
  return mixed_norm_with(u, me, weight,
                         [q](std::span<const cx> v) { return component_norm(v, q); });
}

/// Axis-aligned box inside one period cell.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Muckenhoupt-style estimate: max over the cube family of
/// (avg gamma)(avg gamma^{-1/(p-1)})^{p-1}, averages by tensor midpoint rule
/// on the raw weight. Diverging values under refinement flag an exponent
/// outside the admissible range.
inline double ap_constant_estimate(const Weight& weight, double p, const std::vector<Box>& cubes,
                                   int samples_per_axis = 4096) {
  if (!(p > 1.0) || std::isinf(p))
    throw ParameterOutOfRange("A_p estimate requires p in (1, inf)");
  if (samples_per_axis < 2) throw ParameterOutOfRange("need at least 2 samples per axis");

  double worst = 0.0;
  for (const Box& cube : cubes) {
    const int n = static_cast<int>(cube.lo.size());
    if (n == 0 || cube.hi.size() != cube.lo.size())
      throw DimensionMismatch("cube bounds are inconsistent");
    std::size_t total = 1;
    for (int k = 0; k < n; ++k) {
      if (!(cube.hi[k] > cube.lo[k])) throw ParameterOutOfRange("cube must have positive volume");
      total *= static_cast<std::size_t>(samples_per_axis);
      if (total > (1u << 24)) throw ParameterOutOfRange("cube sample budget exceeded");
    }

    double sum_w = 0.0;
    double sum_winv = 0.0;
    std::vector<double> x(n);
    for (std::size_t s = 0; s < total; ++s) {
      std::size_t rem = s;
      for (int k = 0; k < n; ++k) {
        const std::size_t j = rem % samples_per_axis;
        rem /= samples_per_axis;
        const double h = (cube.hi[k] - cube.lo[k]) / samples_per_axis;
        x[k] = cube.lo[k] + (static_cast<double>(j) + 0.5) * h;
      }
      const double w = weight.raw_value(x);
      if (w <= 0.0 || std::isnan(w))
        throw NonPositiveWeight("weight must be positive inside A_p cubes");
      sum_w += w;
      sum_winv += std::pow(w, -1.0 / (p - 1.0));
    }
    const double avg_w = sum_w / static_cast<double>(total);
    const double avg_winv = sum_winv / static_cast<double>(total);
    worst = std::max(worst, avg_w * std::pow(avg_winv, p - 1.0));
  }
  return worst;
}

}  // namespace anisolab
