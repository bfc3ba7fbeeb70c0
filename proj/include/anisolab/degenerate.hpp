// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "anisolab/elliptic.hpp"

namespace anisolab {

/// One strictly positive smooth periodic coefficient gamma_k, given in
/// closed form or as nodal samples.
class AxisWeight {
 public:
  static AxisWeight constant(double c) {
    AxisWeight w;
    w.kind_ = Kind::constant;
    w.c_ = c;
    return w;
  }

  /// gamma(x) = 1 / (1 + a cos(2 pi x / L)), |a| < 1.
  static AxisWeight cosine_form(double a) {
    AxisWeight w;
    w.kind_ = Kind::cosine_form;
    w.a_ = a;
    return w;
  }

  static AxisWeight table(std::vector<double> samples) {
    AxisWeight w;
    w.kind_ = Kind::table;
    w.samples_ = std::move(samples);
    return w;
  }

  double value_at_node(int j, int axis_size, double period) const {
    switch (kind_) {
      case Kind::constant:
        return c_;
      case Kind::cosine_form: {
        const double x = period * j / axis_size;
        return 1.0 / (1.0 + a_ * std::cos(2.0 * std::numbers::pi * x / period));
      }
      case Kind::table:
        if (static_cast<int>(samples_.size()) != axis_size)
          throw DimensionMismatch("weight table does not match the axis size");
        return samples_[j];
    }
    return c_;
  }

 private:
  enum class Kind { constant, cosine_form, table };
  Kind kind_ = Kind::constant;
  double c_ = 1.0;
  double a_ = 0.0;
  std::vector<double> samples_;
};

struct DegWeight {
  std::vector<AxisWeight> axes;

  static DegWeight identity(int dim) {
    return DegWeight{std::vector<AxisWeight>(dim, AxisWeight::constant(1.0))};
  }
};

/// Monotone coordinate change tau(x) = int_0^x gamma^{-1}, held spectrally:
/// tau(x) = mean * x + sum of oscillatory modes of gamma^{-1}. forward and
/// derivative evaluate anywhere; inverse runs Newton off the node table.
class SubstitutionMap {
 public:
  double new_period() const { return new_period_; }
  double source_period() const { return source_period_; }
  const std::vector<double>& node_values() const { return node_values_; }

  double forward(double x) const {
    double tau = mean_ * x;
    for (std::size_t b = 0; b < mode_freq_.size(); ++b) {
      const cx e = std::exp(cx(0.0, mode_freq_[b] * x)) - 1.0;
      tau += (mode_coef_[b] * e / cx(0.0, mode_freq_[b])).real();
    }
    return tau;
  }

  double derivative(double x) const {
    cx g = mean_;
    for (std::size_t b = 0; b < mode_freq_.size(); ++b)
      g += mode_coef_[b] * std::exp(cx(0.0, mode_freq_[b] * x));
    return g.real();
  }

  double inverse(double tau) const {
    // periodic reduction keeps Newton inside one cell
    const double cell = std::floor(tau / new_period_);
    const double tau0 = tau - cell * new_period_;
    std::size_t lo = 0;
    for (std::size_t j = 1; j < node_values_.size(); ++j)
      if (node_values_[j] <= tau0) lo = j;
    double x = source_period_ * (static_cast<double>(lo) + 0.5) /
               static_cast<double>(node_values_.size());
    for (int it = 0; it < 60; ++it) {
      const double f = forward(x) - tau0;
      if (std::abs(f) <= 1e-13 * std::max(1.0, new_period_)) break;
      x -= f / derivative(x);
    }
    return x + cell * source_period_;
  }

  friend SubstitutionMap substitution(const AxisWeight& gamma, const Grid& grid, int axis);

 private:
  double mean_ = 1.0;
  double source_period_ = 0.0;
  double new_period_ = 0.0;
  std::vector<double> mode_freq_;
  std::vector<cx> mode_coef_;
  std::vector<double> node_values_;
};

/// Accumulates tau_k = int_0^x gamma_k^{-1} along one grid axis via the
/// spectral antiderivative of the sampled integrand; exact whenever
/// gamma^{-1} is band-limited on the axis.
inline SubstitutionMap substitution(const AxisWeight& gamma, const Grid& grid, int axis) {
  const int n = grid.sizes()[axis];
  const double period = grid.periods()[axis];

  Field line = make_field(make_grid(1, {n}, {period}), 1);
  for (int j = 0; j < n; ++j) {
    const double g = gamma.value_at_node(j, n, period);
    if (!(g > 0.0)) throw NonPositiveWeight("degenerate weight must be strictly positive");
    line.at(j, 0) = 1.0 / g;
  }
  const Field hat = forward_transform(line);

  SubstitutionMap map;
  map.source_period_ = period;
  map.mean_ = hat.at(0, 0).real();
  map.new_period_ = map.mean_ * period;
  for (int b = 1; b < n; ++b) {
    if (std::abs(hat.at(b, 0)) < 1e-15) continue;
    map.mode_freq_.push_back(line.grid.frequency(0, b));
    map.mode_coef_.push_back(hat.at(b, 0));
  }
  map.node_values_.resize(n);
  for (int j = 0; j < n; ++j) {
    map.node_values_[j] = map.forward(grid.node(axis, j));
    if (j > 0 && !(map.node_values_[j] > map.node_values_[j - 1]))
      throw NonPositiveWeight("substitution map lost monotonicity");
  }
  return map;
}

/// (gamma_k(x_k) d/dx_k)^i u, alternating the spectral derivative along
/// axis k with the pointwise multiplication.
inline Field degenerate_derivative(const Field& u, const DegWeight& gamma, int axis, int order) {
  if (order < 1) throw ParameterOutOfRange("degenerate derivative order must be >= 1");
  if (axis < 0 || axis >= u.grid.dim()) throw DimensionMismatch("axis out of range");
  if (static_cast<int>(gamma.axes.size()) != u.grid.dim())
    throw DimensionMismatch("weight must cover every axis");

  const int n = u.grid.sizes()[axis];
  const double period = u.grid.periods()[axis];
  std::vector<double> nodal(n);
  for (int j = 0; j < n; ++j) nodal[j] = gamma.axes[axis].value_at_node(j, n, period);

  std::vector<int> e(u.grid.dim(), 0);
  e[axis] = 1;
  std::vector<int> multi;
  Field w = u;
  for (int step = 0; step < order; ++step) {
    w = spectral_derivative(w, e);
    for (std::size_t p = 0; p < u.grid.total_points(); ++p) {
      u.grid.unflatten(p, multi);
      const double g = nodal[multi[axis]];
      for (int m = 0; m < w.m_components; ++m) w.at(p, m) *= g;
    }
  }
  return w;
}

enum class MapDirection { x_to_tau, tau_to_x };

namespace detail {

// Trigonometric resampling of one axis at arbitrary coordinates given in
// the source axis units.
inline Field resample_axis(const Field& u, int axis, const std::vector<double>& coords,
                           double new_period) {
  const Grid& g = u.grid;
  const int n = g.sizes()[axis];
  if (static_cast<int>(coords.size()) != n)
    throw DimensionMismatch("resample coordinates must match the axis size");

  std::vector<std::vector<cx>> kernel(n, std::vector<cx>(n));
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < n; ++b)
      kernel[i][b] = std::exp(cx(0.0, g.frequency(axis, b) * coords[i]));

  std::vector<int> sizes = g.sizes();
  std::vector<double> periods = g.periods();
  periods[axis] = new_period;
  Field out = make_field(make_grid(g.dim(), sizes, periods), u.m_components);

  // spectral along the resampled axis only
  Field work = u;
  work.side = Side::physical;
  detail::transform_axis(work, axis, false);
  const double scale = 1.0 / n;

  const std::size_t point_stride = g.strides()[axis];
  const std::size_t stride = point_stride * u.m_components;
  const std::size_t block = stride * n;
  for (std::size_t base = 0; base < work.values.size(); base += block) {
    for (std::size_t within = 0; within < stride; ++within) {
      const std::size_t start = base + within;
      for (int i = 0; i < n; ++i) {
        cx acc{0.0, 0.0};
        for (int b = 0; b < n; ++b) acc += kernel[i][b] * work.values[start + b * stride];
        out.values[start + i * stride] = acc * scale;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Resample a field between the x and tau coordinates of a per-axis
/// substitution, by trigonometric interpolation of the source samples.
inline Field transform_field(const Field& u, const std::vector<SubstitutionMap>& maps,
                             MapDirection direction) {
  if (u.side != Side::physical) throw SideMismatch("transform_field expects physical samples");
  if (static_cast<int>(maps.size()) != u.grid.dim())
    throw DimensionMismatch("need one substitution map per axis");

  Field out = u;
  for (int k = 0; k < u.grid.dim(); ++k) {
    const SubstitutionMap& map = maps[k];
    const int n = out.grid.sizes()[k];
    std::vector<double> coords(n);
    double new_period = 0.0;
    if (direction == MapDirection::x_to_tau) {
      new_period = map.new_period();
      for (int i = 0; i < n; ++i) coords[i] = map.inverse(new_period * i / n);
    } else {
      new_period = map.source_period();
      for (int i = 0; i < n; ++i) coords[i] = map.forward(new_period * i / n);
    }
    out = detail::resample_axis(out, k, coords, new_period);
  }
  return out;
}

/// Solve the degenerate problem by mapping to the regular one: transform the
/// datum to tau coordinates, divide by the principal symbol there, and map
/// the solution back.
inline Field solve_degenerate(const Field& f, const DiagOperator& a,
                              const std::vector<double>& t, cx lambda,
                              const std::vector<int>& l, const DegWeight& gamma) {
  if (static_cast<int>(gamma.axes.size()) != f.grid.dim())
    throw DimensionMismatch("weight must cover every axis");
  std::vector<SubstitutionMap> maps;
  maps.reserve(f.grid.dim());
  for (int k = 0; k < f.grid.dim(); ++k) maps.push_back(substitution(gamma.axes[k], f.grid, k));

  const Field f_tau = transform_field(f, maps, MapDirection::x_to_tau);
  const EllipticProblem prob{a, t, lambda, l, {}};
  const Field u_tau = solve_principal(f_tau, prob);
  return transform_field(u_tau, maps, MapDirection::tau_to_x);
}

/// Residual of the degenerate equation in the original coordinates.
inline Field degenerate_residual(const Field& u, const Field& f, const DiagOperator& a,
                                 const std::vector<double>& t, cx lambda,
                                 const std::vector<int>& l, const DegWeight& gamma) {
  Field r = make_field(u.grid, u.m_components);
  for (int k = 0; k < u.grid.dim(); ++k) {
    const double sign = (l[k] % 2 == 0) ? 1.0 : -1.0;
    axpy(r, cx(sign * t[k]), degenerate_derivative(u, gamma, k, 2 * l[k]));
  }
  for (std::size_t p = 0; p < u.grid.total_points(); ++p)
    for (int m = 0; m < u.m_components; ++m)
      r.at(p, m) += (a.entry(m) + lambda) * u.at(p, m) - f.at(p, m);
  return r;
}

}  // namespace anisolab
