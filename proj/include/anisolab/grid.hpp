// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "anisolab/errors.hpp"
#include "anisolab/rng.hpp"

namespace anisolab {

using cx = std::complex<double>;

inline cx pow_int(cx base, int exponent) {
  cx out{1.0, 0.0};
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

/// Uniform periodic sampling lattice. Axis k carries N_k nodes on a cell of
/// period L_k, nodes x_k(j) = j L_k / N_k, and the frequency set
/// { 2*pi*j / L_k : j = -N_k/2 .. N_k/2 - 1 }.
class Grid {
 public:
  Grid() = default;

  int dim() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<double>& periods() const { return periods_; }
  std::size_t total_points() const { return total_; }

  double node(int axis, int j) const {
    return periods_[axis] * static_cast<double>(j) / sizes_[axis];
  }

  double spacing(int axis) const { return periods_[axis] / sizes_[axis]; }

  /// Frequency of a stored spectral bin, in standard DFT order.
  double frequency(int axis, int bin) const {
    const int n = sizes_[axis];
    const int j = bin < n / 2 ? bin : bin - n;
    return 2.0 * std::numbers::pi * j / periods_[axis];
  }

  /// Point strides of the row-major flattening (axis 0 slowest).
  const std::vector<std::size_t>& strides() const { return strides_; }

  std::size_t flat_index(const std::vector<int>& multi) const {
    std::size_t p = 0;
    for (int k = 0; k < dim(); ++k) p += strides_[k] * multi[k];
    return p;
  }

  void unflatten(std::size_t p, std::vector<int>& multi) const {
    multi.resize(dim());
    for (int k = 0; k < dim(); ++k) {
      multi[k] = static_cast<int>(p / strides_[k]);
      p %= strides_[k];
    }
  }

  void point(std::size_t flat, std::vector<double>& x) const {
    x.resize(dim());
    for (int k = 0; k < dim(); ++k) {
      const int j = static_cast<int>(flat / strides_[k]);
      flat %= strides_[k];
      x[k] = node(k, j);
    }
  }

  bool operator==(const Grid&) const = default;

  friend Grid make_grid(int n, std::vector<int> sizes, std::vector<double> periods);

 private:
  std::vector<int> sizes_;
  std::vector<double> periods_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
};

inline Grid make_grid(int n, std::vector<int> sizes, std::vector<double> periods) {
  if (n < 1) throw InvalidDimension("grid dimension must be >= 1");
  if (static_cast<int>(sizes.size()) != n || static_cast<int>(periods.size()) != n)
    throw InvalidDimension("sizes/periods length must equal the dimension");
  for (int k = 0; k < n; ++k) {
    if (sizes[k] < 4 || sizes[k] % 2 != 0)
      throw InvalidDimension("axis size must be even and >= 4, got " +
                             std::to_string(sizes[k]));
    if (!(periods[k] > 0.0))
      throw InvalidDimension("axis period must be positive");
  }
  Grid g;
  g.sizes_ = std::move(sizes);
  g.periods_ = std::move(periods);
  g.strides_.assign(n, 1);
  for (int k = n - 2; k >= 0; --k) g.strides_[k] = g.strides_[k + 1] * g.sizes_[k + 1];
  g.total_ = g.strides_[0] * g.sizes_[0];
  return g;
}

enum class Side { physical, spectral };

/// Vector-valued samples over a Grid: complex values indexed by
/// (lattice point, component m in 0..M-1), component fastest.
struct Field {
  Grid grid;
  int m_components = 1;
  Side side = Side::physical;
  std::vector<cx> values;

  cx& at(std::size_t point, int m) { return values[point * m_components + m]; }
  const cx& at(std::size_t point, int m) const { return values[point * m_components + m]; }
};

inline Field make_field(const Grid& grid, int m_components, Side side = Side::physical) {
  if (m_components < 1) throw InvalidDimension("component count must be >= 1");
  Field f;
  f.grid = grid;
  f.m_components = m_components;
  f.side = side;
  f.values.assign(grid.total_points() * m_components, cx{0.0, 0.0});
  return f;
}

template <typename Fn>
Field field_from_function(const Grid& grid, int m_components, Fn&& fn) {
  Field f = make_field(grid, m_components);
  std::vector<double> x;
  for (std::size_t p = 0; p < grid.total_points(); ++p) {
    grid.point(p, x);
    for (int m = 0; m < m_components; ++m) f.at(p, m) = cx(fn(x, m));
  }
  return f;
}

namespace detail {

// Radix-2 Cooley-Tukey for power-of-two lengths, direct DFT otherwise.
// Forward kernel is exp(-2*pi*i*j*m/N); no scaling applied here.
inline void fft_line(std::vector<cx>& a, bool inverse) {
  const std::size_t n = a.size();
  const double sign = inverse ? 1.0 : -1.0;
  if ((n & (n - 1)) == 0) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
      const cx wlen(std::cos(ang), std::sin(ang));
      for (std::size_t i = 0; i < n; i += len) {
        cx w{1.0, 0.0};
        for (std::size_t j = 0; j < len / 2; ++j) {
          const cx u = a[i + j];
          const cx v = a[i + j + len / 2] * w;
          a[i + j] = u + v;
          a[i + j + len / 2] = u - v;
          w *= wlen;
        }
      }
    }
    return;
  }
  std::vector<cx> twiddle(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                       static_cast<double>(n);
    twiddle[k] = cx(std::cos(ang), std::sin(ang));
  }
  std::vector<cx> out(n, cx{0.0, 0.0});
  for (std::size_t b = 0; b < n; ++b) {
    cx acc{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m) acc += a[m] * twiddle[b * m % n];
    out[b] = acc;
  }
  a = std::move(out);
}

inline void transform_axis(Field& f, int axis, bool inverse) {
  const int n = f.grid.sizes()[axis];
  const std::size_t point_stride = f.grid.strides()[axis];
  const std::size_t stride = point_stride * f.m_components;
  const std::size_t block = stride * n;
  const std::size_t total_values = f.values.size();
  std::vector<cx> line(n);
  for (std::size_t base = 0; base < total_values; base += block) {
    for (std::size_t within = 0; within < stride; ++within) {
      const std::size_t start = base + within;
      for (int j = 0; j < n; ++j) line[j] = f.values[start + j * stride];
      fft_line(line, inverse);
      for (int j = 0; j < n; ++j) f.values[start + j * stride] = line[j];
    }
  }
}

}  // namespace detail

/// Discrete Fourier coefficients, normalized so a constant maps to a single
/// coefficient: u_hat(b) = (1/prod N_k) sum_x u(x) exp(-i xi_b . x).
inline Field forward_transform(const Field& u) {
  if (u.side != Side::physical)
    throw SideMismatch("forward_transform expects a physical-side field");
  Field out = u;
  for (int k = 0; k < u.grid.dim(); ++k) detail::transform_axis(out, k, false);
  const double scale = 1.0 / static_cast<double>(u.grid.total_points());
  for (cx& v : out.values) v *= scale;
  out.side = Side::spectral;
  return out;
}

inline Field inverse_transform(const Field& u) {
  if (u.side != Side::spectral)
    throw SideMismatch("inverse_transform expects a spectral-side field");
  Field out = u;
  for (int k = 0; k < u.grid.dim(); ++k) detail::transform_axis(out, k, true);
  out.side = Side::physical;
  return out;
}

/// D^alpha u for a physical-side field: multiply the spectrum by
/// prod_k (i xi_k)^{alpha_k} and invert.
inline Field spectral_derivative(const Field& u, const std::vector<int>& alpha) {
  if (u.side != Side::physical)
    throw SideMismatch("spectral_derivative expects a physical-side field");
  if (static_cast<int>(alpha.size()) != u.grid.dim())
    throw DimensionMismatch("derivative multi-index length mismatch");
  for (int a : alpha)
    if (a < 0) throw ParameterOutOfRange("derivative orders must be nonnegative");

  Field hat = forward_transform(u);
  const Grid& g = u.grid;
  std::vector<int> multi;
  for (std::size_t p = 0; p < g.total_points(); ++p) {
    g.unflatten(p, multi);
    cx factor{1.0, 0.0};
    for (int k = 0; k < g.dim(); ++k)
      factor *= pow_int(cx(0.0, g.frequency(k, multi[k])), alpha[k]);
    for (int m = 0; m < hat.m_components; ++m) hat.at(p, m) *= factor;
  }
  return inverse_transform(hat);
}

/// Random field with spectrum supported on modes |j_k| <= max_mode
/// (N_k/4 when max_mode < 0), coefficients uniform in the complex unit square.
inline Field random_band_limited(const Grid& grid, int m_components, CounterRng& rng,
                                 int max_mode = -1) {
  Field hat = make_field(grid, m_components, Side::spectral);
  std::vector<int> multi;
  for (std::size_t p = 0; p < grid.total_points(); ++p) {
    grid.unflatten(p, multi);
    bool inside = true;
    for (int k = 0; k < grid.dim(); ++k) {
      const int n = grid.sizes()[k];
      const int j = multi[k] < n / 2 ? multi[k] : multi[k] - n;
      const int cap = max_mode < 0 ? n / 4 : max_mode;
      if (std::abs(j) > cap) inside = false;
    }
    if (!inside) continue;
    for (int m = 0; m < m_components; ++m)
      hat.at(p, m) = cx(rng.symmetric(), rng.symmetric());
  }
  return inverse_transform(hat);
}

inline double sup_norm(const Field& f) {
  double s = 0.0;
  for (const cx& v : f.values) s = std::max(s, std::abs(v));
  return s;
}

inline Field& axpy(Field& y, cx a, const Field& x) {
  for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += a * x.values[i];
  return y;
}

inline Field scaled(const Field& x, cx a) {
  Field out = x;
  for (cx& v : out.values) v *= a;
  return out;
}

}  // namespace anisolab
