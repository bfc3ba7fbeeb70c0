// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "anisolab/grid.hpp"

using namespace anisolab;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

// Reference O(N^2) transform used as the independent oracle for the FFT path.
Field reference_forward(const Field& u) {
  const Grid& g = u.grid;
  Field out = make_field(g, u.m_components, Side::spectral);
  std::vector<int> bj, mj;
  std::vector<double> x;
  for (std::size_t b = 0; b < g.total_points(); ++b) {
    g.unflatten(b, bj);
    for (std::size_t p = 0; p < g.total_points(); ++p) {
      g.unflatten(p, mj);
      g.point(p, x);
      double phase = 0.0;
      for (int k = 0; k < g.dim(); ++k) phase -= g.frequency(k, bj[k]) * x[k];
      const cx kernel(std::cos(phase), std::sin(phase));
      for (int m = 0; m < u.m_components; ++m) out.at(b, m) += kernel * u.at(p, m);
    }
  }
  for (cx& v : out.values) v /= static_cast<double>(g.total_points());
  return out;
}

double max_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

}  // namespace

TEST_CASE("uniform nodes and spacing", "[grid]") {
  const Grid g1 = make_grid(1, {16}, {2.0 * kPi});
  for (int j = 0; j < 16; ++j) CHECK_THAT(g1.node(0, j), WithinAbs(j * kPi / 8.0, 1e-15));

  const Grid g2 = make_grid(2, {8, 16}, {2.0 * kPi, 4.0 * kPi});
  CHECK(g2.total_points() == 128);
  CHECK_THAT(g2.spacing(1), WithinAbs(kPi / 4.0, 1e-15));
}

TEST_CASE("grid preconditions", "[grid]") {
  CHECK_THROWS_AS(make_grid(1, {5}, {1.0}), InvalidDimension);
  CHECK_THROWS_AS(make_grid(1, {2}, {1.0}), InvalidDimension);
  CHECK_THROWS_AS(make_grid(1, {16}, {0.0}), InvalidDimension);
  CHECK_THROWS_AS(make_grid(0, {}, {}), InvalidDimension);
  CHECK_THROWS_AS(make_grid(2, {16}, {1.0, 1.0}), InvalidDimension);
}

TEST_CASE("frequency layout", "[grid]") {
  const Grid g = make_grid(1, {8}, {2.0 * kPi});
  CHECK_THAT(g.frequency(0, 0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(g.frequency(0, 1), WithinAbs(1.0, 1e-15));
  CHECK_THAT(g.frequency(0, 3), WithinAbs(3.0, 1e-15));
  CHECK_THAT(g.frequency(0, 4), WithinAbs(-4.0, 1e-15));
  CHECK_THAT(g.frequency(0, 7), WithinAbs(-1.0, 1e-15));
}

TEST_CASE("cosine spectrum", "[grid]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  const Field u = field_from_function(g, 1, [](const std::vector<double>& x, int) {
    return std::cos(x[0]);
  });
  const Field hat = forward_transform(u);
  for (std::size_t b = 0; b < 16; ++b) {
    const double expected = (b == 1 || b == 15) ? 0.5 : 0.0;
    CHECK_THAT(std::abs(hat.at(b, 0) - cx(expected)), WithinAbs(0.0, 1e-14));
  }
}

TEST_CASE("zero field transforms to zero", "[grid]") {
  const Grid g = make_grid(2, {8, 8}, {2.0 * kPi, 2.0 * kPi});
  const Field z = make_field(g, 3);
  const Field hat = forward_transform(z);
  CHECK(sup_norm(hat) == 0.0);
}

TEST_CASE("transform round trip on random band-limited fields", "[grid]") {
  CounterRng rng(7);
  for (const auto& sizes : {std::vector<int>{16}, std::vector<int>{32}}) {
    const Grid g = make_grid(1, sizes, {2.0 * kPi});
    for (int trial = 0; trial < 20; ++trial) {
      const Field u = random_band_limited(g, 2, rng);
      const Field back = inverse_transform(forward_transform(u));
      CHECK(max_diff(u, back) <= 1e-12);
    }
  }
  const Grid g2 = make_grid(2, {16, 8}, {2.0 * kPi, 4.0 * kPi});
  for (int trial = 0; trial < 5; ++trial) {
    const Field u = random_band_limited(g2, 2, rng);
    CHECK(max_diff(u, inverse_transform(forward_transform(u))) <= 1e-12);
  }
}

TEST_CASE("fft agrees with the direct transform", "[grid]") {
  CounterRng rng(11);
  for (const auto& sizes : {std::vector<int>{16}, std::vector<int>{12}}) {
    const Grid g = make_grid(1, sizes, {2.0 * kPi});
    Field u = make_field(g, 2);
    for (cx& v : u.values) v = cx(rng.symmetric(), rng.symmetric());
    CHECK(max_diff(forward_transform(u), reference_forward(u)) <= 1e-13);
  }
}

TEST_CASE("side flags are enforced", "[grid]") {
  const Grid g = make_grid(1, {8}, {2.0 * kPi});
  const Field u = make_field(g, 1);
  const Field hat = forward_transform(u);
  CHECK_THROWS_AS(forward_transform(hat), SideMismatch);
  CHECK_THROWS_AS(inverse_transform(u), SideMismatch);
  CHECK_THROWS_AS(spectral_derivative(hat, {1}), SideMismatch);
}

TEST_CASE("spectral derivative closed forms", "[grid]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  const Field u = field_from_function(g, 1, [](const std::vector<double>& x, int) {
    return std::cos(x[0]);
  });

  const Field same = spectral_derivative(u, {0});
  CHECK(max_diff(u, same) <= 1e-13);

  const Field dd = spectral_derivative(u, {2});
  for (std::size_t p = 0; p < g.total_points(); ++p)
    CHECK_THAT(std::abs(dd.at(p, 0) - cx(-std::cos(g.node(0, static_cast<int>(p))))),
               WithinAbs(0.0, 1e-12));
}

TEST_CASE("mixed partial of a separable product", "[grid]") {
  const Grid g = make_grid(2, {16, 16}, {2.0 * kPi, 2.0 * kPi});
  const Field u = field_from_function(g, 1, [](const std::vector<double>& x, int) {
    return std::sin(2.0 * x[0]) * std::cos(x[1]);
  });
  const Field d = spectral_derivative(u, {1, 1});
  std::vector<double> x;
  for (std::size_t p = 0; p < g.total_points(); ++p) {
    g.point(p, x);
    const double expected = 2.0 * std::cos(2.0 * x[0]) * (-std::sin(x[1]));
    CHECK_THAT(std::abs(d.at(p, 0) - cx(expected)), WithinAbs(0.0, 1e-11));
  }
}

TEST_CASE("derivatives commute and compose", "[grid]") {
  const Grid g = make_grid(1, {32}, {2.0 * kPi});
  CounterRng rng(3);
  const Field u = random_band_limited(g, 2, rng);
  const Field ab = spectral_derivative(spectral_derivative(u, {1}), {2});
  const Field sum = spectral_derivative(u, {3});
  CHECK(max_diff(ab, sum) <= 1e-10);
}
