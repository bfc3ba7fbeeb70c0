// SPDX-License-Identifier: Apache-2.0
// Test-only dense linear algebra, kept independent of the library solvers.
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace test_support {

using cx = std::complex<double>;

/// Gaussian elimination with partial pivoting; a is row-major n x n.
inline std::vector<cx> solve_dense(std::vector<std::vector<cx>> a, std::vector<cx> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-300) throw std::runtime_error("singular dense system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const cx factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<cx> x(n);
  for (std::size_t i = n; i-- > 0;) {
    cx acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

}  // namespace test_support
