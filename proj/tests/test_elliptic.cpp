// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "anisolab/elliptic.hpp"
#include "support/dense.hpp"

using namespace anisolab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;

Field cosine_field(const Grid& g, double mode) {
  return field_from_function(g, 1, [mode](const std::vector<double>& x, int) {
    return std::cos(mode * x[0]);
  });
}

double max_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

EllipticProblem model_problem(cx lambda) {
  return EllipticProblem{DiagOperator::from_diag({1.0}), {1.0}, lambda, {1}, {}};
}

}  // namespace

TEST_CASE("principal solve on single modes", "[elliptic]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});

  const Field u1 = solve_principal(cosine_field(g, 1.0), model_problem(cx(0.0)));
  for (std::size_t p = 0; p < g.total_points(); ++p)
    CHECK(std::abs(u1.at(p, 0) - cx(0.5 * std::cos(g.node(0, static_cast<int>(p))))) <= 1e-12);

  const Field u2 = solve_principal(cosine_field(g, 2.0), model_problem(cx(0.0)));
  for (std::size_t p = 0; p < g.total_points(); ++p)
    CHECK(std::abs(u2.at(p, 0) - cx(std::cos(2.0 * g.node(0, static_cast<int>(p))) / 5.0)) <=
          1e-12);
}

TEST_CASE("principal solve residual on random data", "[elliptic]") {
  const Grid g = make_grid(2, {16, 8}, {2.0 * kPi, 2.0 * kPi});
  const EllipticProblem prob{DiagOperator::from_diag({2.0, 4.0}), {1.0, 3.0}, cx(0.0, 1.0),
                             {1, 2}, {}};
  CounterRng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const Field f = random_band_limited(g, 2, rng);
    const Field u = solve_principal(f, prob);
    CHECK(sup_norm(residual_field(prob, u, f)) <= 1e-10 * sup_norm(f));
  }
}

TEST_CASE("principal solve is linear", "[elliptic]") {
  const Grid g = make_grid(1, {32}, {2.0 * kPi});
  const EllipticProblem prob{DiagOperator::geometric(3, 1.0), {0.5}, cx(2.0, 0.5), {2}, {}};
  CounterRng rng(41);
  const Field f = random_band_limited(g, 3, rng);
  const Field h = random_band_limited(g, 3, rng);
  Field combo = scaled(f, cx(2.0, -1.0));
  axpy(combo, cx(0.5), h);
  Field expected = scaled(solve_principal(f, prob), cx(2.0, -1.0));
  axpy(expected, cx(0.5), solve_principal(h, prob));
  CHECK(max_diff(solve_principal(combo, prob), expected) <= 1e-11);
}

TEST_CASE("coercivity hand anchor at lambda = 1", "[elliptic]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  const EllipticProblem prob = model_problem(cx(1.0));
  const Field f = cosine_field(g, 1.0);
  const Field u = solve_principal(f, prob);
  const CoercivityReport rep = coercivity_report(u, f, prob, {{2.0}}, Weight::unit());

  const double third = std::sqrt(kPi) / 3.0;
  REQUIRE(rep.terms.size() == 1);
  REQUIRE(rep.terms[0].size() == 3);
  for (double term : rep.terms[0]) CHECK_THAT(term, WithinAbs(third, 1e-12));
  CHECK_THAT(rep.au_norm, WithinAbs(third, 1e-12));
  CHECK_THAT(rep.f_norm, WithinAbs(std::sqrt(kPi), 1e-12));
  CHECK_THAT(rep.empirical_constant, WithinAbs(4.0 / 3.0, 1e-6));
}

TEST_CASE("coercivity report rejects bad inputs", "[elliptic]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  const EllipticProblem prob = model_problem(cx(1.0));
  const Field f = cosine_field(g, 1.0);
  const Field u = solve_principal(f, prob);

  const Field zero = make_field(g, 1);
  CHECK_THROWS_AS(coercivity_report(u, zero, prob, {{2.0}}, Weight::unit()), ZeroField);
  CHECK_THROWS_AS(coercivity_report(f, f, prob, {{2.0}}, Weight::unit()), ResidualTooLarge);
}

TEST_CASE("perturbed solve without lower terms finishes in one step", "[elliptic]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  const EllipticProblem prob = model_problem(cx(1.0));
  const Field f = cosine_field(g, 1.0);
  const PerturbedSolve sol = solve_perturbed(f, prob);
  CHECK(sol.iterations == 1);
  CHECK(max_diff(sol.u, solve_principal(f, prob)) <= 1e-13);
}

TEST_CASE("constant-coefficient perturbation matches the per-mode closed form", "[elliptic]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  EllipticProblem prob = model_problem(cx(1.0));
  prob.lower_terms.push_back(LowerTerm{{1}, 0.0, cx(0.1)});

  CounterRng rng(53);
  const Field f = random_band_limited(g, 1, rng);
  const PerturbedSolve sol = solve_perturbed(f, prob);

  // Exact discrete solution: divide each mode by 2 + xi^2 + 0.1 i xi.
  Field expected_hat = forward_transform(f);
  for (std::size_t p = 0; p < g.total_points(); ++p) {
    const double xi = g.frequency(0, static_cast<int>(p));
    expected_hat.at(p, 0) /= cx(2.0 + xi * xi, 0.1 * xi);
  }
  const Field expected = inverse_transform(expected_hat);
  CHECK(max_diff(sol.u, expected) <= 1e-9);
}

TEST_CASE("variable-coefficient perturbation matches a dense solve", "[elliptic]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  const DiagOperator a = DiagOperator::geometric(2, 1.0);
  std::vector<cx> coeff(g.total_points());
  for (std::size_t p = 0; p < g.total_points(); ++p)
    coeff[p] = 0.1 * std::cos(g.node(0, static_cast<int>(p)));
  EllipticProblem prob{a, {1.0}, cx(5.0), {1}, {LowerTerm{{1}, 0.25, coeff}}};

  CounterRng rng(67);
  const Field f = random_band_limited(g, 2, rng);
  const PerturbedSolve sol = solve_perturbed(f, prob);

  // Independent oracle: materialize the full discrete operator column by
  // column and solve the 16 * M system directly.
  const std::size_t dim = g.total_points() * 2;
  std::vector<std::vector<cx>> dense(dim, std::vector<cx>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    Field basis = make_field(g, 2);
    basis.values[col] = 1.0;
    const Field column = apply_full(prob, basis);
    for (std::size_t row = 0; row < dim; ++row) dense[row][col] = column.values[row];
  }
  const std::vector<cx> direct = test_support::solve_dense(dense, f.values);
  double err = 0.0;
  for (std::size_t i = 0; i < dim; ++i) err = std::max(err, std::abs(direct[i] - sol.u.values[i]));
  CHECK(err <= 1e-8);
}

TEST_CASE("iteration trace contracts geometrically", "[elliptic]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  EllipticProblem prob = model_problem(cx(1.0));
  prob.lower_terms.push_back(LowerTerm{{1}, 0.0, cx(0.4)});
  CounterRng rng(71);
  const Field f = random_band_limited(g, 1, rng);
  const PerturbedSolve sol = solve_perturbed(f, prob);
  REQUIRE(sol.iterations >= 2);
  for (int j = 0; j + 1 < sol.iterations; ++j) {
    if (sol.gaps[j] <= 1e-14) break;
    CHECK(sol.gaps[j + 1] <= (sol.rho + 0.05) * sol.gaps[j]);
  }
}

TEST_CASE("non-contractive perturbations report a workable shift", "[elliptic]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  EllipticProblem prob = model_problem(cx(1.0));
  prob.lower_terms.push_back(LowerTerm{{1}, 0.0, cx(10.0)});
  CounterRng rng(79);
  const Field f = random_band_limited(g, 1, rng);

  bool threw = false;
  try {
    solve_perturbed(f, prob);
  } catch (const NotContractive& err) {
    threw = true;
    CHECK(err.rho >= 1.0);
    REQUIRE(err.suggested_lambda.has_value());
    CHECK(*err.suggested_lambda >= 2.0);
    CHECK(*err.suggested_lambda <= 256.0);
    EllipticProblem shifted = prob;
    shifted.lambda = cx(*err.suggested_lambda);
    const PerturbedSolve sol = solve_perturbed(f, shifted);
    CHECK(sol.rho < 0.9);
  }
  CHECK(threw);
}

TEST_CASE("problem validation", "[elliptic]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  const Field f = cosine_field(g, 1.0);

  EllipticProblem bad_ratio = model_problem(cx(1.0));
  bad_ratio.lower_terms.push_back(LowerTerm{{2}, 0.0, cx(0.1)});
  CHECK_THROWS_AS(solve_perturbed(f, bad_ratio), ParameterOutOfRange);

  EllipticProblem bad_theta = model_problem(cx(1.0));
  bad_theta.lower_terms.push_back(LowerTerm{{1}, 0.75, cx(0.1)});
  CHECK_THROWS_AS(solve_perturbed(f, bad_theta), ParameterOutOfRange);

  EllipticProblem with_term = model_problem(cx(1.0));
  with_term.lower_terms.push_back(LowerTerm{{1}, 0.0, cx(0.1)});
  CHECK_THROWS_AS(solve_principal(f, with_term), ParameterOutOfRange);
}

TEST_CASE("resolvent sweep agrees with a single report", "[elliptic]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  const EllipticProblem prob = model_problem(cx(0.0));
  const Field f = cosine_field(g, 1.0);
  const Report rep = resolvent_sweep(prob, {cx(1.0)}, {f}, {{2.0}}, Weight::unit());
  REQUIRE(rep.rows.size() == 1);
  CHECK_THAT(std::get<double>(rep.rows[0][2]), WithinAbs(4.0 / 3.0, 1e-12));
  CHECK(std::get<std::string>(rep.rows[0][3]) == "ok");
}

TEST_CASE("resolvent sweep surfaces constructed singularities", "[elliptic]") {
  const Grid g = make_grid(1, {16}, {2.0 * kPi});
  const EllipticProblem prob = model_problem(cx(0.0));
  const Field f = cosine_field(g, 1.0);
  // lambda = -(d + t) lands on the xi = 1 denominator.
  const Report rep = resolvent_sweep(prob, {cx(1.0), cx(-2.0)}, {f}, {{2.0}}, Weight::unit());
  REQUIRE(rep.rows.size() == 2);
  CHECK(std::get<std::string>(rep.rows[0][3]) == "ok");
  CHECK(std::get<std::string>(rep.rows[1][3]) == "singular");
  CHECK(std::isnan(std::get<double>(rep.rows[1][2])));
}

TEST_CASE("sweep constants track the per-mode supremum law", "[elliptic]") {
  // With probe modes near xi* = sqrt((1+lambda)/t) the cell constant
  // approaches 1 + sqrt(lambda) / (2 sqrt(1+lambda)).
  const Grid g = make_grid(1, {1024}, {8.0 * kPi});
  const EllipticProblem prob = model_problem(cx(0.0));
  std::vector<Field> probes;
  std::vector<cx> lambdas;
  for (int j = 0; j <= 6; ++j) {
    const double lambda = std::pow(4.0, j);
    lambdas.emplace_back(lambda);
    const double target = std::sqrt(1.0 + lambda);
    const double snapped = std::round(target * 4.0) / 4.0;
    for (double mode : {snapped - 0.25, snapped, snapped + 0.25})
      if (mode > 0.0) probes.push_back(cosine_field(g, mode));
  }
  const Report rep = resolvent_sweep(prob, lambdas, probes, {{2.0}}, Weight::unit());
  REQUIRE(rep.rows.size() == 7);
  for (int j = 0; j <= 6; ++j) {
    const double lambda = std::pow(4.0, j);
    const double law = 1.0 + std::sqrt(lambda) / (2.0 * std::sqrt(1.0 + lambda));
    CHECK_THAT(std::get<double>(rep.rows[j][2]), WithinRel(law, 5e-3));
  }
}
