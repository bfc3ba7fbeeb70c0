// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include "anisolab/config.hpp"
#include "anisolab/degenerate.hpp"
#include "anisolab/version.hpp"

namespace anisolab {

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  const int width = std::min<int>(threads, static_cast<int>(count));
  pool.reserve(width);
  for (int t = 0; t < width; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::vector<Field> probe_fields(const ScenarioConfig& c, const Grid& grid,
                                       int m_components, CounterRng& rng) {
  std::vector<Field> probes;
  if (c.field_kind == "cos") {
    for (double mode : c.field_modes)
      probes.push_back(field_from_function(grid, m_components,
                                           [mode](const std::vector<double>& x, int) {
                                             return std::cos(mode * x[0]);
                                           }));
  } else {
    for (int i = 0; i < c.field_count; ++i)
      probes.push_back(random_band_limited(grid, m_components, rng));
  }
  return probes;
}

inline void fill_ratio_summary(Report& rep, double lo, double hi, const std::string& prefix) {
  rep.summary[prefix + "_min"] = lo;
  rep.summary[prefix + "_max"] = hi;
  rep.summary[prefix + "_max_over_min"] = hi / lo;
}

}  // namespace detail

inline Report run_solve_elliptic(const ScenarioConfig& c, int threads) {
  const Grid grid = make_grid(c.n, c.sizes, c.periods);
  const DiagOperator op = c.make_operator();
  const Weight weight = c.make_weight();
  const MixedExponents p = c.spatial_p();
  CounterRng rng(c.seed);
  const std::vector<Field> probes = detail::probe_fields(c, grid, op.components(), rng);

  struct Cell {
    double t;
    cx lambda;
    std::size_t probe;
  };
  std::vector<Cell> cells;
  for (double t : c.sweep_t)
    for (const cx lambda : c.sweep_lambda)
      for (std::size_t i = 0; i < probes.size(); ++i) cells.push_back({t, lambda, i});

  std::vector<std::vector<Report::Cell>> rows(cells.size());
  detail::parallel_for(cells.size(), threads, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const EllipticProblem prob{op, std::vector<double>(c.n, cell.t), cell.lambda, c.l, {}};
    try {
      const Field u = solve_principal(probes[cell.probe], prob);
      const CoercivityReport rep = coercivity_report(u, probes[cell.probe], prob, p, weight);
      rows[i] = {cell.t,
                 cell.lambda.real(),
                 cell.lambda.imag(),
                 static_cast<std::int64_t>(cell.probe),
                 rep.residual_sup,
                 rep.f_norm,
                 rep.empirical_constant,
                 std::string("ok")};
    } catch (const SingularResolvent&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      rows[i] = {cell.t,
                 cell.lambda.real(),
                 cell.lambda.imag(),
                 static_cast<std::int64_t>(cell.probe),
                 nan,
                 nan,
                 nan,
                 std::string("singular")};
    }
  });

  Report rep;
  rep.columns = {"t",      "lambda_re", "lambda_im",          "field",
                 "residual_sup", "f_norm",    "empirical_constant", "status"};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (auto& row : rows) {
    if (std::get<std::string>(row.back()) == "ok") {
      const double constant = std::get<double>(row[6]);
      lo = std::min(lo, constant);
      hi = std::max(hi, constant);
    }
    rep.add_row(std::move(row));
  }
  detail::fill_ratio_summary(rep, lo, hi, "constant");
  return rep;
}

inline Report run_check_coercivity(const ScenarioConfig& c, int threads) {
  const Grid grid = make_grid(c.n, c.sizes, c.periods);
  const DiagOperator op = c.make_operator();
  const Weight weight = c.make_weight();
  const MixedExponents p = c.spatial_p();
  CounterRng rng(c.seed);
  const std::vector<Field> probes = detail::probe_fields(c, grid, op.components(), rng);

  std::vector<Report> partials(c.sweep_t.size());
  detail::parallel_for(c.sweep_t.size(), threads, [&](std::size_t i) {
    const EllipticProblem prob{op, std::vector<double>(c.n, c.sweep_t[i]), cx(0.0), c.l, {}};
    partials[i] = resolvent_sweep(prob, c.sweep_lambda, probes, p, weight);
  });

  Report rep;
  rep.columns = {"t", "lambda_re", "lambda_im", "empirical_constant", "status"};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    for (auto& row : partials[i].rows) {
      if (std::get<std::string>(row[3]) == "ok") {
        const double constant = std::get<double>(row[2]);
        lo = std::min(lo, constant);
        hi = std::max(hi, constant);
      }
      rep.add_row({c.sweep_t[i], row[0], row[1], row[2], row[3]});
    }
  }
  detail::fill_ratio_summary(rep, lo, hi, "constant");
  return rep;
}

inline Report run_solve_parabolic(const ScenarioConfig& c, int threads) {
  const Grid grid = make_grid(c.n, c.sizes, c.periods);
  const DiagOperator op = c.make_operator();
  const Weight weight = c.make_weight();
  const MixedExponents p{c.p};
  CounterRng rng(c.seed);

  const ParabolicProblem base{op, std::vector<double>(c.n, c.sweep_eps.front()), c.l,
                              c.t_final, c.time_steps};
  SpaceTimeField f;
  if (c.field_kind == "cos") {
    const double mode = c.field_modes.front();
    f = spacetime_from_function(grid, op.components(), base,
                                [mode](double, const std::vector<double>& x, int) {
                                  return std::cos(mode * x[0]);
                                });
  } else {
    f.t_final = c.t_final;
    for (int j = 0; j <= c.time_steps; ++j)
      f.nodes.push_back(random_band_limited(grid, op.components(), rng));
  }

  std::vector<ParabolicCoercivityReport> reps(c.sweep_eps.size());
  detail::parallel_for(c.sweep_eps.size(), threads, [&](std::size_t i) {
    ParabolicProblem prob = base;
    prob.eps.assign(c.n, c.sweep_eps[i]);
    const SpaceTimeField u = solve_cauchy(f, prob);
    reps[i] = parabolic_coercivity_report(u, f, prob, c.p0, p, weight);
  });

  Report rep;
  rep.columns = {"eps", "dudt_norm", "eps_term_total", "au_norm", "f_norm",
                 "empirical_constant"};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    double eps_total = 0.0;
    for (double term : reps[i].eps_terms) eps_total += term;
    rep.add_row({c.sweep_eps[i], reps[i].dudt_norm, eps_total, reps[i].au_norm, reps[i].f_norm,
                 reps[i].empirical_constant});
    lo = std::min(lo, reps[i].empirical_constant);
    hi = std::max(hi, reps[i].empirical_constant);
  }
  detail::fill_ratio_summary(rep, lo, hi, "constant");
  return rep;
}

inline Report run_check_embedding(const ScenarioConfig& c, int threads) {
  const Grid grid = make_grid(c.n, c.sizes, c.periods);
  const DiagOperator op = c.make_operator();
  CounterRng rng(c.seed);
  const std::vector<Field> probes = detail::probe_fields(c, grid, op.components(), rng);

  struct Cell {
    double t, h, mu;
    std::size_t probe;
  };
  std::vector<Cell> cells;
  for (double t : c.sweep_t)
    for (double h : c.sweep_h)
      for (double mu : c.sweep_mu)
        for (std::size_t i = 0; i < probes.size(); ++i) cells.push_back({t, h, mu, i});

  std::vector<EmbeddingReport> reps(cells.size());
  detail::parallel_for(cells.size(), threads, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const EmbeddingParams ep{c.alpha,
                             c.l,
                             c.spatial_p(),
                             c.spatial_q(),
                             cell.mu,
                             std::vector<double>(c.n, cell.t),
                             cell.h,
                             op,
                             c.make_weight()};
    reps[i] = embedding_inequality_report(probes[cell.probe], ep);
  });

  Report rep;
  rep.columns = {"t", "h", "mu", "field", "lhs", "rhs", "ratio"};
  double hi = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    rep.add_row({cells[i].t, cells[i].h, cells[i].mu,
                 static_cast<std::int64_t>(cells[i].probe), reps[i].lhs, reps[i].rhs,
                 reps[i].ratio});
    hi = std::max(hi, reps[i].ratio);
  }
  rep.summary["ratio_max"] = hi;

  // For power weights, summarize the cube estimate over a dyadic family
  // anchored at the origin. Growth under quadrature refinement flags an
  // exponent outside the admissible range.
  if (c.weight_kind == "power") {
    const Weight w = c.make_weight();
    std::vector<Box> cubes;
    for (int j = 1; j <= 6; ++j) {
      Box cube;
      for (int k = 0; k < c.n; ++k) {
        cube.lo.push_back(0.0);
        cube.hi.push_back(c.periods[k] * std::exp2(-j));
      }
      cubes.push_back(std::move(cube));
    }
    const int samples = c.n == 1 ? 1024 : 64;
    const double coarse = ap_constant_estimate(w, c.p[0], cubes, samples);
    const double fine = ap_constant_estimate(w, c.p[0], cubes, 2 * samples);
    rep.summary["ap_constant"] = fine;
    rep.summary["ap_divergent"] =
        (fine > 1.5 * coarse || !w.ap_range_ok(c.p[0])) ? 1.0 : 0.0;
  }
  return rep;
}

inline Report run_check_multiplier(const ScenarioConfig& c, int threads) {
  const DiagOperator op = c.make_operator();
  const SymbolGrid grid =
      SymbolGrid::dyadic(c.n, c.dyadic_j_min, c.dyadic_j_max, c.dyadic_per_octave);
  const std::vector<double> sigma(c.n, 0.0);

  struct Cell {
    double t, h;
    int beta_axis;  // -1 for beta = 0
  };
  std::vector<Cell> cells;
  for (double t : c.sweep_t)
    for (double h : c.sweep_h)
      for (int axis = -1; axis < c.n; ++axis) cells.push_back({t, h, axis});

  std::vector<double> sups(cells.size());
  detail::parallel_for(cells.size(), threads, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const SymbolParams sp = SymbolParams::make(std::vector<double>(c.n, cell.t), cell.h, c.mu,
                                               cx(0.0), c.l, c.alpha, sigma);
    std::vector<int> beta(c.n, 0);
    if (cell.beta_axis >= 0) beta[cell.beta_axis] = 1;
    sups[i] = mikhlin_sup(
        [&sp, &op](std::span<const double> xi) { return psi_symbol(xi, sp, op); }, beta, sigma,
        grid);
  });

  Report rep;
  rep.columns = {"beta_axis", "t", "h", "sup"};
  for (std::size_t i = 0; i < cells.size(); ++i)
    rep.add_row({static_cast<std::int64_t>(cells[i].beta_axis), cells[i].t, cells[i].h,
                 sups[i]});

  // per-h variation of the beta = 0 supremum across the t sweep
  double variation = 0.0, overall = 0.0;
  for (double h : c.sweep_h) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].beta_axis != -1 || cells[i].h != h) continue;
      lo = std::min(lo, sups[i]);
      hi = std::max(hi, sups[i]);
      overall = std::max(overall, sups[i]);
    }
    variation = std::max(variation, hi - lo);
  }
  rep.summary["t_variation_max"] = variation;
  rep.summary["sup_max"] = overall;
  return rep;
}

inline Report run_check_interp(const ScenarioConfig& c, int) {
  const DiagOperator op = c.make_operator();
  InterpParams ip;
  ip.theta = c.interp_theta;
  ip.sigma = c.interp_sigma;

  Report rep;
  rep.columns = {"case", "theta", "canonical", "realized", "ratio"};

  const DiagOperator unit = DiagOperator::from_diag({1.0});
  for (double theta : {0.5, 0.75}) {
    InterpParams anchor = ip;
    anchor.theta = theta;
    const std::vector<cx> one{cx(1.0)};
    const double canonical = interpolation_norm(unit, one, anchor);
    const double realized = interpolation_norm_realized(unit, one, theta);
    rep.add_row({std::string("anchor"), theta, canonical, realized, canonical / realized});
  }

  CounterRng rng(c.seed);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int draw = 0; draw < c.interp_draws; ++draw) {
    std::vector<cx> v(op.components());
    for (cx& entry : v) entry = cx(rng.symmetric(), rng.symmetric());
    const double canonical = interpolation_norm(op, v, ip);
    const double realized = interpolation_norm_realized(op, v, ip.theta);
    const double ratio = canonical / realized;
    rep.add_row({std::string("draw"), ip.theta, canonical, realized, ratio});
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  detail::fill_ratio_summary(rep, lo, hi, "ratio");
  return rep;
}

inline Report run_check_degenerate(const ScenarioConfig& c, int) {
  const Grid grid = make_grid(c.n, c.sizes, c.periods);
  const DiagOperator op = c.make_operator();
  DegWeight gamma;
  for (int k = 0; k < c.n; ++k) gamma.axes.push_back(AxisWeight::cosine_form(c.deg_amplitude));

  std::vector<SubstitutionMap> maps;
  for (int k = 0; k < c.n; ++k) maps.push_back(substitution(gamma.axes[k], grid, k));

  // closed form for the cosine weight: tau = x + (a L / 2 pi) sin(2 pi x / L)
  double sub_err = 0.0;
  for (int k = 0; k < c.n; ++k) {
    const double L = c.periods[k];
    for (int j = 0; j < c.sizes[k]; ++j) {
      const double x = grid.node(k, j);
      const double expected =
          x + c.deg_amplitude * L / (2.0 * std::numbers::pi) *
                  std::sin(2.0 * std::numbers::pi * x / L);
      sub_err = std::max(sub_err, std::abs(maps[k].node_values()[j] - expected));
    }
  }

  CounterRng rng(c.seed);
  const int cap = std::max(2, *std::min_element(c.sizes.begin(), c.sizes.end()) / 16);
  const Field f = random_band_limited(grid, op.components(), rng, cap);

  const Field f_tau = transform_field(f, maps, MapDirection::x_to_tau);
  const Field f_back = transform_field(f_tau, maps, MapDirection::tau_to_x);
  double roundtrip = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    roundtrip = std::max(roundtrip, std::abs(f.values[i] - f_back.values[i]));

  const Field direct = degenerate_derivative(f, gamma, 0, 1);
  std::vector<int> e1(c.n, 0);
  e1[0] = 1;
  const Field via_tau = transform_field(spectral_derivative(f_tau, e1), maps,
                                        MapDirection::tau_to_x);
  double conjugacy = 0.0;
  for (std::size_t i = 0; i < direct.values.size(); ++i)
    conjugacy = std::max(conjugacy, std::abs(direct.values[i] - via_tau.values[i]));
  conjugacy /= std::max(1.0, sup_norm(direct));

  const std::vector<double> t(c.n, c.sweep_t.front());
  const cx lambda = c.sweep_lambda.front();
  const Field u = solve_degenerate(f, op, t, lambda, c.l, gamma);
  const double residual =
      sup_norm(degenerate_residual(u, f, op, t, lambda, c.l, gamma)) / sup_norm(f);

  // graded degenerate constant against the transformed regular constant
  const MixedExponents p = c.spatial_p();
  double total = 0.0;
  for (int k = 0; k < c.n; ++k) {
    for (int i = 0; i <= 2 * c.l[k]; ++i) {
      const double grade = static_cast<double>(i) / (2.0 * c.l[k]);
      const Field d = i == 0 ? u : degenerate_derivative(u, gamma, k, i);
      total += std::pow(t[k], grade) * std::pow(std::abs(lambda), 1.0 - grade) *
               mixed_norm(d, p, Weight::unit(), op.q());
    }
  }
  Field au = u;
  for (std::size_t pt = 0; pt < grid.total_points(); ++pt)
    for (int m = 0; m < au.m_components; ++m) au.at(pt, m) *= op.entry(m);
  total += mixed_norm(au, p, Weight::unit(), op.q());
  const double deg_constant = total / mixed_norm(f, p, Weight::unit(), op.q());

  const EllipticProblem prob{op, t, lambda, c.l, {}};
  const Field u_tau = solve_principal(f_tau, prob);
  std::vector<std::function<double(double)>> tilde_axes;
  for (int k = 0; k < c.n; ++k) {
    const SubstitutionMap map = maps[k];
    const double a = c.deg_amplitude;
    const double L = c.periods[k];
    tilde_axes.push_back([map, a, L](double tau) {
      return 1.0 / (1.0 + a * std::cos(2.0 * std::numbers::pi * map.inverse(tau) / L));
    });
  }
  const CoercivityReport reg =
      coercivity_report(u_tau, f_tau, prob, p, Weight::product_form(tilde_axes));
  const double ratio = deg_constant / reg.empirical_constant;

  Report rep;
  rep.columns = {"check", "value", "bound", "status"};
  const auto row = [&rep](const std::string& name, double value, double bound) {
    rep.add_row({name, value, bound, std::string(value <= bound ? "pass" : "fail")});
  };
  row("substitution_sup_err", sub_err, 1e-8);
  row("roundtrip_sup_err", roundtrip, 1e-7);
  row("conjugacy_rel_err", conjugacy, 1e-6);
  row("solve_residual_rel", residual, 1e-6);
  row("coercivity_ratio_deg_over_reg", ratio, 1.1);
  rep.summary["all_pass"] = [&] {
    for (const auto& r : rep.rows)
      if (std::get<std::string>(r.back()) != "pass") return 0.0;
    return 1.0;
  }();
  return rep;
}

inline Report dispatch_scenario(const ScenarioConfig& c, int threads) {
  if (c.scenario == "solve-elliptic") return run_solve_elliptic(c, threads);
  if (c.scenario == "solve-parabolic") return run_solve_parabolic(c, threads);
  if (c.scenario == "check-embedding") return run_check_embedding(c, threads);
  if (c.scenario == "check-multiplier") return run_check_multiplier(c, threads);
  if (c.scenario == "check-coercivity") return run_check_coercivity(c, threads);
  if (c.scenario == "check-interp") return run_check_interp(c, threads);
  if (c.scenario == "check-degenerate") return run_check_degenerate(c, threads);
  throw ConfigInvalid("unknown scenario '" + c.scenario + "'");
}

struct RunResult {
  std::filesystem::path csv;
  std::filesystem::path meta;
};

namespace detail {

inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// Execute one configuration file end to end: parse, validate, run, and
/// write <stem>.csv plus <stem>.meta.json atomically into out_dir.
inline RunResult run_scenario(const std::filesystem::path& config_path,
                              const std::filesystem::path& out_dir,
                              std::optional<std::uint64_t> seed_override = std::nullopt,
                              int threads = 1) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw ConfigInvalid("cannot read config file '" + config_path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  ScenarioConfig config = parse_config(text);
  if (seed_override) config.seed = *seed_override;
  validate(config);

  const Report report = dispatch_scenario(config, threads);

  std::filesystem::create_directories(out_dir);
  RunResult result;
  result.csv = out_dir / (config.output_stem + ".csv");
  result.meta = out_dir / (config.output_stem + ".meta.json");

  nlohmann::json meta;
  meta["version"] = version_string();
  meta["scenario"] = config.scenario;
  meta["seed"] = config.seed;
  meta["config"] = config.echo;
  meta["csv"] = config.output_stem + ".csv";
  if (config.weight_kind == "power")
    meta["weight.periodization"] =
        "|x|^a realized per axis as (2 |sin(pi x / L)| L / (2 pi))^a";
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& [key, value] : report.summary) summary[key] = value;
  meta["summary"] = summary;

  detail::write_atomic(result.csv, report.to_csv());
  detail::write_atomic(result.meta, meta.dump(2) + "\n");
  return result;
}

}  // namespace anisolab
