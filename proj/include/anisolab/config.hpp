// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisolab/elliptic.hpp"
#include "anisolab/embedding.hpp"
#include "anisolab/parabolic.hpp"

namespace anisolab {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "solve-elliptic",  "solve-parabolic", "check-embedding", "check-multiplier",
      "check-coercivity", "check-interp",    "check-degenerate"};
  return names;
}

/// Parsed flat-key configuration. Validation happens before any field is
/// allocated; only small parameter structs are built here.
struct ScenarioConfig {
  std::string scenario;

  int n = 1;
  std::vector<int> sizes;
  std::vector<double> periods;

  int m_components = 1;
  std::optional<double> growth_s;
  std::vector<double> diag;
  double q = 2.0;

  std::vector<double> p;
  std::vector<double> q_exp;
  double p0 = 2.0;

  std::string weight_kind = "unit";
  std::vector<double> weight_exponents;

  std::vector<int> l;
  std::vector<int> alpha;
  double mu = 0.0;

  std::vector<double> sweep_t = {1.0};
  std::vector<cx> sweep_lambda = {cx(1.0)};
  std::vector<double> sweep_eps = {1.0};
  std::vector<double> sweep_h = {1.0};
  std::vector<double> sweep_mu;

  std::string field_kind = "cos";
  std::vector<double> field_modes = {1.0};
  int field_count = 1;

  double t_final = 1.0;
  int time_steps = 64;

  double deg_amplitude = 0.5;

  double interp_theta = 0.75;
  double interp_sigma = 2.0;
  int interp_draws = 100;

  int dyadic_j_min = -10;
  int dyadic_j_max = 10;
  int dyadic_per_octave = 16;

  std::uint64_t seed = 0;
  std::string output_stem;

  nlohmann::json echo;  // the raw document, kept for the metadata block

  // default operator: d_m = 2^m truncated at sixteen components
  DiagOperator make_operator() const {
    if (!diag.empty()) return DiagOperator::from_diag(diag, q);
    return DiagOperator::geometric(m_components, growth_s.value_or(1.0), q);
  }

  Weight make_weight() const {
    if (weight_kind == "power") return Weight::power(weight_exponents);
    return Weight::unit();
  }

  MixedExponents spatial_p() const { return MixedExponents{p, p0}; }
  MixedExponents spatial_q() const { return MixedExponents{q_exp.empty() ? p : q_exp, p0}; }
};

namespace detail {

class FlatReader {
 public:
  explicit FlatReader(nlohmann::json doc) : doc_(std::move(doc)) {
    if (!doc_.is_object()) throw ConfigInvalid("config root must be a JSON object");
  }

  bool has(const std::string& key) const { return doc_.contains(key); }

  template <typename T>
  T get(const std::string& key) {
    if (!doc_.contains(key)) throw ConfigInvalid("missing required key '" + key + "'");
    return read<T>(key);
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    if (!doc_.contains(key)) return fallback;
    return read<T>(key);
  }

  std::vector<cx> get_complex_list(const std::string& key, std::vector<cx> fallback) {
    if (!doc_.contains(key)) return fallback;
    seen_.insert(key);
    const nlohmann::json& v = doc_.at(key);
    if (!v.is_array()) throw ConfigInvalid("key '" + key + "' must be a list");
    std::vector<cx> out;
    for (const nlohmann::json& item : v) {
      if (item.is_number()) {
        out.emplace_back(item.get<double>());
      } else if (item.is_array() && item.size() == 2 && item[0].is_number() &&
                 item[1].is_number()) {
        out.emplace_back(item[0].get<double>(), item[1].get<double>());
      } else {
        throw ConfigInvalid("entries of '" + key + "' must be numbers or [re, im] pairs");
      }
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : doc_.items())
      if (!seen_.contains(key)) throw ConfigInvalid("unknown config key '" + key + "'");
  }

  const nlohmann::json& raw() const { return doc_; }

 private:
  template <typename T>
  T read(const std::string& key) {
    seen_.insert(key);
    try {
      return doc_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigInvalid("key '" + key + "' has the wrong type: " + e.what());
    }
  }

  nlohmann::json doc_;
  std::set<std::string> seen_;
};

inline std::vector<double> broadcast(std::vector<double> values, int n,
                                     const std::string& what) {
  if (static_cast<int>(values.size()) == n) return values;
  if (values.size() == 1) return std::vector<double>(n, values[0]);
  throw ConfigInvalid(what + " must have length 1 or n");
}

}  // namespace detail

inline ScenarioConfig parse_config(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
  }
  detail::FlatReader r(std::move(doc));

  ScenarioConfig c;
  c.echo = r.raw();
  c.scenario = r.get<std::string>("scenario");
  bool known = false;
  for (const std::string& name : scenario_names()) known = known || name == c.scenario;
  if (!known) throw ConfigInvalid("unknown scenario '" + c.scenario + "'");

  c.n = r.get_or<int>("grid.n", 1);
  c.sizes = r.get_or<std::vector<int>>("grid.sizes", std::vector<int>(c.n, 16));
  c.periods = detail::broadcast(
      r.get_or<std::vector<double>>("grid.periods",
                                    std::vector<double>{2.0 * std::numbers::pi}),
      c.n, "grid.periods");

  c.m_components = r.get_or<int>("operator.m", 16);
  if (r.has("operator.s")) c.growth_s = r.get<double>("operator.s");
  c.diag = r.get_or<std::vector<double>>("operator.diag", {});
  c.q = r.get_or<double>("operator.q", 2.0);

  c.p = detail::broadcast(r.get_or<std::vector<double>>("exponents.p", {2.0}), c.n,
                          "exponents.p");
  if (r.has("exponents.q"))
    c.q_exp = detail::broadcast(r.get<std::vector<double>>("exponents.q"), c.n, "exponents.q");
  c.p0 = r.get_or<double>("exponents.p0", 2.0);

  c.weight_kind = r.get_or<std::string>("weight.kind", "unit");
  if (r.has("weight.exponents"))
    c.weight_exponents = detail::broadcast(r.get<std::vector<double>>("weight.exponents"), c.n,
                                           "weight.exponents");
  else
    c.weight_exponents.assign(c.n, 0.0);

  const auto read_ints = [&](const std::string& key, std::vector<int> fallback) {
    std::vector<int> v = r.get_or<std::vector<int>>(key, std::move(fallback));
    if (static_cast<int>(v.size()) == 1 && c.n > 1) v.assign(c.n, v[0]);
    return v;
  };
  c.l = read_ints("problem.l", std::vector<int>(c.n, 1));
  c.alpha = read_ints("problem.alpha", std::vector<int>(c.n, 0));
  c.mu = r.get_or<double>("problem.mu", 0.0);

  c.sweep_t = r.get_or<std::vector<double>>("sweep.t", {1.0});
  c.sweep_lambda = r.get_complex_list("sweep.lambda", {cx(1.0)});
  c.sweep_eps = r.get_or<std::vector<double>>("sweep.eps", {1.0});
  c.sweep_h = r.get_or<std::vector<double>>("sweep.h", {1.0});
  c.sweep_mu = r.get_or<std::vector<double>>("sweep.mu", {c.mu});

  c.field_kind = r.get_or<std::string>("field.kind", "cos");
  c.field_modes = r.get_or<std::vector<double>>("field.modes", {1.0});
  c.field_count = r.get_or<int>("field.count", 1);

  c.t_final = r.get_or<double>("time.final", 1.0);
  c.time_steps = r.get_or<int>("time.steps", 64);

  c.deg_amplitude = r.get_or<double>("deg.a", 0.5);

  c.interp_theta = r.get_or<double>("interp.theta", 0.75);
  c.interp_sigma = r.get_or<double>("interp.sigma", 2.0);
  c.interp_draws = r.get_or<int>("interp.draws", 100);

  c.dyadic_j_min = r.get_or<int>("dyadic.j_min", -10);
  c.dyadic_j_max = r.get_or<int>("dyadic.j_max", 10);
  c.dyadic_per_octave = r.get_or<int>("dyadic.per_octave", 16);

  c.seed = r.get_or<std::uint64_t>("seed", 0);
  c.output_stem = r.get_or<std::string>("output", c.scenario);

  r.reject_unknown();
  return c;
}

/// Full constraint check; no lattice data is touched. Throws ConfigInvalid
/// with the downstream message attached.
inline void validate(const ScenarioConfig& c) {
  try {
    const Grid grid = make_grid(c.n, c.sizes, c.periods);
    const DiagOperator op = c.make_operator();

    for (double pk : c.p)
      if (!(pk >= 1.0)) throw ConfigInvalid("exponents must satisfy p_k >= 1");

    if (c.sweep_t.empty() || c.sweep_lambda.empty() || c.sweep_eps.empty() ||
        c.sweep_h.empty() || c.sweep_mu.empty())
      throw ConfigInvalid("sweep lists must be non-empty");
    for (double t : c.sweep_t)
      if (!(t > 0.0)) throw ConfigInvalid("sweep.t entries must be positive");
    for (double h : c.sweep_h)
      if (!(h > 0.0)) throw ConfigInvalid("sweep.h entries must be positive");
    for (double e : c.sweep_eps)
      if (!(e > 0.0)) throw ConfigInvalid("sweep.eps entries must be positive");

    if (c.field_kind != "cos" && c.field_kind != "random")
      throw ConfigInvalid("field.kind must be 'cos' or 'random'");
    if (c.field_kind == "random" && c.field_count < 1)
      throw ConfigInvalid("field.count must be positive");
    if (c.weight_kind != "unit" && c.weight_kind != "power")
      throw ConfigInvalid("weight.kind must be 'unit' or 'power'");

    if (c.scenario == "solve-elliptic" || c.scenario == "check-coercivity" ||
        c.scenario == "check-degenerate") {
      EllipticProblem prob{op, std::vector<double>(c.n, c.sweep_t.front()),
                           c.sweep_lambda.front(), c.l, {}};
      validate(prob, grid);
    }
    if (c.scenario == "solve-parabolic") {
      ParabolicProblem prob{op, std::vector<double>(c.n, c.sweep_eps.front()), c.l, c.t_final,
                            c.time_steps};
      validate(prob, grid);
    }
    if (c.scenario == "check-embedding") {
      for (double mu : c.sweep_mu) {
        EmbeddingParams ep{c.alpha,
                           c.l,
                           c.spatial_p(),
                           c.spatial_q(),
                           mu,
                           std::vector<double>(c.n, c.sweep_t.front()),
                           c.sweep_h.front(),
                           op,
                           c.make_weight()};
        validate(ep, grid);
        if (mu == 0.0)
          for (std::size_t k = 0; k < c.p.size(); ++k)
            if (c.p[k] <= 1.0)
              throw ConfigInvalid("mu = 0 requires interior exponents 1 < p_k");
      }
    }
    if (c.scenario == "check-multiplier") {
      for (double t : c.sweep_t)
        for (double h : c.sweep_h)
          SymbolParams::make(std::vector<double>(c.n, t), h, c.mu, cx(0.0), c.l, c.alpha,
                             std::vector<double>(c.n, 0.0));
      if (c.dyadic_per_octave < 1 || c.dyadic_j_min >= c.dyadic_j_max)
        throw ConfigInvalid("dyadic grid bounds are inconsistent");
    }
    if (c.scenario == "check-interp") {
      InterpParams ip;
      ip.theta = c.interp_theta;
      ip.sigma = c.interp_sigma;
      validate(ip);
      if (c.interp_draws < 1) throw ConfigInvalid("interp.draws must be positive");
    }
    if (c.scenario == "check-degenerate") {
      if (!(std::abs(c.deg_amplitude) < 1.0))
        throw ConfigInvalid("deg.a must satisfy |a| < 1");
    }
  } catch (const ConfigInvalid&) {
    throw;
  } catch (const Error& e) {
    throw ConfigInvalid(std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace anisolab
