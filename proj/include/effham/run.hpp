#ifndef EFFHAM_RUN_HPP
#define EFFHAM_RUN_HPP

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "effham/dynamics.hpp"
#include "effham/picture.hpp"
#include "effham/scenarios.hpp"

namespace effham {

/// One partition plan under a CSV-friendly name.
struct NamedPlan {
  std::string name;
  PartitionPlan plan;
};

/// A full run description: which system, which plans, which methods, which
/// picture condition, and the time grid. All frequencies are in units of
/// delta_ref, times in units of 1/delta_ref.
struct RunConfig {
  std::string scenario_name;                 // empty for an inline matrix
  std::map<std::string, double> parameters;  // preset scenarios only
  std::optional<Matrix> inline_matrix;
  std::vector<std::string> inline_labels;

  struct PlanSpec {
    std::string name;
    std::optional<std::string> alias;         // named scenario plan
    std::optional<PartitionPlan> explicit_plan;
  };
  std::vector<PlanSpec> plans;  // empty selects the scenario default

  std::vector<std::string> methods;  // subset of exact/markov0/markov1/markov1d
  PictureCondition condition;
  TimeGrid grid;
  std::string output_prefix;
  double delta_ref = 1.0;
};

namespace detail {

inline void require_known_keys(const nlohmann::json& obj,
                               const std::set<std::string>& allowed,
                               const std::string& where) {
  for (const auto& item : obj.items())
    if (!allowed.contains(item.key()))
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

inline double require_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": value is not finite");
  return v;
}

inline PartitionPlan parse_plan_body(const nlohmann::json& j, const std::string& where) {
  require_known_keys(j, {"name", "relevant", "stages"}, where);
  if (!j.contains("relevant") || !j.contains("stages"))
    throw ConfigError(where + ": a plan needs 'relevant' and 'stages'");
  PartitionPlan plan;
  auto read_indices = [&](const nlohmann::json& arr, std::vector<std::size_t>& out,
                          const std::string& what) {
    if (!arr.is_array()) throw ConfigError(where + ": " + what + " must be an array");
    for (const auto& v : arr) {
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(where + ": " + what + " entries must be non-negative integers");
      out.push_back(v.get<std::size_t>());
    }
  };
  read_indices(j["relevant"], plan.relevant, "relevant");
  if (!j["stages"].is_array())
    throw ConfigError(where + ": stages must be an array of index arrays");
  for (const auto& stage : j["stages"]) {
    plan.stages.emplace_back();
    read_indices(stage, plan.stages.back(), "stage");
  }
  return plan;
}

inline RunConfig::PlanSpec parse_plan_spec(const nlohmann::json& j, std::size_t ordinal,
                                           const std::string& where) {
  RunConfig::PlanSpec spec;
  if (j.is_string()) {
    spec.alias = j.get<std::string>();
    spec.name = *spec.alias;
  } else if (j.is_object()) {
    spec.explicit_plan = parse_plan_body(j, where);
    spec.name = j.contains("name") ? j["name"].get<std::string>()
                                   : "plan" + std::to_string(ordinal + 1);
  } else {
    throw ConfigError(where + ": a plan must be a name or a plan object");
  }
  return spec;
}

inline PictureCondition parse_condition(const std::string& text) {
  PictureCondition cond;
  if (text == "a") {
    cond.rule = ShiftRule::trace_zero;
  } else if (text == "b") {
    cond.rule = ShiftRule::min_op_norm;
  } else if (text == "c") {
    cond.rule = ShiftRule::min_trace_norm;
  } else if (text.rfind("fixed:", 0) == 0) {
    cond.rule = ShiftRule::fixed;
    const std::string num = text.substr(6);
    std::size_t used = 0;
    try {
      cond.fixed_shift = std::stod(num, &used);
    } catch (const std::exception&) {
      throw ConfigError("condition: cannot parse fixed shift '" + num + "'");
    }
    if (used != num.size() || !std::isfinite(cond.fixed_shift))
      throw ConfigError("condition: cannot parse fixed shift '" + num + "'");
  } else {
    throw ConfigError("condition must be one of a, b, c, fixed:<value>");
  }
  return cond;
}

inline std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::require_known_keys(j,
                             {"scenario", "parameters", "plan", "methods", "condition",
                              "grid", "output", "delta_ref"},
                             "config");
  for (const char* key : {"scenario", "methods", "condition", "grid", "output",
                          "delta_ref"})
    if (!j.contains(key))
      throw ConfigError(std::string("config: missing required key '") + key + "'");

  RunConfig config;

  const nlohmann::json& scen = j["scenario"];
  if (scen.is_string()) {
    config.scenario_name = scen.get<std::string>();
    if (!j.contains("parameters"))
      throw ConfigError("config: preset scenarios need a 'parameters' object");
    if (!j["parameters"].is_object())
      throw ConfigError("config: 'parameters' must be an object");
    for (const auto& item : j["parameters"].items())
      config.parameters[item.key()] =
          detail::require_number(item.value(), "parameters." + item.key());
  } else if (scen.is_object()) {
    detail::require_known_keys(scen, {"matrix", "labels"}, "scenario");
    if (!scen.contains("matrix") || !scen["matrix"].is_array())
      throw ConfigError("scenario: inline form needs a 'matrix' array of rows");
    if (j.contains("parameters"))
      throw ConfigError("config: 'parameters' does not apply to an inline matrix");
    const auto& rows = scen["matrix"];
    const std::size_t d = rows.size();
    if (d < 2) throw ConfigError("scenario.matrix: need dimension of at least two");
    Matrix h(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      if (!rows[i].is_array() || rows[i].size() != d)
        throw ConfigError("scenario.matrix: must be square");
      for (std::size_t k = 0; k < d; ++k)
        h(i, k) = detail::require_number(rows[i][k], "scenario.matrix");
    }
    if (!h.is_hermitian()) throw ConfigError("scenario.matrix: must be hermitian");
    config.inline_matrix = std::move(h);
    if (scen.contains("labels")) {
      for (const auto& l : scen["labels"])
        config.inline_labels.push_back(l.get<std::string>());
      if (config.inline_labels.size() != d)
        throw ConfigError("scenario.labels: need one label per basis state");
    }
    if (!j.contains("plan"))
      throw ConfigError("config: an inline scenario needs an explicit 'plan'");
  } else {
    throw ConfigError("config: 'scenario' must be a preset name or an inline object");
  }

  if (j.contains("plan")) {
    const nlohmann::json& plan = j["plan"];
    if (plan.is_array()) {
      for (std::size_t k = 0; k < plan.size(); ++k)
        config.plans.push_back(detail::parse_plan_spec(plan[k], k, "plan"));
      std::set<std::string> names;
      for (const auto& spec : config.plans)
        if (!names.insert(spec.name).second)
          throw ConfigError("plan: duplicate plan name '" + spec.name + "'");
    } else {
      config.plans.push_back(detail::parse_plan_spec(plan, 0, "plan"));
    }
  }

  if (!j["methods"].is_array() || j["methods"].empty())
    throw ConfigError("config: 'methods' must be a nonempty array");
  std::set<std::string> seen_methods;
  for (const auto& m : j["methods"]) {
    const std::string name = m.get<std::string>();
    if (name != "exact") {
      try {
        parse_order(name);
      } catch (const UnsupportedOrder& e) {
        throw ConfigError(std::string("methods: ") + e.what());
      }
    }
    if (!seen_methods.insert(name).second)
      throw ConfigError("methods: duplicate method '" + name + "'");
    config.methods.push_back(name);
  }

  config.condition = detail::parse_condition(j["condition"].get<std::string>());

  const nlohmann::json& grid = j["grid"];
  if (!grid.is_object()) throw ConfigError("config: 'grid' must be an object");
  detail::require_known_keys(grid, {"t_max", "steps"}, "grid");
  if (!grid.contains("t_max") || !grid.contains("steps"))
    throw ConfigError("grid: needs 't_max' and 'steps'");
  config.grid.t_max = detail::require_number(grid["t_max"], "grid.t_max");
  if (!grid["steps"].is_number_integer() || grid["steps"].get<long long>() < 0)
    throw ConfigError("grid.steps: must be a non-negative integer");
  config.grid.steps = grid["steps"].get<std::size_t>();
  if (config.grid.steps < 2) throw ConfigError("grid.steps: need at least two steps");
  if (config.grid.t_max <= 0) throw ConfigError("grid.t_max: must be positive");

  config.output_prefix = j["output"].get<std::string>();
  if (config.output_prefix.empty()) throw ConfigError("config: 'output' must be nonempty");

  config.delta_ref = detail::require_number(j["delta_ref"], "delta_ref");
  if (config.delta_ref <= 0) throw ConfigError("delta_ref: must be positive");

  return config;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse config file '" + path + "': " + e.what());
  }
  return parse_config(j);
}

/// The config resolved to a concrete system: dimensionless Hamiltonian,
/// labels, named plans, and the initial basis state (the first relevant
/// state of the first plan).
struct ResolvedRun {
  Matrix hamiltonian;
  std::vector<std::string> labels;
  std::vector<NamedPlan> plans;
  std::size_t initial_state = 0;
};

inline ResolvedRun resolve(const RunConfig& config) {
  ResolvedRun r;
  std::map<std::string, PartitionPlan> named;
  PartitionPlan default_plan;

  if (config.inline_matrix) {
    r.hamiltonian = *config.inline_matrix;
    r.labels = config.inline_labels.empty() ? default_labels(r.hamiltonian.rows())
                                            : config.inline_labels;
  } else {
    Scenario s = make_scenario(config.scenario_name, config.parameters);
    r.hamiltonian = std::move(s.hamiltonian);
    r.labels = std::move(s.labels);
    named = std::move(s.named_plans);
    default_plan = std::move(s.plan);
  }

  if (config.plans.empty()) {
    r.plans.push_back({"default", default_plan});
  } else {
    for (const auto& spec : config.plans) {
      if (spec.alias) {
        auto it = named.find(*spec.alias);
        if (it == named.end())
          throw ConfigError("plan: no named plan '" + *spec.alias + "' in this scenario");
        r.plans.push_back({spec.name, it->second});
      } else {
        r.plans.push_back({spec.name, *spec.explicit_plan});
      }
      r.plans.back().plan.validate(r.hamiltonian.rows());
    }
  }
  r.initial_state = r.plans.front().plan.relevant.front();
  return r;
}

struct MethodSummary {
  std::string method;
  std::string plan_name;  // "-" for exact
  std::string csv_path;
  std::optional<double> shift;  // in physical units (times delta_ref)
  std::optional<double> rabi;   // in physical units
  std::vector<double> gaps;     // all adjacent gaps when more than one
  std::optional<double> rabi_rel_vs_exact;
  std::optional<double> max_pop_diff_vs_exact;
  std::optional<double> rms_pop_diff_vs_exact;
};

struct RunResult {
  std::vector<MethodSummary> summaries;
  std::vector<std::string> files;
};

namespace detail {

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << "t";
  for (const std::string& label : traj.labels) out << "," << label << "_pop";
  out << "\n";
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    out << format_float(traj.times[j]);
    for (double p : traj.populations[j]) out << "," << format_float(p);
    out << "\n";
  }
  if (!out) throw ConfigError("failed while writing '" + path + "'");
}

inline std::vector<Order> stage_orders_for(const PartitionPlan& plan, Order final_order) {
  std::vector<Order> orders(plan.stages.size(), Order::markov0);
  orders.back() = final_order;
  return orders;
}

}  // namespace detail

/// Execute a run: one CSV per requested method (and per plan for the
/// effective methods), plus a summary of shifts, Rabi frequencies, and
/// deviations from the exact curves.
inline RunResult run(const RunConfig& config) {
  const ResolvedRun r = resolve(config);
  std::vector<Complex> psi0(r.hamiltonian.rows(), 0.0);
  psi0[r.initial_state] = 1.0;

  std::vector<std::string> methods = config.methods;
  std::sort(methods.begin(), methods.end());

  const bool want_exact =
      std::find(methods.begin(), methods.end(), "exact") != methods.end();

  RunResult result;
  std::optional<Trajectory> exact_traj;
  if (want_exact) {
    exact_traj = evolve_exact(r.hamiltonian, psi0, config.grid, r.labels);
    MethodSummary s;
    s.method = "exact";
    s.plan_name = "-";
    s.csv_path = config.output_prefix + "_exact.csv";
    if (exact_traj->rabi) s.rabi = *exact_traj->rabi * config.delta_ref;
    detail::write_trajectory_csv(*exact_traj, s.csv_path);
    result.files.push_back(s.csv_path);
    result.summaries.push_back(std::move(s));
  }

  const bool multiple_plans = r.plans.size() > 1;
  for (const std::string& method : methods) {
    if (method == "exact") continue;
    const Order order = parse_order(method);
    for (const NamedPlan& named : r.plans) {
      EffectiveModel model = [&] {
        try {
          const BlockHamiltonian merged =
              partition(r.hamiltonian, named.plan.merged(), r.labels);
          const double shift = select_shift(merged, config.condition);
          EffectiveModel m = compose_elimination(
              shift_picture(r.hamiltonian, shift), named.plan,
              detail::stage_orders_for(named.plan, order), r.labels);
          m.picture_shift = shift;
          return m;
        } catch (const SingularBlock& e) {
          throw SingularBlock(method + ", plan '" + named.name + "': " + e.what());
        }
      }();

      const Trajectory traj = evolve_effective(model, psi0, config.grid);

      MethodSummary s;
      s.method = method;
      s.plan_name = named.name;
      s.shift = model.picture_shift * config.delta_ref;
      if (traj.rabi) s.rabi = *traj.rabi * config.delta_ref;
      if (model.relevant_dim() > 2) {
        s.gaps = adjacent_gaps(model);
        for (double& g : s.gaps) g *= config.delta_ref;
      }
      s.csv_path = config.output_prefix + "_" + method +
                   (multiple_plans ? "_" + named.name : "") + ".csv";
      if (exact_traj) {
        const TrajectoryComparison cmp = compare_trajectories(*exact_traj, traj);
        s.max_pop_diff_vs_exact = cmp.max_abs;
        s.rms_pop_diff_vs_exact = cmp.rms;
        s.rabi_rel_vs_exact = cmp.rabi_relative_difference;
      }
      detail::write_trajectory_csv(traj, s.csv_path);
      result.files.push_back(s.csv_path);
      result.summaries.push_back(std::move(s));
    }
  }
  return result;
}

inline void print_summary(const RunResult& result, std::ostream& out) {
  auto cell = [](std::optional<double> v, const char* pattern) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, pattern, *v);
    return std::string(buf);
  };
  out << std::left << std::setw(9) << "method" << std::setw(10) << "plan"
      << std::setw(16) << "shift" << std::setw(16) << "rabi" << std::setw(13)
      << "rabi_rel" << std::setw(13) << "max|dpop|" << std::setw(13) << "rms|dpop|"
      << "file\n";
  for (const MethodSummary& s : result.summaries)
    out << std::left << std::setw(9) << s.method << std::setw(10) << s.plan_name
        << std::setw(16) << cell(s.shift, "%.8g") << std::setw(16)
        << cell(s.rabi, "%.8g") << std::setw(13) << cell(s.rabi_rel_vs_exact, "%+.4g")
        << std::setw(13) << cell(s.max_pop_diff_vs_exact, "%.4g") << std::setw(13)
        << cell(s.rms_pop_diff_vs_exact, "%.4g") << s.csv_path << "\n";
  // Relevant sectors beyond two states have no single Rabi frequency; list
  // every adjacent gap, smallest-first spectrum order.
  for (const MethodSummary& s : result.summaries) {
    if (s.gaps.empty()) continue;
    out << "gaps " << s.method << "/" << s.plan_name << ":";
    for (double g : s.gaps) out << " " << cell(g, "%.8g");
    out << "\n";
  }
}

/// One scalar parameter swept over a uniform grid; Rabi frequencies per
/// method with the relative error against the exact value. Failed points
/// are tagged, not fatal.
struct SweepSpec {
  std::string parameter;
  double from = 0.0;
  double to = 0.0;
  std::size_t points = 0;
};

struct SweepRow {
  double value = 0.0;
  std::string method;
  std::optional<double> rabi;     // physical units
  std::optional<double> rel_err;  // against exact
  std::string status = "ok";
};

namespace detail {

inline std::string error_tag(const Error& e) {
  if (dynamic_cast<const SingularBlock*>(&e)) return "error:singular-block";
  if (dynamic_cast<const NotPositiveDefinite*>(&e)) return "error:not-positive-definite";
  if (dynamic_cast<const NotHermitian*>(&e)) return "error:not-hermitian";
  if (dynamic_cast<const SearchFailed*>(&e)) return "error:search-failed";
  return "error:failed";
}

}  // namespace detail

inline std::vector<SweepRow> sweep(const RunConfig& config, const SweepSpec& spec) {
  if (config.inline_matrix)
    throw ConfigError("sweep: only preset scenarios have named parameters");
  if (spec.points < 1) throw ConfigError("sweep: need at least one point");
  if (!std::isfinite(spec.from) || !std::isfinite(spec.to))
    throw ConfigError("sweep: bounds must be finite");
  bool known = false;
  for (const auto& info : scenario_registry())
    if (info.name == config.scenario_name)
      for (const auto& p : info.parameter_names) known |= (p == spec.parameter);
  if (!known)
    throw ConfigError("sweep: scenario '" + config.scenario_name +
                      "' has no parameter '" + spec.parameter + "'");

  std::vector<double> values(spec.points);
  for (std::size_t i = 0; i < spec.points; ++i)
    values[i] = spec.points == 1
                    ? spec.from
                    : spec.from + (spec.to - spec.from) * static_cast<double>(i) /
                                      static_cast<double>(spec.points - 1);

  std::vector<std::string> methods = config.methods;
  std::sort(methods.begin(), methods.end());

  auto evaluate_point = [&config, &methods, &spec](double value) {
    std::vector<SweepRow> rows;
    RunConfig point = config;
    point.parameters[spec.parameter] = value;
    std::optional<ResolvedRun> resolved;
    std::optional<double> exact_rabi;
    std::string resolve_failure;
    try {
      resolved = resolve(point);
      exact_rabi = rabi_exact(resolved->hamiltonian);
    } catch (const Error& e) {
      resolve_failure = detail::error_tag(e);
    }
    for (const std::string& method : methods) {
      SweepRow row;
      row.value = value;
      row.method = method;
      if (!resolved) {
        row.status = resolve_failure;
        rows.push_back(std::move(row));
        continue;
      }
      try {
        if (method == "exact") {
          row.rabi = *exact_rabi * config.delta_ref;
          row.rel_err = 0.0;
        } else {
          const Order order = parse_order(method);
          const NamedPlan& named = resolved->plans.front();
          const BlockHamiltonian merged =
              partition(resolved->hamiltonian, named.plan.merged(), resolved->labels);
          const double shift = select_shift(merged, config.condition);
          const Matrix shifted = shift_picture(resolved->hamiltonian, shift);
          const EffectiveModel model = compose_elimination(
              shifted, named.plan, detail::stage_orders_for(named.plan, order),
              resolved->labels);
          const double rabi = rabi_effective(model);
          row.rabi = rabi * config.delta_ref;
          if (*exact_rabi != 0.0) row.rel_err = (rabi - *exact_rabi) / *exact_rabi;
        }
      } catch (const Error& e) {
        row.status = detail::error_tag(e);
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };

  // Points are independent; evaluate them concurrently and assemble the
  // rows in deterministic order afterwards.
  std::vector<std::future<std::vector<SweepRow>>> futures;
  futures.reserve(values.size());
  for (double value : values)
    futures.push_back(std::async(std::launch::async, evaluate_point, value));

  std::vector<SweepRow> rows;
  for (auto& f : futures) {
    std::vector<SweepRow> point_rows = f.get();
    rows.insert(rows.end(), point_rows.begin(), point_rows.end());
  }
  return rows;
}

inline std::string write_sweep_csv(const RunConfig& config, const SweepSpec& spec,
                                   const std::vector<SweepRow>& rows) {
  const std::string path = config.output_prefix + "_sweep.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << spec.parameter << ",method,rabi,rel_err_vs_exact,status\n";
  for (const SweepRow& row : rows) {
    out << detail::format_float(row.value) << "," << row.method << ",";
    if (row.rabi) out << detail::format_float(*row.rabi);
    out << ",";
    if (row.rel_err) out << detail::format_float(*row.rel_err);
    out << "," << row.status << "\n";
  }
  if (!out) throw ConfigError("failed while writing '" + path + "'");
  return path;
}

/// Closed-form checks of the three-level Rabi-frequency table: condition (a)
/// rows at both orders, both minimized conditions, and the detuned variant
/// with its leading-order error scaling.
struct Table1Row {
  std::string check;
  double x = 0.0;
  double alpha = 0.0;  // 0 for the symmetric rows
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Table1Report {
  std::vector<Table1Row> rows;
  bool all_pass = true;
};

inline Table1Report verify_table1(std::vector<double> x_grid,
                                  std::vector<double> alpha_grid) {
  for (double x : x_grid)
    if (!(x > 0.0) || !std::isfinite(x))
      throw ConfigError("verify-table1: x values must be positive");
  for (double a : alpha_grid)
    if (!(std::abs(a) < 1.0) || a == 0.0 || !std::isfinite(a))
      throw ConfigError("verify-table1: alpha values must be nonzero with |alpha| < 1");
  std::sort(x_grid.begin(), x_grid.end());

  Table1Report report;
  auto add_row = [&report](std::string check, double x, double alpha, double expected,
                           double actual, double tol) {
    Table1Row row{std::move(check), x, alpha, expected, actual, tol,
                  std::abs(actual - expected) <= tol};
    report.all_pass &= row.pass;
    report.rows.push_back(std::move(row));
  };

  // Symmetric case: equal Rabi frequencies, zero two-photon detuning,
  // x = (rabi0^2 + rabi1^2) / 4 in units of the intermediate detuning.
  for (double x : x_grid) {
    const double rabi = std::sqrt(2.0 * x);
    const Scenario s = scenario_lambda(rabi, rabi, 1.0, 0.0);
    const BlockHamiltonian block = partition(s.hamiltonian, s.plan, s.labels);

    const double shift_a = trace_zero_shift(block);
    add_row("markov0/a", x, 0.0, x,
            rabi_effective(shifted_effective(block, shift_a, Order::markov0)), 1e-10);
    add_row("markov1/a", x, 0.0, x / (1.0 + x),
            rabi_effective(shifted_effective(block, shift_a, Order::markov1)), 1e-10);

    const double shift_b = minimize_norm_shift(block, ShiftRule::min_op_norm);
    add_row("markov0/b", x, 0.0, std::sqrt(1.0 + 2.0 * x) - 1.0,
            rabi_effective(shifted_effective(block, shift_b, Order::markov0)), 1e-6);

    const double shift_c = minimize_norm_shift(block, ShiftRule::min_trace_norm);
    const double gap_c =
        rabi_effective(shifted_effective(block, shift_c, Order::markov0));
    add_row("markov0/c", x, 0.0, 0.5 * (std::sqrt(1.0 + 4.0 * x) - 1.0), gap_c, 1e-6);
    add_row("markov0/c vs exact", x, 0.0, rabi_exact(s.hamiltonian), gap_c, 1e-6);
  }

  // Detuned case: two_photon_detuning = (rabi1^2 - rabi0^2)/4, so the
  // adiabatic diagonal entries coincide.
  auto detuned_system = [](double x, double alpha) {
    const double rabi0 = std::sqrt(2.0 * x * (1.0 + alpha));
    const double rabi1 = std::sqrt(2.0 * x * (1.0 - alpha));
    const double two_photon = (rabi1 * rabi1 - rabi0 * rabi0) / 4.0;
    return scenario_lambda(rabi0, rabi1, 1.0, two_photon);
  };

  std::vector<double> coefficients;  // leading x^2 error coefficient over alpha^2
  for (double alpha : alpha_grid) {
    const double reduction = std::sqrt(1.0 - alpha * alpha);
    for (double x : x_grid) {
      const Scenario s = detuned_system(x, alpha);
      const BlockHamiltonian block = partition(s.hamiltonian, s.plan, s.labels);
      const double shift_a = trace_zero_shift(block);
      add_row("markov0/a detuned", x, alpha, reduction * x,
              rabi_effective(shifted_effective(block, shift_a, Order::markov0)), 1e-12);
    }

    // Error of the minimized trace-norm condition against the exact value
    // behaves as sqrt(1-alpha^2) (A x^2 + B x^3) with A of order alpha^2;
    // extract A from the two smallest x values.
    if (x_grid.size() >= 2) {
      const double x1 = x_grid[0];
      const double x2 = x_grid[1];
      auto scaled_error = [&](double x) {
        const Scenario s = detuned_system(x, alpha);
        const BlockHamiltonian block = partition(s.hamiltonian, s.plan, s.labels);
        const double shift_c = minimize_norm_shift(block, ShiftRule::min_trace_norm);
        const double gap =
            rabi_effective(shifted_effective(block, shift_c, Order::markov0));
        return (gap - rabi_exact(s.hamiltonian)) / reduction;
      };
      const double e1 = scaled_error(x1);
      const double e2 = scaled_error(x2);
      const double denom = x1 * x1 * x2 * x2 * x2 - x2 * x2 * x1 * x1 * x1;
      const double lead = (e1 * x2 * x2 * x2 - e2 * x1 * x1 * x1) / denom;
      coefficients.push_back(lead / (alpha * alpha));
    }
  }

  if (!coefficients.empty()) {
    // Consistency of the extracted leading coefficient across alpha: the
    // ratios must be positive and agree within half of the largest.
    const double lo = *std::min_element(coefficients.begin(), coefficients.end());
    const double hi = *std::max_element(coefficients.begin(), coefficients.end());
    Table1Row row;
    row.check = "markov0/c leading-error ~ alpha^2 x^2";
    row.expected = hi;
    row.actual = lo;
    row.tolerance = 0.5 * std::abs(hi);
    row.pass = lo > 0.0 && (hi - lo) <= 0.5 * std::abs(hi);
    report.all_pass &= row.pass;
    report.rows.push_back(std::move(row));
  }

  return report;
}

inline void print_table1_report(const Table1Report& report, std::ostream& out) {
  for (const Table1Row& row : report.rows) {
    out << (row.pass ? "[PASS] " : "[FAIL] ") << row.check;
    if (row.x > 0.0) out << "  x=" << row.x;
    if (row.alpha != 0.0) out << " alpha=" << row.alpha;
    char buf[128];
    std::snprintf(buf, sizeof buf, "  expected=%.12g actual=%.12g |resid|=%.3g tol=%.3g",
                  row.expected, row.actual, std::abs(row.actual - row.expected),
                  row.tolerance);
    out << buf << "\n";
  }
  out << (report.all_pass ? "table check: all rows pass\n"
                          : "table check: FAILURES present\n");
}

}  // namespace effham

#endif  // EFFHAM_RUN_HPP
