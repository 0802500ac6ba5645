#ifndef EFFHAM_SCENARIOS_HPP
#define EFFHAM_SCENARIOS_HPP

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "effham/model.hpp"

namespace effham {

/// A preset system: interaction-picture Hamiltonian, basis labels, the
/// default partition plan, and any named alternative plans.
struct Scenario {
  std::string name;
  Matrix hamiltonian;
  std::vector<std::string> labels;
  PartitionPlan plan;
  std::map<std::string, PartitionPlan> named_plans;  // includes the default
};

/// Three-level Raman system in the basis (g, t, e): two-photon detuning on
/// the relevant diagonal, the intermediate state at the average detuning.
inline Scenario scenario_lambda(double rabi0, double rabi1, double detuning,
                                double two_photon_detuning) {
  if (detuning == 0.0)
    throw SingularBlock("lambda: the intermediate detuning must be nonzero");
  Matrix h(3, 3);
  h(0, 0) = -0.5 * two_photon_detuning;
  h(1, 1) = 0.5 * two_photon_detuning;
  h(2, 2) = detuning;
  h(0, 2) = h(2, 0) = 0.5 * rabi0;
  h(1, 2) = h(2, 1) = 0.5 * rabi1;

  Scenario s;
  s.name = "lambda";
  s.hamiltonian = std::move(h);
  s.labels = {"g", "t", "e"};
  s.plan = {{0, 1}, {{2}}};
  s.named_plans = {{"default", s.plan}};
  return s;
}

/// Four-level ladder driven by a three-photon process, presented in the
/// reordered basis (0, 3, 1, 2) so the two end states form the relevant
/// sector and the two intermediate states the irrelevant one.
inline Scenario scenario_four_level(double rabi0, double rabi1, double rabi2,
                                    double detuning0, double detuning1,
                                    double detuning2) {
  Matrix ladder(4, 4);
  const double diag[4] = {0.0, detuning0, detuning0 + detuning1,
                          detuning0 + detuning1 + detuning2};
  const double rabi[3] = {rabi0, rabi1, rabi2};
  for (std::size_t i = 0; i < 4; ++i) ladder(i, i) = diag[i];
  for (std::size_t i = 0; i < 3; ++i)
    ladder(i, i + 1) = ladder(i + 1, i) = 0.5 * rabi[i];

  const std::vector<std::size_t> order = {0, 3, 1, 2};
  Matrix h = ladder.submatrix(order, order);

  Scenario s;
  s.name = "four_level";
  s.hamiltonian = std::move(h);
  s.labels = {"0", "3", "1", "2"};
  s.plan = {{0, 1}, {{2, 3}}};
  s.named_plans = {{"default", s.plan}};
  partition(s.hamiltonian, s.plan, s.labels);  // preset contract: invertible cut
  return s;
}

/// Two three-level cascade atoms with a Rydberg blockade shift on the
/// doubly excited Rydberg state. Permutation-symmetric two-atom basis
/// (gg, gr, ge, re, ee, rr); sqrt(2) factors baked in as printed.
inline Scenario scenario_rydberg_pair(double rabi0, double rabi1, double detuning,
                                      double two_photon_detuning,
                                      double blockade_shift) {
  const double d = two_photon_detuning;
  const double r0s2 = rabi0 / std::sqrt(2.0);
  const double r1s2 = rabi1 / std::sqrt(2.0);
  Matrix h(6, 6);
  h(1, 1) = d;
  h(2, 2) = detuning + 0.5 * d;
  h(3, 3) = detuning + 1.5 * d;
  h(4, 4) = 2.0 * detuning + d;
  h(5, 5) = blockade_shift + 2.0 * d;
  h(0, 2) = h(2, 0) = r0s2;
  h(1, 2) = h(2, 1) = 0.5 * rabi1;
  h(1, 3) = h(3, 1) = 0.5 * rabi0;
  h(2, 4) = h(4, 2) = r0s2;
  h(3, 4) = h(4, 3) = r1s2;
  h(3, 5) = h(5, 3) = r1s2;

  Scenario s;
  s.name = "rydberg_pair";
  s.hamiltonian = std::move(h);
  s.labels = {"gg", "gr", "ge", "re", "ee", "rr"};
  s.plan = {{0, 1}, {{2, 3, 4, 5}}};
  s.named_plans = {{"default", s.plan},
                   {"2+4", s.plan},
                   {"2+2+2", PartitionPlan{{0, 1}, {{4, 5}, {2, 3}}}}};
  partition(s.hamiltonian, s.plan, s.labels);  // preset contract: invertible cut
  return s;
}

/// Two three-level atoms without blockade, basis (gg, gt, tt, ge, te, ee);
/// the three target-manifold states are all relevant.
inline Scenario scenario_two_atom(double rabi0, double rabi1, double detuning,
                                  double two_photon_detuning) {
  const double d = two_photon_detuning;
  const double r0s2 = rabi0 / std::sqrt(2.0);
  const double r1s2 = rabi1 / std::sqrt(2.0);
  Matrix h(6, 6);
  h(1, 1) = d;
  h(2, 2) = 2.0 * d;
  h(3, 3) = detuning + 0.5 * d;
  h(4, 4) = detuning + 1.5 * d;
  h(5, 5) = 2.0 * detuning + d;
  h(0, 3) = h(3, 0) = r0s2;
  h(1, 3) = h(3, 1) = 0.5 * rabi1;
  h(1, 4) = h(4, 1) = 0.5 * rabi0;
  h(2, 4) = h(4, 2) = r1s2;
  h(3, 5) = h(5, 3) = r0s2;
  h(4, 5) = h(5, 4) = r1s2;

  Scenario s;
  s.name = "two_atom";
  s.hamiltonian = std::move(h);
  s.labels = {"gg", "gt", "tt", "ge", "te", "ee"};
  s.plan = {{0, 1, 2}, {{3, 4, 5}}};
  s.named_plans = {{"default", s.plan}};
  partition(s.hamiltonian, s.plan, s.labels);  // preset contract: invertible cut
  return s;
}

struct ScenarioInfo {
  std::string name;
  std::vector<std::string> parameter_names;
  std::string description;
};

inline const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> registry = {
      {"lambda",
       {"rabi0", "rabi1", "detuning", "two_photon_detuning"},
       "three-level Raman system, relevant (g, t), eliminates e"},
      {"four_level",
       {"rabi0", "rabi1", "rabi2", "detuning0", "detuning1", "detuning2"},
       "four-level three-photon ladder, relevant (0, 3), eliminates (1, 2)"},
      {"rydberg_pair",
       {"rabi0", "rabi1", "detuning", "two_photon_detuning", "blockade_shift"},
       "two cascade atoms with Rydberg blockade; plans 2+4 and 2+2+2"},
      {"two_atom",
       {"rabi0", "rabi1", "detuning", "two_photon_detuning"},
       "two three-level atoms without blockade, 3+3 split"},
  };
  return registry;
}

inline Scenario make_scenario(const std::string& name,
                              const std::map<std::string, double>& params) {
  const ScenarioInfo* info = nullptr;
  for (const auto& entry : scenario_registry())
    if (entry.name == name) info = &entry;
  if (info == nullptr) throw ConfigError("unknown scenario '" + name + "'");

  for (const auto& [key, value] : params) {
    bool known = false;
    for (const auto& p : info->parameter_names) known |= (p == key);
    if (!known)
      throw ConfigError("scenario '" + name + "' has no parameter '" + key + "'");
    if (!std::isfinite(value))
      throw ConfigError("parameter '" + key + "' is not finite");
  }
  auto get = [&](const std::string& key) {
    auto it = params.find(key);
    if (it == params.end())
      throw ConfigError("scenario '" + name + "' is missing parameter '" + key + "'");
    return it->second;
  };

  if (name == "lambda")
    return scenario_lambda(get("rabi0"), get("rabi1"), get("detuning"),
                           get("two_photon_detuning"));
  if (name == "four_level")
    return scenario_four_level(get("rabi0"), get("rabi1"), get("rabi2"),
                               get("detuning0"), get("detuning1"), get("detuning2"));
  if (name == "rydberg_pair")
    return scenario_rydberg_pair(get("rabi0"), get("rabi1"), get("detuning"),
                                 get("two_photon_detuning"), get("blockade_shift"));
  return scenario_two_atom(get("rabi0"), get("rabi1"), get("detuning"),
                           get("two_photon_detuning"));
}

}  // namespace effham

#endif  // EFFHAM_SCENARIOS_HPP
