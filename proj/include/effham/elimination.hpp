#ifndef EFFHAM_ELIMINATION_HPP
#define EFFHAM_ELIMINATION_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "effham/model.hpp"

namespace effham {

/// Orders of the Markov hierarchy. markov0 is plain adiabatic elimination;
/// markov1 keeps one term of the amplitude history and is hermitian under
/// the metric inner product; markov1_dressed is the similarity-transformed
/// variant with a plainly hermitian Hamiltonian.
enum class Order { markov0, markov1, markov1_dressed };

inline std::string to_string(Order order) {
  switch (order) {
    case Order::markov0: return "markov0";
    case Order::markov1: return "markov1";
    case Order::markov1_dressed: return "markov1d";
  }
  return "?";
}

inline Order parse_order(const std::string& name) {
  if (name == "markov0") return Order::markov0;
  if (name == "markov1") return Order::markov1;
  if (name == "markov1d") return Order::markov1_dressed;
  if (name == "markov2")
    throw UnsupportedOrder(
        "second-order Markov approximation is not implemented; available orders "
        "are markov0, markov1, markov1d");
  throw UnsupportedOrder("unknown order '" + name +
                         "'; available orders are markov0, markov1, markov1d");
}

/// One elimination step together with where its states live in the original
/// basis. For one-shot models there is exactly one stage.
struct EliminationStage {
  BlockHamiltonian block;
  Order order;
  std::vector<std::size_t> relevant_original;
  std::vector<std::size_t> irrelevant_original;
};

/// An effective Hamiltonian over the relevant sector, its metric, and the
/// data needed to reconstruct irrelevant amplitudes.
struct EffectiveModel {
  Order order = Order::markov0;
  Matrix h_eff;
  Matrix metric;    // identity for markov0
  Matrix dressing;  // metric^{+1/2} for markov1_dressed, identity otherwise
  std::vector<EliminationStage> stages;  // in elimination order, final last
  double picture_shift = 0.0;
  std::size_t full_dim = 0;
  std::vector<std::string> full_labels;  // original basis order

  const BlockHamiltonian& source() const { return stages.back().block; }
  std::size_t relevant_dim() const { return h_eff.rows(); }

  /// The hermitian generator with the same spectrum as h_eff; markov1
  /// evolution and Rabi frequencies are computed from it.
  Matrix hermitian_generator() const {
    if (order != Order::markov1) return h_eff;
    const Matrix inv_sqrt = herm_inv_sqrt(metric).inv_sqrt;
    return (inv_sqrt * (metric * h_eff) * inv_sqrt).hermitized();
  }
};

namespace detail {

inline Matrix delta_power(const BlockHamiltonian& block, double scale, int power) {
  return herm_apply(block.delta_eig(), [scale, power](double lam) {
    double p = scale;
    for (int k = 0; k < power; ++k) p /= lam;
    return p;
  });
}

/// omega - Omega (4 Delta)^{-1} Omega†, the common hermitian core.
inline Matrix adiabatic_core(const BlockHamiltonian& block) {
  const Matrix inv4 = delta_power(block, 0.25, 1);
  return (block.omega() - block.coupling() * inv4 * block.coupling().adjoint())
      .hermitized();
}

inline void attach_one_shot_stage(EffectiveModel& model, const BlockHamiltonian& block,
                                  Order order) {
  const std::size_t m = block.relevant_dim();
  std::vector<std::size_t> relevant(block.permutation().begin(),
                                    block.permutation().begin() + m);
  std::vector<std::size_t> irrelevant(block.permutation().begin() + m,
                                      block.permutation().end());
  model.stages.push_back(
      EliminationStage{block, order, std::move(relevant), std::move(irrelevant)});

  model.full_dim = block.dim();
  model.full_labels.assign(block.dim(), "");
  for (std::size_t k = 0; k < m; ++k)
    model.full_labels[block.permutation()[k]] = block.relevant_labels()[k];
  for (std::size_t k = 0; k < block.irrelevant_dim(); ++k)
    model.full_labels[block.permutation()[m + k]] = block.irrelevant_labels()[k];
}

}  // namespace detail

/// Zeroth order: adiabatic elimination of the irrelevant sector.
inline EffectiveModel heff0(const BlockHamiltonian& block) {
  EffectiveModel model;
  model.order = Order::markov0;
  model.h_eff = detail::adiabatic_core(block);
  model.metric = Matrix::identity(block.relevant_dim());
  model.dressing = Matrix::identity(block.relevant_dim());
  detail::attach_one_shot_stage(model, block, Order::markov0);
  return model;
}

/// 1 + Omega (4 Delta^2)^{-1} Omega†, the positive operator defining the
/// modified inner product of the first-order approximation.
inline Matrix metric(const BlockHamiltonian& block) {
  const Matrix inv4sq = detail::delta_power(block, 0.25, 2);
  return (Matrix::identity(block.relevant_dim()) +
          block.coupling() * inv4sq * block.coupling().adjoint())
      .hermitized();
}

/// First order, plain form: hermitian with respect to the metric.
inline EffectiveModel heff1(const BlockHamiltonian& block) {
  EffectiveModel model;
  model.order = Order::markov1;
  model.metric = metric(block);
  model.h_eff = herm_inverse(model.metric) * detail::adiabatic_core(block);
  model.dressing = Matrix::identity(block.relevant_dim());
  detail::attach_one_shot_stage(model, block, Order::markov1);
  return model;
}

/// First order, dressed form: plainly hermitian Hamiltonian for the
/// metric-square-root-transformed amplitudes.
inline EffectiveModel heff1_dressed(const BlockHamiltonian& block) {
  EffectiveModel model;
  model.order = Order::markov1_dressed;
  model.metric = metric(block);
  const SqrtPair roots = herm_inv_sqrt(model.metric);
  model.h_eff =
      (roots.inv_sqrt * detail::adiabatic_core(block) * roots.inv_sqrt).hermitized();
  model.dressing = roots.sqrt;
  detail::attach_one_shot_stage(model, block, Order::markov1_dressed);
  return model;
}

inline EffectiveModel eliminate(const BlockHamiltonian& block, Order order) {
  switch (order) {
    case Order::markov0: return heff0(block);
    case Order::markov1: return heff1(block);
    case Order::markov1_dressed: return heff1_dressed(block);
  }
  throw UnsupportedOrder("unhandled order");
}

/// Irrelevant amplitudes implied by a relevant column:
/// epsilon = -(2 Delta)^{-1} Omega† psi.
inline Matrix estimate_irrelevant(const BlockHamiltonian& block, const Matrix& psi) {
  if (psi.rows() != block.relevant_dim() || psi.cols() != 1)
    throw IndexError("estimate_irrelevant: amplitude column has wrong shape");
  const Matrix inv2 = detail::delta_power(block, 0.5, 1);
  return -1.0 * (inv2 * (block.coupling().adjoint() * psi));
}

/// Multi-step elimination. Stage k treats every not-yet-eliminated state as
/// relevant and removes the states of stage k at the stage's order; the last
/// stage produces the returned model over the plan's relevant set. Earlier
/// stages must leave a plainly hermitian Hamiltonian behind, which rules out
/// markov1 anywhere but last.
inline EffectiveModel compose_elimination(const Matrix& h, const PartitionPlan& plan,
                                          std::span<const Order> stage_orders,
                                          std::vector<std::string> labels = {}) {
  if (!h.is_square()) throw IndexError("compose_elimination: matrix is not square");
  const std::size_t dim = h.rows();
  plan.validate(dim);
  if (labels.empty()) labels = default_labels(dim);
  if (labels.size() != dim)
    throw IndexError("compose_elimination: label count does not match the matrix");
  const std::size_t n_stages = plan.stages.size();
  if (stage_orders.size() != n_stages)
    throw IndexError("compose_elimination: need one order per stage");
  for (std::size_t k = 0; k + 1 < n_stages; ++k)
    if (stage_orders[k] == Order::markov1)
      throw UnsupportedOrder(
          "markov1 is hermitian only under its metric and cannot feed a later "
          "elimination stage; use markov0 or markov1d before the final stage");

  std::vector<std::size_t> active(dim);
  std::iota(active.begin(), active.end(), 0);
  Matrix current = h;

  EffectiveModel result;
  std::vector<EliminationStage> stages;

  for (std::size_t k = 0; k < n_stages; ++k) {
    const std::vector<std::size_t>& drop = plan.stages[k];

    // Positions of original indices within the current matrix.
    auto position_of = [&active](std::size_t original) {
      for (std::size_t p = 0; p < active.size(); ++p)
        if (active[p] == original) return p;
      throw IndexError("compose_elimination: stage index not active");
    };

    std::vector<std::size_t> keep_original;
    if (k + 1 == n_stages) {
      keep_original = plan.relevant;
    } else {
      for (std::size_t orig : active) {
        bool dropped = false;
        for (std::size_t d : drop) dropped |= (d == orig);
        if (!dropped) keep_original.push_back(orig);
      }
    }

    PartitionPlan stage_plan;
    for (std::size_t orig : keep_original) stage_plan.relevant.push_back(position_of(orig));
    stage_plan.stages.resize(1);
    for (std::size_t orig : drop) stage_plan.stages[0].push_back(position_of(orig));

    std::vector<std::string> active_labels;
    for (std::size_t orig : active) active_labels.push_back(labels[orig]);

    EffectiveModel stage_model;
    try {
      const BlockHamiltonian block = partition(current, stage_plan, active_labels);
      stage_model = eliminate(block, stage_orders[k]);
    } catch (const SingularBlock& e) {
      throw SingularBlock("stage " + std::to_string(k + 1) + ": " + e.what());
    }

    stages.push_back(
        EliminationStage{stage_model.source(), stage_orders[k], keep_original, drop});

    current = stage_model.h_eff;
    active = keep_original;
    if (k + 1 == n_stages) {
      result.order = stage_orders[k];
      result.h_eff = std::move(stage_model.h_eff);
      result.metric = std::move(stage_model.metric);
      result.dressing = std::move(stage_model.dressing);
    }
  }

  result.stages = std::move(stages);
  result.full_dim = dim;
  result.full_labels = std::move(labels);
  return result;
}

}  // namespace effham

#endif  // EFFHAM_ELIMINATION_HPP
