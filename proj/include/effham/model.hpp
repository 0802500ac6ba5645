#ifndef EFFHAM_MODEL_HPP
#define EFFHAM_MODEL_HPP

#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "effham/eig.hpp"
#include "effham/matrix.hpp"

namespace effham {

/// Lab-frame description of a cascade of d levels, with the transition
/// between levels i and i+1 driven by one laser each.
struct LevelLadder {
  std::vector<double> level_energies;     // angular frequency, length d
  std::vector<double> laser_frequencies;  // > 0, length d-1
  std::vector<double> rabi_frequencies;   // > 0, length d-1

  std::size_t levels() const { return level_energies.size(); }

  void validate() const {
    const std::size_t d = levels();
    if (d < 2) throw InvalidValue("LevelLadder: need at least two levels");
    if (laser_frequencies.size() != d - 1 || rabi_frequencies.size() != d - 1)
      throw InvalidValue("LevelLadder: need one laser and one Rabi frequency per transition");
    for (double w : level_energies)
      if (!std::isfinite(w)) throw InvalidValue("LevelLadder: non-finite level energy");
    for (double w : laser_frequencies)
      if (!(w > 0.0) || !std::isfinite(w))
        throw InvalidValue("LevelLadder: laser frequencies must be positive");
    for (double w : rabi_frequencies)
      if (!(w > 0.0) || !std::isfinite(w))
        throw InvalidValue("LevelLadder: Rabi frequencies must be positive");
  }
};

/// Photon direction signs (+1 absorption, -1 emission) and laser detunings
/// per transition.
struct Detunings {
  std::vector<int> photon_signs;
  std::vector<double> detunings;
};

inline Detunings detunings_from_lab(const LevelLadder& ladder) {
  ladder.validate();
  Detunings out;
  const std::size_t d = ladder.levels();
  out.photon_signs.reserve(d - 1);
  out.detunings.reserve(d - 1);
  for (std::size_t i = 0; i + 1 < d; ++i) {
    const double gap = ladder.level_energies[i + 1] - ladder.level_energies[i];
    if (gap == 0.0)
      throw DegenerateAdjacentLevels("levels " + std::to_string(i) + " and " +
                                     std::to_string(i + 1) + " are degenerate");
    const int q = gap > 0.0 ? 1 : -1;
    out.photon_signs.push_back(q);
    out.detunings.push_back(q * gap - ladder.laser_frequencies[i]);
  }
  return out;
}

/// Time-independent interaction-picture Hamiltonian of the cascade:
/// tridiagonal, with accumulated signed detunings on the diagonal and half
/// Rabi frequencies on the off-diagonals.
inline Matrix build_cascade(const LevelLadder& ladder) {
  const Detunings det = detunings_from_lab(ladder);
  const std::size_t d = ladder.levels();
  Matrix h(d, d);
  double accum = 0.0;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    accum += det.photon_signs[k] * det.detunings[k];
    h(k + 1, k + 1) = accum;
    h(k, k + 1) = 0.5 * ladder.rabi_frequencies[k];
    h(k + 1, k) = 0.5 * ladder.rabi_frequencies[k];
  }
  return h;
}

/// h + shift * identity: the image of the Hamiltonian in the interaction
/// picture displaced by a scalar frequency.
inline Matrix shift_picture(const Matrix& h, double shift) {
  if (!h.is_square()) throw IndexError("shift_picture: matrix is not square");
  Matrix out = h;
  for (std::size_t i = 0; i < h.rows(); ++i) out(i, i) += shift;
  return out;
}

/// Which states stay, and which get eliminated in which order. All indices
/// refer to the matrix the plan is applied to. A single stage is a one-shot
/// elimination; multiple stages are peeled in the listed order.
struct PartitionPlan {
  std::vector<std::size_t> relevant;
  std::vector<std::vector<std::size_t>> stages;

  std::vector<std::size_t> merged_irrelevant() const {
    std::vector<std::size_t> out;
    for (const auto& stage : stages) out.insert(out.end(), stage.begin(), stage.end());
    return out;
  }

  /// One-shot version of this plan (all stages merged, stage order kept).
  PartitionPlan merged() const { return {relevant, {merged_irrelevant()}}; }

  void validate(std::size_t dim) const {
    if (relevant.empty()) throw IndexError("partition plan: empty relevant set");
    if (stages.empty() || merged_irrelevant().empty())
      throw IndexError("partition plan: empty irrelevant set");
    for (const auto& stage : stages)
      if (stage.empty()) throw IndexError("partition plan: empty stage");
    std::set<std::size_t> seen;
    std::size_t count = 0;
    auto absorb = [&](const std::vector<std::size_t>& idx) {
      for (std::size_t i : idx) {
        if (i >= dim) throw IndexError("partition plan: index out of range");
        if (!seen.insert(i).second) throw IndexError("partition plan: duplicate index");
        ++count;
      }
    };
    absorb(relevant);
    for (const auto& stage : stages) absorb(stage);
    if (count != dim) throw IndexError("partition plan: indices do not cover the matrix");
  }
};

/// The (omega, Omega, Delta) split of an interaction-picture Hamiltonian
/// into relevant and irrelevant sectors. The coupling member stores Omega
/// itself, not Omega/2; the assembly contract owns the factor of two, so
/// expressions like Omega (4 Delta)^-1 Omega† can be written as they read.
class BlockHamiltonian {
 public:
  static BlockHamiltonian create(Matrix omega, Matrix coupling, Matrix delta,
                                 std::vector<std::string> relevant_labels,
                                 std::vector<std::string> irrelevant_labels,
                                 std::vector<std::size_t> permutation = {}) {
    BlockHamiltonian b;
    b.omega_ = std::move(omega);
    b.coupling_ = std::move(coupling);
    b.delta_ = std::move(delta);
    b.relevant_labels_ = std::move(relevant_labels);
    b.irrelevant_labels_ = std::move(irrelevant_labels);

    const std::size_t m = b.omega_.rows();
    const std::size_t n = b.delta_.rows();
    if (m == 0 || !b.omega_.is_square())
      throw IndexError("block: relevant sector must be square and nonempty");
    if (n == 0 || !b.delta_.is_square())
      throw IndexError("block: irrelevant sector must be square and nonempty");
    if (b.coupling_.rows() != m || b.coupling_.cols() != n)
      throw IndexError("block: coupling shape does not match the sectors");
    if (b.relevant_labels_.size() != m || b.irrelevant_labels_.size() != n)
      throw IndexError("block: label count does not match the sectors");
    for (const auto& l : b.relevant_labels_)
      for (const auto& r : b.irrelevant_labels_)
        if (l == r) throw IndexError("block: label '" + l + "' appears in both sectors");

    b.omega_.require_finite("block omega");
    b.coupling_.require_finite("block coupling");
    b.delta_.require_finite("block delta");
    if (!b.assemble().is_hermitian())
      throw NotHermitian("block: assembled Hamiltonian is not hermitian");

    b.delta_eig_ = herm_eig(b.delta_);
    detail::require_invertible(b.delta_eig_, "block delta");

    if (permutation.empty()) {
      permutation.resize(m + n);
      std::iota(permutation.begin(), permutation.end(), 0);
    }
    if (permutation.size() != m + n)
      throw IndexError("block: permutation length does not match the dimension");
    b.permutation_ = std::move(permutation);
    return b;
  }

  const Matrix& omega() const { return omega_; }
  const Matrix& coupling() const { return coupling_; }
  const Matrix& delta() const { return delta_; }
  const HermitianEig& delta_eig() const { return delta_eig_; }
  const std::vector<std::string>& relevant_labels() const { return relevant_labels_; }
  const std::vector<std::string>& irrelevant_labels() const { return irrelevant_labels_; }

  /// For assembled position k, the index in the matrix the block was cut from.
  const std::vector<std::size_t>& permutation() const { return permutation_; }

  std::size_t relevant_dim() const { return omega_.rows(); }
  std::size_t irrelevant_dim() const { return delta_.rows(); }
  std::size_t dim() const { return relevant_dim() + irrelevant_dim(); }

  /// [[omega, Omega/2], [Omega†/2, Delta]]
  Matrix assemble() const {
    const std::size_t m = relevant_dim();
    const std::size_t n = irrelevant_dim();
    Matrix h(m + n, m + n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) h(i, j) = omega_(i, j);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        h(i, m + j) = 0.5 * coupling_(i, j);
        h(m + j, i) = 0.5 * std::conj(coupling_(i, j));
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) h(m + i, m + j) = delta_(i, j);
    return h;
  }

 private:
  BlockHamiltonian() = default;

  Matrix omega_, coupling_, delta_;
  HermitianEig delta_eig_;
  std::vector<std::string> relevant_labels_, irrelevant_labels_;
  std::vector<std::size_t> permutation_;
};

inline std::vector<std::string> default_labels(std::size_t dim) {
  std::vector<std::string> labels(dim);
  for (std::size_t i = 0; i < dim; ++i) labels[i] = std::to_string(i);
  return labels;
}

/// Cut a Hermitian matrix along a partition plan. The relevant rows come
/// first in plan order, then the stages in listed order; the applied
/// permutation is recorded on the returned block.
inline BlockHamiltonian partition(const Matrix& h, const PartitionPlan& plan,
                                  std::vector<std::string> labels = {}) {
  if (!h.is_square()) throw IndexError("partition: matrix is not square");
  h.require_finite("partition");
  plan.validate(h.rows());
  if (labels.empty()) labels = default_labels(h.rows());
  if (labels.size() != h.rows())
    throw IndexError("partition: label count does not match the matrix");

  const std::vector<std::size_t> rel = plan.relevant;
  const std::vector<std::size_t> irr = plan.merged_irrelevant();

  Matrix coupling = h.submatrix(rel, irr);
  for (std::size_t i = 0; i < coupling.rows(); ++i)
    for (std::size_t j = 0; j < coupling.cols(); ++j) coupling(i, j) *= 2.0;

  std::vector<std::string> rel_labels, irr_labels;
  for (std::size_t i : rel) rel_labels.push_back(labels[i]);
  for (std::size_t i : irr) irr_labels.push_back(labels[i]);

  std::vector<std::size_t> perm = rel;
  perm.insert(perm.end(), irr.begin(), irr.end());

  return BlockHamiltonian::create(h.submatrix(rel, rel), std::move(coupling),
                                  h.submatrix(irr, irr), std::move(rel_labels),
                                  std::move(irr_labels), std::move(perm));
}

}  // namespace effham

#endif  // EFFHAM_MODEL_HPP
