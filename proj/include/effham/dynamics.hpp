#ifndef EFFHAM_DYNAMICS_HPP
#define EFFHAM_DYNAMICS_HPP

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "effham/elimination.hpp"

namespace effham {

/// Uniform time grid from 0 to t_max with the given number of steps
/// (steps + 1 sample points), in units of one over the frequency unit.
struct TimeGrid {
  double t_max = 0.0;
  std::size_t steps = 0;

  void validate() const {
    if (!std::isfinite(t_max) || t_max <= 0.0)
      throw InvalidValue("time grid: t_max must be positive and finite");
    if (steps < 1) throw InvalidValue("time grid: need at least one step");
  }

  double step() const { return t_max / static_cast<double>(steps); }
  std::size_t points() const { return steps + 1; }

  std::vector<double> times() const {
    std::vector<double> out(points());
    const double h = step();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = h * static_cast<double>(k);
    return out;
  }
};

/// Amplitudes and populations on a time grid, always reported in the
/// original basis order. Effective methods fill the irrelevant entries via
/// reconstruction. conserved_norm holds the quadratic form the method keeps
/// constant (total probability for exact evolution, the metric norm for the
/// first-order approximations).
struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> labels;
  std::vector<std::vector<Complex>> amplitudes;  // [time][state]
  std::vector<std::vector<double>> populations;  // [time][state]
  std::string method;
  std::vector<double> conserved_norm;
  std::optional<double> rabi;  // eigenvalue-gap frequency, when defined

  std::size_t dim() const { return labels.size(); }
};

namespace detail {

inline double smallest_adjacent_gap(const std::vector<double>& ascending) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < ascending.size(); ++k)
    gap = std::min(gap, ascending[k + 1] - ascending[k]);
  return gap;
}

inline void require_unit_norm(std::span<const Complex> psi, const std::string& what) {
  double norm2 = 0.0;
  for (const Complex& a : psi) norm2 += std::norm(a);
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
    throw InvalidValue(what + ": initial state is not normalized");
}

}  // namespace detail

/// Smallest spacing between adjacent eigenvalues; the exact Rabi frequency
/// of the slow transfer for the systems considered here.
inline double rabi_exact(const Matrix& h) {
  if (h.rows() < 2) throw InvalidValue("rabi_exact: need dimension of at least two");
  return detail::smallest_adjacent_gap(herm_eig(h).eigenvalues);
}

/// All adjacent eigenvalue gaps of the effective model, ascending spectrum
/// order. markov1 spectra are computed from the hermitian similarity form.
inline std::vector<double> adjacent_gaps(const EffectiveModel& model) {
  const HermitianEig eig = herm_eig(model.hermitian_generator());
  std::vector<double> gaps;
  for (std::size_t k = 0; k + 1 < eig.eigenvalues.size(); ++k)
    gaps.push_back(eig.eigenvalues[k + 1] - eig.eigenvalues[k]);
  return gaps;
}

/// Eigenvalue gap of the effective model: the difference of the two
/// eigenvalues for two relevant states; for larger relevant sectors the
/// smallest adjacent gap stands in as the scalar comparison value.
inline double rabi_effective(const EffectiveModel& model) {
  if (model.relevant_dim() < 2)
    throw InvalidValue("rabi_effective: need at least two relevant states");
  return detail::smallest_adjacent_gap(herm_eig(model.hermitian_generator()).eigenvalues);
}

/// Propagate the full Hamiltonian from a single eigendecomposition.
inline Trajectory evolve_exact(const Matrix& h, std::span<const Complex> psi0,
                               const TimeGrid& grid,
                               std::vector<std::string> labels = {}) {
  grid.validate();
  if (!h.is_square() || psi0.size() != h.rows())
    throw IndexError("evolve_exact: state dimension does not match the Hamiltonian");
  detail::require_unit_norm(psi0, "evolve_exact");
  if (labels.empty()) labels = default_labels(h.rows());

  const HermitianEig eig = herm_eig(h);
  const std::size_t d = h.rows();
  std::vector<Complex> modes(d);  // V† psi0
  for (std::size_t k = 0; k < d; ++k) {
    Complex s = 0.0;
    for (std::size_t r = 0; r < d; ++r)
      s += std::conj(eig.eigenvectors(r, k)) * psi0[r];
    modes[k] = s;
  }

  Trajectory out;
  out.times = grid.times();
  out.labels = std::move(labels);
  out.method = "exact";
  if (d >= 2) out.rabi = detail::smallest_adjacent_gap(eig.eigenvalues);
  out.amplitudes.reserve(out.times.size());
  out.populations.reserve(out.times.size());
  out.conserved_norm.reserve(out.times.size());

  for (double t : out.times) {
    std::vector<Complex> amp(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      const Complex phase = std::exp(Complex(0.0, -eig.eigenvalues[k] * t)) * modes[k];
      for (std::size_t r = 0; r < d; ++r) amp[r] += eig.eigenvectors(r, k) * phase;
    }
    std::vector<double> pop(d);
    double total = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      pop[r] = std::norm(amp[r]);
      total += pop[r];
    }
    out.amplitudes.push_back(std::move(amp));
    out.populations.push_back(std::move(pop));
    out.conserved_norm.push_back(total);
  }
  return out;
}

/// Propagate an effective model and reconstruct the irrelevant amplitudes.
///
/// The initial column must live on the relevant states. It is renormalized
/// to unit metric norm, which realizes the reconstructed irrelevant
/// population at t = 0 and keeps the total probability budget exact.
/// markov1 is propagated through its hermitian similarity form, so no ODE
/// stepping is involved anywhere.
inline Trajectory evolve_effective(const EffectiveModel& model,
                                   std::span<const Complex> psi0_full,
                                   const TimeGrid& grid) {
  grid.validate();
  if (psi0_full.size() != model.full_dim)
    throw IndexError("evolve_effective: state dimension does not match the model");
  detail::require_unit_norm(psi0_full, "evolve_effective");

  const std::vector<std::size_t>& relevant = model.stages.back().relevant_original;
  const std::size_t m = model.relevant_dim();
  const std::size_t d = model.full_dim;

  double outside = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    bool is_relevant = false;
    for (std::size_t r : relevant) is_relevant |= (r == i);
    if (!is_relevant) outside += std::norm(psi0_full[i]);
  }
  if (outside > 1e-12)
    throw InitialStateOutsideRelevant(
        "evolve_effective: initial state has weight on irrelevant states");

  Matrix psi_raw(m, 1);
  for (std::size_t i = 0; i < m; ++i) psi_raw(i, 0) = psi0_full[relevant[i]];
  const Matrix mnorm = psi_raw.adjoint() * (model.metric * psi_raw);
  const double metric_norm = mnorm(0, 0).real();
  Matrix psi0(m, 1);
  for (std::size_t i = 0; i < m; ++i) psi_raw(i, 0) /= std::sqrt(metric_norm);
  psi0 = psi_raw;

  // Hermitian generator and the dressing pair for the unified propagation
  // psi(t) = S- exp(-i Hd t) S+ psi(0).
  Matrix generator = model.h_eff;
  Matrix dress_up = Matrix::identity(m);
  Matrix dress_down = Matrix::identity(m);
  if (model.order != Order::markov0) {
    const SqrtPair roots = herm_inv_sqrt(model.metric);
    dress_up = roots.sqrt;
    dress_down = roots.inv_sqrt;
    if (model.order == Order::markov1)
      generator = (roots.inv_sqrt * (model.metric * model.h_eff) * roots.inv_sqrt)
                      .hermitized();
  }
  const HermitianEig eig = herm_eig(generator);

  // Per-stage reconstruction operator: epsilon = -(2 Delta)^{-1} Omega† psi.
  std::vector<Matrix> recon;
  for (const EliminationStage& stage : model.stages) {
    const Matrix inv2 = detail::delta_power(stage.block, 0.5, 1);
    recon.push_back(-1.0 * (inv2 * stage.block.coupling().adjoint()));
  }

  const Matrix phi0 = dress_up * psi0;
  std::vector<Complex> modes(m);
  for (std::size_t k = 0; k < m; ++k) {
    Complex s = 0.0;
    for (std::size_t r = 0; r < m; ++r)
      s += std::conj(eig.eigenvectors(r, k)) * phi0(r, 0);
    modes[k] = s;
  }

  Trajectory out;
  out.times = grid.times();
  out.labels = model.full_labels;
  out.method = to_string(model.order);
  if (m >= 2) out.rabi = detail::smallest_adjacent_gap(eig.eigenvalues);

  for (double t : out.times) {
    Matrix phi(m, 1);
    for (std::size_t k = 0; k < m; ++k) {
      const Complex phase = std::exp(Complex(0.0, -eig.eigenvalues[k] * t)) * modes[k];
      for (std::size_t r = 0; r < m; ++r) phi(r, 0) += eig.eigenvectors(r, k) * phase;
    }
    const Matrix psi = dress_down * phi;

    std::vector<Complex> amp(d, 0.0);
    for (std::size_t i = 0; i < m; ++i) amp[relevant[i]] = psi(i, 0);
    // Walk the stages from the innermost out, each estimate feeding the next.
    for (std::size_t s = model.stages.size(); s-- > 0;) {
      const EliminationStage& stage = model.stages[s];
      Matrix col(stage.relevant_original.size(), 1);
      for (std::size_t i = 0; i < stage.relevant_original.size(); ++i)
        col(i, 0) = amp[stage.relevant_original[i]];
      const Matrix eps = recon[s] * col;
      for (std::size_t i = 0; i < stage.irrelevant_original.size(); ++i)
        amp[stage.irrelevant_original[i]] = eps(i, 0);
    }

    std::vector<double> pop(d);
    for (std::size_t i = 0; i < d; ++i) pop[i] = std::norm(amp[i]);
    const Matrix q = psi.adjoint() * (model.metric * psi);
    out.conserved_norm.push_back(q(0, 0).real());
    out.amplitudes.push_back(std::move(amp));
    out.populations.push_back(std::move(pop));
  }
  return out;
}

/// Memory-integral reconstruction of the irrelevant amplitudes from sampled
/// relevant amplitudes: a cumulative trapezoid rule in the Delta eigenbasis,
/// accurate to second order in the step.
inline std::vector<std::vector<Complex>> reconstruct_history(
    const BlockHamiltonian& block,
    const std::vector<std::vector<Complex>>& relevant_samples, const TimeGrid& grid) {
  grid.validate();
  if (relevant_samples.size() != grid.points())
    throw GridMismatch("reconstruct_history: sample count does not match the grid");
  const std::size_t m = block.relevant_dim();
  const std::size_t n = block.irrelevant_dim();
  for (const auto& psi : relevant_samples)
    if (psi.size() != m)
      throw IndexError("reconstruct_history: sample has wrong dimension");

  const double h = grid.step();
  const double delta_norm = detail::max_abs_eigenvalue(block.delta_eig());
  if (h * delta_norm > 1.0)
    throw GridTooCoarse("reconstruct_history: step too large for the Delta scale");

  const HermitianEig& eig = block.delta_eig();
  const Matrix& v = eig.eigenvectors;
  const Matrix coupling_adj = block.coupling().adjoint();  // n x m

  const std::vector<double> times = grid.times();
  const std::size_t n_times = times.size();

  // y(t) = V† Omega† psi(t), then f_a(t) = e^{+i lambda_a t} y_a(t).
  std::vector<std::vector<Complex>> f(n_times, std::vector<Complex>(n));
  for (std::size_t j = 0; j < n_times; ++j) {
    std::vector<Complex> w(n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t i = 0; i < m; ++i)
        w[a] += coupling_adj(a, i) * relevant_samples[j][i];
    for (std::size_t a = 0; a < n; ++a) {
      Complex s = 0.0;
      for (std::size_t b = 0; b < n; ++b) s += std::conj(v(b, a)) * w[b];
      f[j][a] = std::exp(Complex(0.0, eig.eigenvalues[a] * times[j])) * s;
    }
  }

  std::vector<std::vector<Complex>> out(n_times, std::vector<Complex>(n));
  std::vector<Complex> integral(n, 0.0);
  for (std::size_t j = 0; j < n_times; ++j) {
    if (j > 0)
      for (std::size_t a = 0; a < n; ++a)
        integral[a] += 0.5 * h * (f[j - 1][a] + f[j][a]);
    for (std::size_t b = 0; b < n; ++b) {
      Complex s = 0.0;
      for (std::size_t a = 0; a < n; ++a)
        s += v(b, a) * std::exp(Complex(0.0, -eig.eigenvalues[a] * times[j])) *
             integral[a];
      out[j][b] = Complex(0.0, -0.5) * s;
    }
  }
  return out;
}

/// Per-state and overall population discrepancies between two trajectories
/// on the same grid, plus the relative Rabi-frequency difference of b
/// against a when both expose one.
struct TrajectoryComparison {
  std::vector<double> per_state_max;
  std::vector<double> per_state_rms;
  double max_abs = 0.0;
  double rms = 0.0;
  std::optional<double> rabi_relative_difference;
};

inline TrajectoryComparison compare_trajectories(const Trajectory& a,
                                                 const Trajectory& b) {
  if (a.times != b.times)
    throw GridMismatch("compare_trajectories: time grids differ");
  if (a.labels != b.labels)
    throw GridMismatch("compare_trajectories: basis labels differ");

  const std::size_t d = a.dim();
  const std::size_t n_times = a.times.size();
  TrajectoryComparison out;
  out.per_state_max.assign(d, 0.0);
  out.per_state_rms.assign(d, 0.0);
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < n_times; ++j)
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = std::abs(a.populations[j][i] - b.populations[j][i]);
      out.per_state_max[i] = std::max(out.per_state_max[i], diff);
      out.per_state_rms[i] += diff * diff;
      sum_sq += diff * diff;
      out.max_abs = std::max(out.max_abs, diff);
    }
  for (std::size_t i = 0; i < d; ++i)
    out.per_state_rms[i] = std::sqrt(out.per_state_rms[i] / static_cast<double>(n_times));
  out.rms = std::sqrt(sum_sq / static_cast<double>(n_times * d));

  if (a.rabi && b.rabi && *a.rabi != 0.0)
    out.rabi_relative_difference = (*b.rabi - *a.rabi) / *a.rabi;
  return out;
}

}  // namespace effham

#endif  // EFFHAM_DYNAMICS_HPP
