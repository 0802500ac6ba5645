#ifndef EFFHAM_PICTURE_HPP
#define EFFHAM_PICTURE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "effham/elimination.hpp"

namespace effham {

/// How the scalar interaction-picture shift is selected.
enum class ShiftRule { trace_zero, min_op_norm, min_trace_norm, fixed };

struct PictureCondition {
  ShiftRule rule = ShiftRule::trace_zero;
  /// Which order the norm objective is evaluated on (markov0 or markov1).
  Order objective_order = Order::markov0;
  double fixed_shift = 0.0;

  void validate() const {
    if (rule == ShiftRule::fixed && !std::isfinite(fixed_shift))
      throw InvalidValue("picture condition: fixed shift must be finite");
  }
};

/// The block with omega + shift and Delta + shift; the coupling is untouched.
inline BlockHamiltonian shifted_block(const BlockHamiltonian& block, double shift) {
  return BlockHamiltonian::create(
      shift_picture(block.omega(), shift), block.coupling(),
      shift_picture(block.delta(), shift), block.relevant_labels(),
      block.irrelevant_labels(), block.permutation());
}

/// Effective model of the requested order in the picture displaced by the
/// given shift.
inline EffectiveModel shifted_effective(const BlockHamiltonian& block, double shift,
                                        Order order) {
  EffectiveModel model = eliminate(shifted_block(block, shift), order);
  model.picture_shift = shift;
  return model;
}

/// Condition (trace): shift that makes the relevant diagonal block traceless.
inline double trace_zero_shift(const BlockHamiltonian& block) {
  Complex tr = 0.0;
  for (std::size_t i = 0; i < block.relevant_dim(); ++i) tr += block.omega()(i, i);
  // + 0.0 normalizes a negative zero.
  return -tr.real() / static_cast<double>(block.relevant_dim()) + 0.0;
}

namespace detail {

// Shift away from every pole by less than this (relative to the Delta
// operator norm) counts as singular and is excluded from the search.
constexpr double kShiftExclusionRel = 1e-8;
constexpr std::size_t kShiftScanSamples = 2001;
constexpr double kShiftRefineWidthRel = 1e-10;

/// Norm of the shifted effective Hamiltonian as a function of the shift,
/// with the Delta eigenbasis factored out once up front.
class ShiftObjective {
 public:
  ShiftObjective(const BlockHamiltonian& block, ShiftRule norm_rule, Order order)
      : omega_(block.omega()),
        coupling_v_(block.coupling() * block.delta_eig().eigenvectors),
        delta_eigs_(block.delta_eig().eigenvalues),
        norm_rule_(norm_rule),
        order_(order),
        exclusion_(kShiftExclusionRel *
                   detail::max_abs_eigenvalue(block.delta_eig())) {}

  double exclusion_radius() const { return exclusion_; }

  bool is_singular(double shift) const {
    for (double lam : delta_eigs_)
      if (std::abs(lam + shift) < exclusion_) return true;
    return false;
  }

  double operator()(double shift) const {
    if (is_singular(shift)) return std::numeric_limits<double>::infinity();
    const std::size_t m = omega_.rows();
    const std::size_t n = delta_eigs_.size();

    auto weighted_gram = [&](auto&& weight) {
      Matrix out(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          Complex s = 0.0;
          for (std::size_t k = 0; k < n; ++k)
            s += coupling_v_(i, k) * weight(delta_eigs_[k] + shift) *
                 std::conj(coupling_v_(j, k));
          out(i, j) = s;
        }
      return out;
    };

    Matrix core = omega_ - weighted_gram([](double lam) { return 0.25 / lam; });
    for (std::size_t i = 0; i < m; ++i) core(i, i) += shift;
    core = core.hermitized();

    if (order_ == Order::markov0) return norm_of(core);

    Matrix metric_u = Matrix::identity(m) +
                      weighted_gram([](double lam) { return 0.25 / (lam * lam); });
    const Matrix inv_sqrt = herm_inv_sqrt(metric_u.hermitized()).inv_sqrt;
    return norm_of((inv_sqrt * core * inv_sqrt).hermitized());
  }

 private:
  double norm_of(const Matrix& hermitian) const {
    const SpectralNorms norms = spectral_norms(hermitian);
    return norm_rule_ == ShiftRule::min_op_norm ? norms.op_norm : norms.trace_norm;
  }

  Matrix omega_;
  Matrix coupling_v_;
  std::vector<double> delta_eigs_;
  ShiftRule norm_rule_;
  Order order_;
  double exclusion_;
};

/// Deterministic golden-section refinement on [lo, hi].
template <typename F>
std::pair<double, double> golden_section(F&& f, double lo, double hi, double width) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > width) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace detail

/// Conditions (operator norm) and (trace norm): scan 2001 uniform samples of
/// the shift over a bracket set by the block's scales, exclude shifts that
/// make Delta singular, then refine every local minimum by golden section.
/// Minima that tie within tolerance resolve to the smallest |shift|.
inline double minimize_norm_shift(const BlockHamiltonian& block, ShiftRule norm_rule,
                                  Order objective_order = Order::markov0) {
  if (norm_rule != ShiftRule::min_op_norm && norm_rule != ShiftRule::min_trace_norm)
    throw InvalidValue("minimize_norm_shift: rule must be a norm condition");

  const double bound = 2.0 * (spectral_norms_of(herm_eig(block.omega())).op_norm +
                              detail::max_abs_eigenvalue(block.delta_eig()) +
                              operator_norm(block.coupling()));
  if (bound == 0.0) return 0.0;

  const detail::ShiftObjective objective(block, norm_rule, objective_order);

  const std::size_t n_samples = detail::kShiftScanSamples;
  std::vector<double> xs(n_samples), fs(n_samples);
  std::vector<bool> valid(n_samples);
  std::size_t n_valid = 0;
  for (std::size_t j = 0; j < n_samples; ++j) {
    xs[j] = -bound + 2.0 * bound * static_cast<double>(j) /
                         static_cast<double>(n_samples - 1);
    valid[j] = !objective.is_singular(xs[j]);
    fs[j] = valid[j] ? objective(xs[j]) : std::numeric_limits<double>::infinity();
    n_valid += valid[j];
  }
  if (n_valid == 0)
    throw SearchFailed("minimize_norm_shift: every scan sample hit a singular shift");

  // Local minima of the sampled objective, with one-sided tests at segment
  // boundaries (segments are broken by excluded samples and the domain ends).
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < n_samples; ++j) {
    if (!valid[j]) continue;
    const bool left_ok = (j == 0) || !valid[j - 1] || fs[j] <= fs[j - 1];
    const bool right_ok = (j + 1 == n_samples) || !valid[j + 1] || fs[j] <= fs[j + 1];
    if (left_ok && right_ok) candidates.push_back(j);
  }

  const double step = 2.0 * bound / static_cast<double>(n_samples - 1);
  const double refine_width = detail::kShiftRefineWidthRel * bound;

  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> refined;  // (shift, objective)
  for (std::size_t j : candidates) {
    double lo = std::max(xs[j] - step, -bound);
    double hi = std::min(xs[j] + step, bound);
    // A bracket never straddles an excluded point.
    for (double lam : block.delta_eig().eigenvalues) {
      const double pole = -lam;
      const double margin = objective.exclusion_radius();
      if (pole > lo && pole < xs[j]) lo = pole + margin;
      if (pole < hi && pole > xs[j]) hi = pole - margin;
    }
    if (!(hi > lo)) continue;
    auto [u, fu] = detail::golden_section(objective, lo, hi, refine_width);
    if (fs[j] < fu) {
      u = xs[j];
      fu = fs[j];
    }
    refined.emplace_back(u, fu);
    best_obj = std::min(best_obj, fu);
  }
  if (refined.empty())
    throw SearchFailed("minimize_norm_shift: no refinable bracket");

  const double tie_tol = 1e-9 * (1.0 + std::abs(best_obj));
  double best_shift = std::numeric_limits<double>::infinity();
  for (const auto& [u, fu] : refined)
    if (fu <= best_obj + tie_tol &&
        (std::abs(u) < std::abs(best_shift) ||
         (std::abs(u) == std::abs(best_shift) && u < best_shift)))
      best_shift = u;
  return best_shift;
}

inline double select_shift(const BlockHamiltonian& block, const PictureCondition& cond) {
  cond.validate();
  switch (cond.rule) {
    case ShiftRule::trace_zero: return trace_zero_shift(block);
    case ShiftRule::fixed: return cond.fixed_shift;
    default: return minimize_norm_shift(block, cond.rule, cond.objective_order);
  }
}

}  // namespace effham

#endif  // EFFHAM_PICTURE_HPP
