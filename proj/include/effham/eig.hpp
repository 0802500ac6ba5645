#ifndef EFFHAM_EIG_HPP
#define EFFHAM_EIG_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "effham/matrix.hpp"

namespace effham {

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in ascending
/// order, the k-th eigenvector in the k-th column of a unitary matrix.
struct HermitianEig {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  std::size_t dim() const { return eigenvalues.size(); }
};

namespace detail {

constexpr int kJacobiSweepCap = 100;
constexpr double kJacobiOffTol = 1e-14;      // of the Frobenius norm
constexpr double kHermiticityTol = 1e-10;    // relative, see Matrix::is_hermitian

inline double offdiagonal_frobenius(const Matrix& a) {
  double s = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      if (p != q) s += std::norm(a(p, q));
  return std::sqrt(s);
}

}  // namespace detail

/// Cyclic Jacobi diagonalization for Hermitian matrices.
///
/// The input is symmetrized as (A + A†)/2 first. Plane rotations sweep the
/// strict upper triangle in row order until the off-diagonal Frobenius mass
/// drops below 1e-14 of the total. Plain sequential loops, so the result is
/// deterministic across runs for identical input.
inline HermitianEig herm_eig(const Matrix& input) {
  if (!input.is_square()) throw NotHermitian("herm_eig: matrix is not square");
  input.require_finite("herm_eig");
  if (!input.is_hermitian(detail::kHermiticityTol))
    throw NotHermitian("herm_eig: matrix is not hermitian within tolerance");

  const std::size_t n = input.rows();
  Matrix a = input.hermitized();
  Matrix v = Matrix::identity(n);

  const double total = a.frobenius();
  const double off_target = detail::kJacobiOffTol * total;

  bool converged = false;
  for (int sweep = 0; sweep < detail::kJacobiSweepCap; ++sweep) {
    if (detail::offdiagonal_frobenius(a) <= off_target) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;

        // Factor out the phase of a_pq, then a real 2x2 rotation angle
        // chosen to zero the off-diagonal element of the (p,q) block.
        const Complex phase = apq / mag;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex cp = c * phase;
        const Complex sp = s * phase;

        // A <- G† A G with G acting on columns (p, q).
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = cp * akp - s * akq;
          a(k, q) = sp * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = std::conj(cp) * apk - s * aqk;
          a(q, k) = std::conj(sp) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = cp * vkp - s * vkq;
          v(k, q) = sp * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && detail::offdiagonal_frobenius(a) > off_target)
    throw NoConvergence("herm_eig: sweep cap exceeded");

  // Ascending eigenvalue order; stable sort keeps the solver's own order
  // for ties.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&a](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });

  HermitianEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(idx[k], idx[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, idx[k]);
  }
  return out;
}

/// V f(λ) V† for a scalar function applied to the spectrum.
template <typename F>
Matrix herm_apply(const HermitianEig& eig, F&& f) {
  const std::size_t n = eig.dim();
  std::vector<Complex> fv(n);
  for (std::size_t k = 0; k < n; ++k) fv[k] = Complex(f(eig.eigenvalues[k]));
  const Matrix& v = eig.eigenvectors;
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += v(i, k) * fv[k] * std::conj(v(j, k));
      out(i, j) = s;
    }
  return out;
}

/// exp(-i h t) for Hermitian h (hbar = 1).
inline Matrix unitary_propagator(const Matrix& h, double t) {
  const HermitianEig eig = herm_eig(h);
  return herm_apply(eig, [t](double lam) { return std::exp(Complex(0.0, -lam * t)); });
}

namespace detail {

// Relative threshold below which an eigenvalue counts as singular.
constexpr double kSingularRelTol = 1e-10;

inline double min_abs_eigenvalue(const HermitianEig& eig) {
  double m = std::numeric_limits<double>::infinity();
  for (double lam : eig.eigenvalues) m = std::min(m, std::abs(lam));
  return m;
}

inline double max_abs_eigenvalue(const HermitianEig& eig) {
  double m = 0.0;
  for (double lam : eig.eigenvalues) m = std::max(m, std::abs(lam));
  return m;
}

inline void require_invertible(const HermitianEig& eig, const std::string& what) {
  if (min_abs_eigenvalue(eig) <= kSingularRelTol * max_abs_eigenvalue(eig))
    throw SingularBlock(what + ": eigenvalue within 1e-10 of zero");
}

}  // namespace detail

/// Inverse of a Hermitian matrix through its eigendecomposition.
inline Matrix herm_inverse(const Matrix& a) {
  const HermitianEig eig = herm_eig(a);
  detail::require_invertible(eig, "herm_inverse");
  return herm_apply(eig, [](double lam) { return 1.0 / lam; });
}

/// P^{-1/2} together with its companion P^{+1/2}.
struct SqrtPair {
  Matrix inv_sqrt;
  Matrix sqrt;
};

inline SqrtPair herm_inv_sqrt(const Matrix& p) {
  const HermitianEig eig = herm_eig(p);
  for (double lam : eig.eigenvalues)
    if (lam <= 0.0)
      throw NotPositiveDefinite("herm_inv_sqrt: eigenvalue " + std::to_string(lam) +
                                " is not positive");
  return {herm_apply(eig, [](double lam) { return 1.0 / std::sqrt(lam); }),
          herm_apply(eig, [](double lam) { return std::sqrt(lam); })};
}

struct SpectralNorms {
  double op_norm;     // max |eigenvalue|
  double trace_norm;  // sum of |eigenvalue|
};

inline SpectralNorms spectral_norms_of(const HermitianEig& eig) {
  SpectralNorms out{0.0, 0.0};
  for (double lam : eig.eigenvalues) {
    out.op_norm = std::max(out.op_norm, std::abs(lam));
    out.trace_norm += std::abs(lam);
  }
  return out;
}

inline SpectralNorms spectral_norms(const Matrix& a) {
  return spectral_norms_of(herm_eig(a));
}

/// Operator norm (largest singular value) of a general rectangular matrix.
inline double operator_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const Matrix gram = (a.adjoint() * a).hermitized();
  const HermitianEig eig = herm_eig(gram);
  return std::sqrt(std::max(0.0, eig.eigenvalues.back()));
}

}  // namespace effham

#endif  // EFFHAM_EIG_HPP
