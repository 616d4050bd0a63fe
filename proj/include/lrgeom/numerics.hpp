#pragma once

#include <Eigen/Dense>

#include <complex>
#include <type_traits>

namespace lrgeom {

using Index = Eigen::Index;
using cplx = std::complex<double>;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using RMat = Mat<double>;
using CMat = Mat<cplx>;
using RVec = Vec<double>;
using CVec = Vec<cplx>;

template <class S>
inline constexpr bool kIsComplex = !std::is_same_v<S, double>;

/// Default relative rank-truncation tolerance for svd().
inline constexpr double kDefaultTruncTol = 1e-10;

/// Thin SVD X = U diag(sigma) V^* restricted to the numerical rank.
template <class S>
struct SvdFactors {
  Mat<S> U;
  RVec sigma;  // nonincreasing, all > threshold
  Mat<S> V;
  double trunc_tol = kDefaultTruncTol;
  double threshold = 0.0;  // absolute cutoff actually applied

  Index rank() const { return sigma.size(); }
  Mat<S> reconstruct(Index rows, Index cols) const;
};

/// Singular values <= trunc_tol * max(1, ||X||_F) are discarded.
/// Throws NumericError if the backend fails or X has non-finite entries.
template <class S>
SvdFactors<S> svd(const Mat<S>& X, double trunc_tol = kDefaultTruncTol);

/// All singular values, nonincreasing, no truncation.
template <class S>
RVec singular_values(const Mat<S>& X);

template <class S>
double nuclear_norm(const Mat<S>& X);
template <class S>
double spectral_norm(const Mat<S>& X);
template <class S>
double frobenius_norm(const Mat<S>& X) {
  return X.norm();
}

// <A,B>_F = Tr(A^* B), antilinear in the first argument.
template <class S>
S frob_inner(const Mat<S>& A, const Mat<S>& B) {
  return (A.array().conjugate() * B.array()).sum();
}

template <class S>
S vec_inner(const Vec<S>& u, const Vec<S>& v) {
  return u.dot(v);  // Eigen's dot is conjugate-linear in the first argument
}

/// Unitary DFT: (Fv)_k = L^{-1/2} sum_j v_j exp(-2 pi i jk/L).
CVec unitary_dft(const CVec& v);
CVec inverse_unitary_dft(const CVec& v);

/// Dense unitary DFT matrix, used by consistency checks only.
CMat unitary_dft_matrix(Index L);

/// Orthonormal basis of the column span of A (columns), rank-revealing with
/// relative tolerance `tol`.
template <class S>
Mat<S> orthonormal_basis(const Mat<S>& A, double tol, Index* rank_out = nullptr);

}  // namespace lrgeom
