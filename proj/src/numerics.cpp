#include "lrgeom/numerics.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>

#include "lrgeom/error.hpp"

namespace lrgeom {

namespace {

template <class S>
void require_finite(const Mat<S>& X, const char* what) {
  if (!X.allFinite()) throw NumericError(std::string(what) + ": non-finite entries");
}

template <class S>
Eigen::BDCSVD<Mat<S>> run_svd(const Mat<S>& X, unsigned opts) {
  Eigen::BDCSVD<Mat<S>> dec(X, opts);
  if (dec.info() != Eigen::Success) throw NumericError("svd: backend did not converge");
  return dec;
}

}  // namespace

template <class S>
Mat<S> SvdFactors<S>::reconstruct(Index rows, Index cols) const {
  if (rank() == 0) return Mat<S>::Zero(rows, cols);
  return U * sigma.template cast<S>().asDiagonal() * V.adjoint();
}

template <class S>
SvdFactors<S> svd(const Mat<S>& X, double trunc_tol) {
  require_finite(X, "svd");
  if (trunc_tol < 0) throw ArgumentError("svd: negative truncation tolerance");
  SvdFactors<S> out;
  out.trunc_tol = trunc_tol;
  out.threshold = trunc_tol * std::max(1.0, X.norm());
  if (X.size() == 0) {
    out.U.resize(X.rows(), 0);
    out.V.resize(X.cols(), 0);
    return out;
  }
  auto dec = run_svd<S>(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& s = dec.singularValues();
  Index r = 0;
  while (r < s.size() && s(r) > out.threshold) ++r;
  out.sigma = s.head(r);
  out.U = dec.matrixU().leftCols(r);
  out.V = dec.matrixV().leftCols(r);
  return out;
}

template <class S>
RVec singular_values(const Mat<S>& X) {
  require_finite(X, "singular_values");
  if (X.size() == 0) return RVec();
  return run_svd<S>(X, 0).singularValues();
}

template <class S>
double nuclear_norm(const Mat<S>& X) {
  return singular_values<S>(X).sum();
}

template <class S>
double spectral_norm(const Mat<S>& X) {
  RVec s = singular_values<S>(X);
  return s.size() ? s(0) : 0.0;
}

CVec unitary_dft(const CVec& v) {
  if (v.size() < 1) throw DimensionError("unitary_dft: empty vector");
  if (v.size() == 1) return v;  // kissfft breaks on length 1
  Eigen::FFT<double> fft;
  CVec out(v.size());
  fft.fwd(out, v);
  return out / std::sqrt(static_cast<double>(v.size()));
}

CVec inverse_unitary_dft(const CVec& v) {
  if (v.size() < 1) throw DimensionError("inverse_unitary_dft: empty vector");
  if (v.size() == 1) return v;
  Eigen::FFT<double> fft;
  CVec out(v.size());
  fft.inv(out, v);  // includes the 1/L factor
  return out * std::sqrt(static_cast<double>(v.size()));
}

CMat unitary_dft_matrix(Index L) {
  CMat F(L, L);
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));
  for (Index j = 0; j < L; ++j)
    for (Index k = 0; k < L; ++k) {
      // reduce jk mod L first to keep the angle small
      const double ang = -2.0 * M_PI * static_cast<double>((j * k) % L) / static_cast<double>(L);
      F(j, k) = scale * cplx(std::cos(ang), std::sin(ang));
    }
  return F;
}

template <class S>
Mat<S> orthonormal_basis(const Mat<S>& A, double tol, Index* rank_out) {
  require_finite(A, "orthonormal_basis");
  Eigen::ColPivHouseholderQR<Mat<S>> qr(A);
  qr.setThreshold(tol);
  const Index r = qr.rank();
  if (rank_out) *rank_out = r;
  Mat<S> Q = qr.householderQ() * Mat<S>::Identity(A.rows(), r);
  return Q;
}

#define LRGEOM_INSTANTIATE(S)                                                   \
  template struct SvdFactors<S>;                                                \
  template SvdFactors<S> svd<S>(const Mat<S>&, double);                         \
  template RVec singular_values<S>(const Mat<S>&);                              \
  template double nuclear_norm<S>(const Mat<S>&);                               \
  template double spectral_norm<S>(const Mat<S>&);                              \
  template Mat<S> orthonormal_basis<S>(const Mat<S>&, double, Index*);

LRGEOM_INSTANTIATE(double)
LRGEOM_INSTANTIATE(cplx)

#undef LRGEOM_INSTANTIATE

}  // namespace lrgeom
