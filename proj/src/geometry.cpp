#include "lrgeom/geometry.hpp"

#include <cmath>

#include "lrgeom/error.hpp"

namespace lrgeom {

template <class S>
TangentSpace<S> tangent_space(const Mat<S>& X, double trunc_tol) {
  TangentSpace<S> ts;
  ts.factors = svd<S>(X, trunc_tol);
  if (ts.factors.rank() == 0) throw ArgumentError("tangent_space: X must be nonzero");
  ts.UV = ts.factors.U * ts.factors.V.adjoint();
  return ts;
}

template <class S>
Mat<S> project_T(const TangentSpace<S>& ts, const Mat<S>& M) {
  if (M.rows() != ts.rows() || M.cols() != ts.cols()) throw DimensionError("project_T: shape mismatch");
  const Mat<S>& U = ts.factors.U;
  const Mat<S>& V = ts.factors.V;
  const Mat<S> UtM = U.adjoint() * M;   // r x n2
  const Mat<S> MV = M * V;              // n1 x r
  return U * UtM + MV * V.adjoint() - U * (UtM * V) * V.adjoint();
}

template <class S>
Mat<S> project_Tperp(const TangentSpace<S>& ts, const Mat<S>& M) {
  return M - project_T(ts, M);
}

template <class S>
SubdiffResult in_subdifferential(const Mat<S>& X, const Mat<S>& W, double tol) {
  const auto ts = tangent_space(X);
  SubdiffResult r;
  r.tangent_residual = (project_T(ts, W) - ts.UV).norm();
  r.spectral_residual = spectral_norm<S>(project_Tperp(ts, W));
  r.member = r.tangent_residual <= tol && r.spectral_residual <= 1.0 + tol;
  return r;
}

template <class S>
ConeResult in_descent_cone_closure(const Mat<S>& X, const Mat<S>& Z, double tol) {
  const auto ts = tangent_space(X);
  if (Z.rows() != X.rows() || Z.cols() != X.cols()) throw DimensionError("in_descent_cone_closure: shape mismatch");
  ConeResult r;
  r.margin = -std::real(frob_inner<S>(ts.UV, Z)) - nuclear_norm<S>(project_Tperp(ts, Z));
  r.member = r.margin >= -tol;
  return r;
}

template <class S>
double max_descent_step_bound(const Mat<S>& X, const Mat<S>& Z) {
  const double zn = Z.norm();
  if (!(zn > 0)) throw ArgumentError("max_descent_step_bound: Z must be nonzero");
  return -2.0 * std::real(frob_inner<S>(X, Z)) / zn;
}

template <class S>
double descent_step_limit(const Mat<S>& X, const Mat<S>& Z, double eps_cap, double slack, int bisections) {
  const double base = nuclear_norm<S>(X) + slack;
  auto ok = [&](double eps) { return nuclear_norm<S>(Mat<S>(X + eps * Z)) <= base; };
  if (ok(eps_cap)) return eps_cap;
  double lo = 0.0, hi = eps_cap;
  for (int i = 0; i < bisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

EMuDeltaResult in_E_mu_delta(const FrameMatrix& F, const CMat& X0, const CMat& Z, double mu, double delta,
                             double tol) {
  const auto ts = tangent_space<cplx>(X0);
  if (ts.rank() != 1) throw ArgumentError("in_E_mu_delta: X0 must be rank one");
  EMuDeltaResult r;
  r.mu = incoherence_mu(F, ts.factors.U.col(0));
  r.frob_dev = std::abs(Z.norm() - 1.0);
  r.margin = -std::real(frob_inner<cplx>(ts.UV, Z)) - nuclear_norm<cplx>(project_Tperp(ts, Z));
  r.alignment = -std::real(frob_inner<cplx>(Z, X0)) / X0.norm();
  r.member = r.mu <= mu + tol && r.frob_dev <= tol && r.margin >= -tol && r.alignment >= delta - tol;
  return r;
}

#define LRGEOM_INSTANTIATE(S)                                                              \
  template TangentSpace<S> tangent_space<S>(const Mat<S>&, double);                        \
  template Mat<S> project_T<S>(const TangentSpace<S>&, const Mat<S>&);                     \
  template Mat<S> project_Tperp<S>(const TangentSpace<S>&, const Mat<S>&);                 \
  template SubdiffResult in_subdifferential<S>(const Mat<S>&, const Mat<S>&, double);      \
  template ConeResult in_descent_cone_closure<S>(const Mat<S>&, const Mat<S>&, double);    \
  template double max_descent_step_bound<S>(const Mat<S>&, const Mat<S>&);                 \
  template double descent_step_limit<S>(const Mat<S>&, const Mat<S>&, double, double, int);

LRGEOM_INSTANTIATE(double)
LRGEOM_INSTANTIATE(cplx)

#undef LRGEOM_INSTANTIATE

}  // namespace lrgeom
