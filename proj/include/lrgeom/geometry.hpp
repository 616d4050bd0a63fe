#pragma once

#include <algorithm>

#include "lrgeom/frames.hpp"
#include "lrgeom/numerics.hpp"

namespace lrgeom {

template <class S>
struct TangentSpace {
  SvdFactors<S> factors;
  Mat<S> UV;  // U V^*

  Index rows() const { return factors.U.rows(); }
  Index cols() const { return factors.V.rows(); }
  Index rank() const { return factors.rank(); }
};

template <class S>
TangentSpace<S> tangent_space(const Mat<S>& X, double trunc_tol = kDefaultTruncTol);

/// U U^* M + M V V^* - U U^* M V V^*
template <class S>
Mat<S> project_T(const TangentSpace<S>& ts, const Mat<S>& M);

template <class S>
Mat<S> project_Tperp(const TangentSpace<S>& ts, const Mat<S>& M);

/// Default membership slack 1e-8 * max(1, ||X||_F).
template <class S>
double default_tol(const Mat<S>& X) {
  return 1e-8 * std::max(1.0, X.norm());
}

struct SubdiffResult {
  bool member = false;
  double tangent_residual = 0;  // ||P_T W - U V^*||_F
  double spectral_residual = 0;  // ||P_Tperp W||
};

template <class S>
SubdiffResult in_subdifferential(const Mat<S>& X, const Mat<S>& W, double tol);

struct ConeResult {
  bool member = false;
  double margin = 0;  // -Re<UV^*, Z> - ||P_Tperp Z||_*
};

template <class S>
ConeResult in_descent_cone_closure(const Mat<S>& X, const Mat<S>& Z, double tol);

/// -2 Re<X, Z/||Z||_F>. For rank-one X any t >= 0 with ||X + tZ||_* <= ||X||_*
/// has t ||Z||_F bounded by this value.
template <class S>
double max_descent_step_bound(const Mat<S>& X, const Mat<S>& Z);

/// sup{eps in [0, eps_cap] : ||X + eps Z||_* <= ||X||_* + slack}, by bisection
/// on the convex map eps -> ||X + eps Z||_*.
template <class S>
double descent_step_limit(const Mat<S>& X, const Mat<S>& Z, double eps_cap = 1.0, double slack = 0.0,
                          int bisections = 60);

struct EMuDeltaResult {
  bool member = false;
  double mu = 0;         // incoherence of the left factor
  double frob_dev = 0;   // | ||Z||_F - 1 |
  double margin = 0;     // descent-cone margin
  double alignment = 0;  // -Re<Z, X0>/||X0||_F
};

EMuDeltaResult in_E_mu_delta(const FrameMatrix& F, const CMat& X0, const CMat& Z, double mu, double delta,
                             double tol);

}  // namespace lrgeom
