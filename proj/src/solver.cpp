#include "lrgeom/solver.hpp"

#include <algorithm>
#include <cmath>

#include "lrgeom/error.hpp"

namespace lrgeom {

namespace {

// Power iteration is a lower estimate; inflate before deriving steps.
constexpr double kNormSafety = 1.01;

// Residual balancing (Goldstein et al.): when one residual dominates by
// kBalance, shift step mass toward that side by (1 - alpha); alpha decays.
constexpr double kBalance = 1.5;
constexpr double kAlpha0 = 0.5;
constexpr double kAlphaDecay = 0.95;

}  // namespace

template <class S>
Mat<S> svt(const Mat<S>& X, double threshold) {
  if (threshold < 0) throw ArgumentError("svt: negative threshold");
  if (threshold == 0) return X;
  SvdFactors<S> f = svd<S>(X, 0.0);
  Index keep = 0;
  while (keep < f.sigma.size() && f.sigma(keep) > threshold) ++keep;
  if (keep == 0) return Mat<S>::Zero(X.rows(), X.cols());
  const RVec s = (f.sigma.head(keep).array() - threshold).matrix();
  return f.U.leftCols(keep) * s.template cast<S>().asDiagonal() * f.V.leftCols(keep).adjoint();
}

template <class S>
Vec<S> project_ball(const Vec<S>& v, const Vec<S>& y, double tau) {
  if (tau < 0) throw ArgumentError("project_ball: negative radius");
  const Vec<S> d = v - y;
  const double n = d.norm();
  if (n <= tau) return v;
  return y + (tau / n) * d;
}

template <class S>
SolverResult<S> solve(const LinearMap<S>& A, const Vec<S>& y, double tau, const SolverConfig& cfg) {
  if (tau < 0) throw ArgumentError("solve: tau must be nonnegative");
  if (y.size() != A.m) throw DimensionError("solve: y has wrong length");
  if (cfg.max_iters < 1) throw ConfigError("solve: max_iters must be positive");
  if (cfg.stop_tol_rel <= 0 || cfg.feasibility_tol < 0) throw ConfigError("solve: tolerances must be positive");

  SolverResult<S> res;
  const double ynorm = y.norm();
  const double feas_tol = cfg.feasibility_tol > 0 ? cfg.feasibility_tol : 1e-8 * std::max(1.0, ynorm);
  if (tau >= ynorm) {
    res.X_hat = Mat<S>::Zero(A.rows, A.cols);
    res.converged = true;
    return res;
  }

  const double L = cfg.op_norm > 0 ? cfg.op_norm : operator_norm_estimate(A, cfg.seed) * kNormSafety;
  if (!(L > 0)) throw NumericError("solve: operator is zero");
  double s = cfg.primal_step, sigma = cfg.dual_step;
  if (s <= 0 && sigma <= 0) {
    s = sigma = 1.0 / L;
  } else if (s <= 0) {
    s = 1.0 / (sigma * L * L);
  } else if (sigma <= 0) {
    sigma = 1.0 / (s * L * L);
  }
  if (s * sigma * L * L > 1.0 + 1e-12) throw ConfigError("solve: step sizes violate s*sigma*||A||^2 <= 1");
  res.op_norm = L;
  double alpha = kAlpha0;

  Mat<S> X = Mat<S>::Zero(A.rows, A.cols);
  Mat<S> X_avg = X;
  Vec<S> v = Vec<S>::Zero(A.m);
  Vec<S> AX = Vec<S>::Zero(A.m);      // A(X)
  Vec<S> AXbar = AX;                  // A(2X - X_prev)
  Vec<S> AX_avg = AX;

  auto residual_of = [&](const Vec<S>& ax) { return std::max(0.0, (ax - y).norm() - tau); };

  for (int it = 1; it <= cfg.max_iters; ++it) {
    // dual: prox of sigma g^*, g the indicator of the ball, via Moreau
    const Vec<S> u = v + sigma * AXbar;
    const Vec<S> v_new = u - sigma * project_ball<S>(Vec<S>(u / sigma), y, tau);
    // primal
    const Mat<S> X_new = svt<S>(Mat<S>(X - s * A.adjoint(v_new)), s);
    const Vec<S> AX_new = A.forward(X_new);
    const double change = (X_new - X).norm() / std::max(1.0, X_new.norm());
    if (cfg.adaptive_steps) {
      const double p_res = (X - X_new).norm() / s;
      const double d_res = ((v - v_new) / sigma + AXbar - AX_new).norm();
      if (p_res > kBalance * d_res) {
        s /= 1.0 - alpha;
        sigma *= 1.0 - alpha;
        alpha *= kAlphaDecay;
      } else if (d_res > kBalance * p_res) {
        s *= 1.0 - alpha;
        sigma /= 1.0 - alpha;
        alpha *= kAlphaDecay;
      }
    }
    v = v_new;
    AXbar = 2.0 * AX_new - AX;
    X = X_new;
    AX = AX_new;
    const double w = 1.0 / static_cast<double>(it);
    X_avg += w * (X - X_avg);
    AX_avg += w * (AX - AX_avg);

    const double feas = residual_of(AX);
    res.iterations = it;
    const bool done = change <= cfg.stop_tol_rel && feas <= feas_tol;
    if (cfg.log_every > 0 && (it % cfg.log_every == 0 || done || it == cfg.max_iters)) {
      TraceRow row;
      row.iter = it;
      row.objective = nuclear_norm<S>(X);
      row.feasibility_residual = feas;
      row.rel_change = change;
      row.averaged_residual = residual_of(AX_avg);
      res.trace.push_back(row);
    }
    if (done) {
      res.converged = true;
      break;
    }
  }
  res.primal_step = s;
  res.dual_step = sigma;
  res.X_hat = X;
  res.objective = nuclear_norm<S>(X);
  res.feasibility_residual = residual_of(A.forward(X));
  return res;
}

#define LRGEOM_INSTANTIATE(S)                                                            \
  template Mat<S> svt<S>(const Mat<S>&, double);                                         \
  template Vec<S> project_ball<S>(const Vec<S>&, const Vec<S>&, double);                 \
  template SolverResult<S> solve<S>(const LinearMap<S>&, const Vec<S>&, double, const SolverConfig&);

LRGEOM_INSTANTIATE(double)
LRGEOM_INSTANTIATE(cplx)

#undef LRGEOM_INSTANTIATE

}  // namespace lrgeom
