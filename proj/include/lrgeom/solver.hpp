#pragma once

#include <vector>

#include "lrgeom/measurement.hpp"
#include "lrgeom/numerics.hpp"

namespace lrgeom {

struct SolverConfig {
  int max_iters = 50000;
  double primal_step = 0;  // 0 selects automatic steps from ||A||
  double dual_step = 0;
  bool adaptive_steps = true;  // residual balancing; keeps s * sigma fixed
  double stop_tol_rel = 1e-6;
  double feasibility_tol = 0;  // 0 selects 1e-8 * max(1, ||y||)
  int log_every = 0;           // 0 disables the trace
  double op_norm = 0;          // 0 estimates ||A|| by power iteration
  std::uint64_t seed = 0;      // power-iteration start
};

struct TraceRow {
  int iter = 0;
  double objective = 0;
  double feasibility_residual = 0;
  double rel_change = 0;
  double averaged_residual = 0;  // residual of the running average iterate
};

template <class S>
struct SolverResult {
  Mat<S> X_hat;
  int iterations = 0;
  double objective = 0;
  double feasibility_residual = 0;  // max(0, ||A(X) - y|| - tau)
  bool converged = false;
  double primal_step = 0, dual_step = 0, op_norm = 0;  // final steps
  std::vector<TraceRow> trace;
};

/// Singular-value soft-thresholding.
template <class S>
Mat<S> svt(const Mat<S>& X, double threshold);

/// Euclidean projection onto {v : ||v - y|| <= tau}.
template <class S>
Vec<S> project_ball(const Vec<S>& v, const Vec<S>& y, double tau);

/// minimize ||X||_* subject to ||A(X) - y|| <= tau by a primal-dual
/// (Chambolle-Pock) iteration.
template <class S>
SolverResult<S> solve(const LinearMap<S>& A, const Vec<S>& y, double tau, const SolverConfig& cfg = {});

}  // namespace lrgeom
