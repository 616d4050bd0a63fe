#pragma once

#include <cstdint>
#include <vector>

#include "lrgeom/measurement.hpp"
#include "lrgeom/numerics.hpp"

namespace lrgeom {

/// Kernel certificate for blind deconvolution. Matrices and scalars are in
/// normalized units (||h0|| = ||m0|| = 1); `scale` = ||h0|| ||m0|| converts
/// back to the instance.
struct DeconvCertificate {
  Index block_index = -1;
  Index coordinate = -1;  // column j = 3 * block_index defining the block
  std::vector<double> par_norms_sq;  // ||m_i^par||^2 for every block
  CVec m_par, m_perp;
  CMat W, Z;
  double beta = 0;
  double ratio = 0;  // ||A(Z)|| / ||Z||_F
  double tau0 = 0;   // ||A(Z)|| / 2
  double scale = 1;
  double eps_star = 1;  // largest step in (0,1] with ||X0 + eps Z||_* <= ||X0||_*

  bool event1 = false;  // ||A(X0)|| < 2 ||X0||_F
  bool event2 = false;  // two-sided projection bound for the chosen block

  // measured invariants
  double AX0_norm = 0;
  double AW_norm = 0;
  double W_frob = 0;
  double Z_frob = 0;
  double cone_margin = 0;
  double alignment = 0;            // -Re<Z, X0>
  double alignment_predicted = 0;  // beta + |h0_j| ||m_perp||
  double tperp_nuclear_W = 0;      // ||P_Tperp W||_*
  double mu_h0 = 0;
  double alignment_bound = 0;         // mu sqrt(|B_i|) / sqrt(L) + beta
  double alignment_bound_simple = 0;  // mu / sqrt(L) + beta, diagnostic only
  double ratio_bound = 0;             // 12 sqrt(L / (K N))
  bool ratio_within_bound = false;
};

struct CompletionCertificate {
  Index row_index = -1;
  RVec x;
  RVec w_a;
  RMat W, Z;
  double beta = 0;
  double ratio = 0;
  double proj_norm = 0;  // ||P_{N_a} V||
  double proj_threshold = 0;  // sqrt(2m / (n1 n2))
  double tau0 = 0;
  double scale = 1;
  double eps_star = 1;

  bool event1 = false;  // ||A(UV^*)||^2 <= 2r
  bool event2 = false;  // proj_norm <= proj_threshold

  double AUV_sq = 0;
  double AW_norm = 0;
  double Z_frob = 0;
  double tperp_nuclear_Z = 0;
  double cone_margin = 0;
  double alignment = 0;  // -<UV^*, Z>
  double ratio_bound = 0;  // 8 sqrt(m / (r n1 n2))
  bool ratio_within_bound = false;
};

/// Throws AdmissibilityError if no block passes the two-sided bound,
/// DegenerateInputError on rank-deficient blocks or vanishing m_perp,
/// IntegrityError if a construction invariant fails.
DeconvCertificate deconv_certificate(const DeconvInstance& inst);

/// x defaults to e_1 when empty.
CompletionCertificate mc_certificate(const CompletionInstance& inst, const RVec& x = RVec());

struct NoiseReport {
  double t = 0;
  double tau0 = 0;      // effective tau0 of the rescaled direction, instance units
  double eps_star = 1;
  double residual = 0;  // ||A(X~) - y||
  double nuclear_tilde = 0;
  double nuclear_X0 = 0;
  double distance = 0;        // ||X~ - X0||_F
  double distance_bound = 0;  // (t tau0 / C3) sqrt(...)
  double collinear_lower = 0;  // (1 - t beta') ||X0||_*
};

template <class S>
struct AdversarialNoise {
  Vec<S> e, y;
  Mat<S> X_tilde;
  NoiseReport report;
};

/// e = (t/2) A(Z'), y = A(X0) + e, X~ = X0 + t Z' with Z' = eps_star * scale * Z.
AdversarialNoise<cplx> adversarial_noise(const DeconvCertificate& cert, const DeconvInstance& inst, double t);
AdversarialNoise<double> adversarial_noise(const CompletionCertificate& cert, const CompletionInstance& inst,
                                           double t);

struct ConeSample {
  CMat Z;  // unit Frobenius norm
  double margin = 0;
  double alignment = 0;  // -Re<Z, X0>/||X0||_F
};

/// Random descent-cone directions at a rank-one X0:
/// Z' = -s UV^* + (tangent part orthogonal to UV^*) + gamma P_Tperp G with
/// ||gamma P_Tperp G||_* = u s, u ~ U[0,1], s log-uniform.
std::vector<ConeSample> sample_descent_cone(const CMat& X0, Index count, std::uint64_t seed);

/// Unit W in T(X0) orthogonal to X0 minimizing ||A(W)||, from the dense
/// restriction of A to that subspace.
struct TangentDirection {
  CMat W;
  CVec AW;
  double gain = 0;  // ||A(W)||
};
TangentDirection tangent_min_direction(const DeconvInstance& inst);

}  // namespace lrgeom
