#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lrgeom/frames.hpp"
#include "lrgeom/numerics.hpp"

namespace lrgeom {

/// Matrix-to-vector linear map with its adjoint.
template <class S>
struct LinearMap {
  Index rows = 0, cols = 0;  // domain shape
  Index m = 0;               // codomain length
  std::function<Vec<S>(const Mat<S>&)> forward;
  std::function<Mat<S>(const Vec<S>&)> adjoint;
};

enum class SignalKind { kGaussian, kFlat };

std::string to_string(SignalKind k);
SignalKind signal_kind_from_string(const std::string& s);

struct DeconvInstance {
  FrameMatrix frame;
  CMat c_rows;  // L x N, row l is c_l^T
  CVec h0, m0;
  CVec e;  // noise, ||e|| <= tau
  double tau = 0;
  std::uint64_t seed = 0;
  SignalKind signal = SignalKind::kGaussian;

  Index L() const { return frame.L(); }
  Index K() const { return frame.K(); }
  Index N() const { return c_rows.cols(); }
  CMat X0() const { return h0 * m0.adjoint(); }
  CVec y() const;
};

/// Draws c_l iid CN(0,1) and, in that order, h0 and m0 from `seed`.
/// Gaussian signals are CN(0,1) vectors; flat h0 has unit-modulus entries
/// with random phases. Both are scaled to unit norm.
DeconvInstance make_deconv_instance(FrameMatrix frame, Index N, std::uint64_t seed,
                                    SignalKind signal = SignalKind::kGaussian);

/// Same draw of c_l, caller-supplied ground truth.
DeconvInstance make_deconv_instance(FrameMatrix frame, Index N, std::uint64_t seed, CVec h0,
                                    CVec m0);

/// Returns a copy with noise e attached; throws if ||e|| > tau.
DeconvInstance with_noise(DeconvInstance inst, CVec e, double tau);

CVec deconv_forward(const DeconvInstance& inst, const CMat& X);
CMat deconv_adjoint(const DeconvInstance& inst, const CVec& v);
LinearMap<cplx> deconv_operator(const DeconvInstance& inst);

/// max_l |yhat_l - A(h0 m0^*)_l| where yhat is computed through a
/// time-domain model and direct circular convolution.
double fft_consistency(const DeconvInstance& inst);

struct CompletionInstance {
  Index n1 = 0, n2 = 0, r = 0, m = 0;
  std::vector<std::pair<Index, Index>> pattern;  // (a_i, b_i), 0-based
  RMat X0;
  SvdFactors<double> factors;
  RVec e;
  double tau = 0;
  std::uint64_t seed = 0;

  double scale() const { return std::sqrt(static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(m)); }
  RVec y() const;
  /// N_a: sampled column indices of row a (with multiplicity removed).
  std::vector<Index> sampled_columns(Index a) const;
  /// I_a: measurement indices i with a_i = a.
  std::vector<Index> measurements_in_row(Index a) const;
};

/// Haar U (n1 x r), V (n2 x r), X0 = U V^T, pattern drawn uniformly with
/// replacement.
CompletionInstance make_completion_instance(Index n1, Index n2, Index r, Index m, std::uint64_t seed);

/// Caller-supplied ground truth and pattern.
CompletionInstance make_completion_instance(RMat X0, std::vector<std::pair<Index, Index>> pattern,
                                            std::uint64_t seed = 0);

CompletionInstance with_noise(CompletionInstance inst, RVec e, double tau);

RVec mc_forward(const CompletionInstance& inst, const RMat& X);
RMat mc_adjoint(const CompletionInstance& inst, const RVec& v);
LinearMap<double> mc_operator(const CompletionInstance& inst);

/// Power iteration on A^*A. Throws NumericError if the relative change does
/// not fall below `tol` within `max_iters`.
template <class S>
double operator_norm_estimate(const LinearMap<S>& A, std::uint64_t seed = 0, int max_iters = 5000,
                              double tol = 1e-9);

/// Dense m x (rows*cols) matrix of A acting on column-major vec(X).
template <class S>
Mat<S> materialize(const LinearMap<S>& A);

}  // namespace lrgeom
