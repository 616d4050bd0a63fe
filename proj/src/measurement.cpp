#include "lrgeom/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "lrgeom/error.hpp"
#include "lrgeom/random.hpp"

namespace lrgeom {

std::string to_string(SignalKind k) { return k == SignalKind::kFlat ? "flat" : "gaussian"; }

SignalKind signal_kind_from_string(const std::string& s) {
  if (s == "gaussian") return SignalKind::kGaussian;
  if (s == "flat") return SignalKind::kFlat;
  throw ConfigError("unknown signal kind '" + s + "'");
}

namespace {

CVec unit(CVec v, const char* what) {
  const double n = v.norm();
  if (!(n > 0)) throw DegenerateInputError(std::string(what) + " drew a zero vector");
  return v / n;
}

CVec flat_vector(Index n, Rng& rng) {
  CVec v(n);
  for (Index k = 0; k < n; ++k) {
    const double ph = 2.0 * M_PI * uniform01(rng);
    v(k) = cplx(std::cos(ph), std::sin(ph));
  }
  return v;
}

CMat draw_c_rows(Index L, Index N, Rng& rng) { return gaussian_complex(L, N, rng); }

}  // namespace

CVec DeconvInstance::y() const { return deconv_forward(*this, X0()) + e; }

DeconvInstance make_deconv_instance(FrameMatrix frame, Index N, std::uint64_t seed, SignalKind signal) {
  if (N < 1) throw DimensionError("make_deconv_instance: N must be >= 1");
  Rng rng = make_rng(seed, 0);
  DeconvInstance inst;
  inst.c_rows = draw_c_rows(frame.L(), N, rng);
  const Index K = frame.K();
  CVec h = signal == SignalKind::kFlat ? flat_vector(K, rng) : CVec(gaussian_complex(K, 1, rng));
  inst.h0 = unit(h, "make_deconv_instance: h0");
  inst.m0 = unit(gaussian_complex(N, 1, rng), "make_deconv_instance: m0");
  inst.frame = std::move(frame);
  inst.e = CVec::Zero(inst.L());
  inst.seed = seed;
  inst.signal = signal;
  return inst;
}

DeconvInstance make_deconv_instance(FrameMatrix frame, Index N, std::uint64_t seed, CVec h0, CVec m0) {
  if (N < 1) throw DimensionError("make_deconv_instance: N must be >= 1");
  if (h0.size() != frame.K() || m0.size() != N)
    throw DimensionError("make_deconv_instance: h0/m0 lengths must be K/N");
  if (!h0.allFinite() || !m0.allFinite()) throw NumericError("make_deconv_instance: non-finite signal");
  Rng rng = make_rng(seed, 0);
  DeconvInstance inst;
  inst.c_rows = draw_c_rows(frame.L(), N, rng);
  inst.frame = std::move(frame);
  inst.h0 = std::move(h0);
  inst.m0 = std::move(m0);
  inst.e = CVec::Zero(inst.L());
  inst.seed = seed;
  return inst;
}

DeconvInstance with_noise(DeconvInstance inst, CVec e, double tau) {
  if (e.size() != inst.L()) throw DimensionError("with_noise: e must have length L");
  if (tau < 0) throw ArgumentError("with_noise: tau must be nonnegative");
  if (e.norm() > tau * (1 + 1e-12)) throw ArgumentError("with_noise: ||e|| exceeds tau");
  inst.e = std::move(e);
  inst.tau = tau;
  return inst;
}

CVec deconv_forward(const DeconvInstance& inst, const CMat& X) {
  if (X.rows() != inst.K() || X.cols() != inst.N()) throw DimensionError("deconv_forward: X must be K x N");
  // A(X)_l = b_l^* X c_l
  return (inst.frame.B.conjugate() * X).cwiseProduct(inst.c_rows).rowwise().sum();
}

CMat deconv_adjoint(const DeconvInstance& inst, const CVec& v) {
  if (v.size() != inst.L()) throw DimensionError("deconv_adjoint: v must have length L");
  // sum_l v_l b_l c_l^*
  return inst.frame.B.transpose() * v.asDiagonal() * inst.c_rows.conjugate();
}

LinearMap<cplx> deconv_operator(const DeconvInstance& inst) {
  LinearMap<cplx> A;
  A.rows = inst.K();
  A.cols = inst.N();
  A.m = inst.L();
  // The instance is captured by reference; it must outlive the map.
  A.forward = [&inst](const CMat& X) { return deconv_forward(inst, X); };
  A.adjoint = [&inst](const CVec& v) { return deconv_adjoint(inst, v); };
  return A;
}

double fft_consistency(const DeconvInstance& inst) {
  const Index L = inst.L();
  const double sL = std::sqrt(static_cast<double>(L));
  // Time-domain model: F B_time = conj(B), C_time = L^{-1/2} F^* c_rows.
  const CMat Bc = inst.frame.B.conjugate();
  CMat B_time(L, inst.K()), C_time(L, inst.N());
  for (Index k = 0; k < inst.K(); ++k) B_time.col(k) = inverse_unitary_dft(Bc.col(k));
  for (Index n = 0; n < inst.N(); ++n) C_time.col(n) = inverse_unitary_dft(inst.c_rows.col(n)) / sL;
  const CVec w = B_time * inst.h0;
  const CVec x = C_time * inst.m0.conjugate();
  CVec conv = CVec::Zero(L);
  for (Index k = 0; k < L; ++k)
    for (Index j = 0; j < L; ++j) conv(k) += w(j) * x((k - j + L) % L);
  const CVec yhat = unitary_dft(conv);
  const CVec direct = deconv_forward(inst, inst.X0());
  return (yhat - direct).cwiseAbs().maxCoeff();
}

RVec CompletionInstance::y() const { return mc_forward(*this, X0) + e; }

std::vector<Index> CompletionInstance::sampled_columns(Index a) const {
  std::vector<Index> cols;
  for (const auto& [ai, bi] : pattern)
    if (ai == a) cols.push_back(bi);
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  return cols;
}

std::vector<Index> CompletionInstance::measurements_in_row(Index a) const {
  std::vector<Index> idx;
  for (size_t i = 0; i < pattern.size(); ++i)
    if (pattern[i].first == a) idx.push_back(static_cast<Index>(i));
  return idx;
}

namespace {

void validate_completion(const CompletionInstance& inst) {
  if (inst.n1 < 1 || inst.n2 < 1) throw DimensionError("completion: dimensions must be positive");
  if (inst.n1 < inst.n2) throw DimensionError("completion: need n1 >= n2");
  if (inst.m < 1) throw DimensionError("completion: need m >= 1");
  for (const auto& [a, b] : inst.pattern)
    if (a < 0 || a >= inst.n1 || b < 0 || b >= inst.n2)
      throw DimensionError("completion: pattern entry out of range");
}

}  // namespace

CompletionInstance make_completion_instance(Index n1, Index n2, Index r, Index m, std::uint64_t seed) {
  if (r < 1 || r > n2) throw DimensionError("make_completion_instance: need 1 <= r <= n2");
  CompletionInstance inst;
  inst.n1 = n1;
  inst.n2 = n2;
  inst.r = r;
  inst.m = m;
  inst.seed = seed;
  if (n1 < n2 || m < 1) validate_completion(inst);
  Rng rng = make_rng(seed, 0);
  const RMat U = haar_isometry<double>(n1, r, rng);
  const RMat V = haar_isometry<double>(n2, r, rng);
  std::uniform_int_distribution<Index> da(0, n1 - 1), db(0, n2 - 1);
  inst.pattern.reserve(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const Index a = da(rng);
    const Index b = db(rng);
    inst.pattern.emplace_back(a, b);
  }
  inst.X0 = U * V.transpose();
  inst.factors.U = U;
  inst.factors.V = V;
  inst.factors.sigma = RVec::Ones(r);
  inst.e = RVec::Zero(m);
  validate_completion(inst);
  return inst;
}

CompletionInstance make_completion_instance(RMat X0, std::vector<std::pair<Index, Index>> pattern,
                                            std::uint64_t seed) {
  CompletionInstance inst;
  inst.n1 = X0.rows();
  inst.n2 = X0.cols();
  inst.m = static_cast<Index>(pattern.size());
  inst.pattern = std::move(pattern);
  inst.seed = seed;
  validate_completion(inst);
  inst.factors = svd<double>(X0);
  inst.r = inst.factors.rank();
  inst.X0 = std::move(X0);
  inst.e = RVec::Zero(inst.m);
  return inst;
}

CompletionInstance with_noise(CompletionInstance inst, RVec e, double tau) {
  if (e.size() != inst.m) throw DimensionError("with_noise: e must have length m");
  if (tau < 0) throw ArgumentError("with_noise: tau must be nonnegative");
  if (e.norm() > tau * (1 + 1e-12)) throw ArgumentError("with_noise: ||e|| exceeds tau");
  inst.e = std::move(e);
  inst.tau = tau;
  return inst;
}

RVec mc_forward(const CompletionInstance& inst, const RMat& X) {
  if (X.rows() != inst.n1 || X.cols() != inst.n2) throw DimensionError("mc_forward: X must be n1 x n2");
  const double s = inst.scale();
  RVec out(inst.m);
  for (Index i = 0; i < inst.m; ++i) {
    const auto& [a, b] = inst.pattern[static_cast<size_t>(i)];
    out(i) = s * X(a, b);
  }
  return out;
}

RMat mc_adjoint(const CompletionInstance& inst, const RVec& v) {
  if (v.size() != inst.m) throw DimensionError("mc_adjoint: v must have length m");
  const double s = inst.scale();
  RMat out = RMat::Zero(inst.n1, inst.n2);
  for (Index i = 0; i < inst.m; ++i) {
    const auto& [a, b] = inst.pattern[static_cast<size_t>(i)];
    out(a, b) += s * v(i);
  }
  return out;
}

LinearMap<double> mc_operator(const CompletionInstance& inst) {
  LinearMap<double> A;
  A.rows = inst.n1;
  A.cols = inst.n2;
  A.m = inst.m;
  A.forward = [&inst](const RMat& X) { return mc_forward(inst, X); };
  A.adjoint = [&inst](const RVec& v) { return mc_adjoint(inst, v); };
  return A;
}

template <class S>
double operator_norm_estimate(const LinearMap<S>& A, std::uint64_t seed, int max_iters, double tol) {
  Rng rng = make_rng(seed, 0x504f574552ULL);
  Mat<S> X = gaussian<S>(A.rows, A.cols, rng);
  X /= X.norm();
  double prev = 0;
  for (int it = 0; it < max_iters; ++it) {
    Mat<S> Y = A.adjoint(A.forward(X));
    const double n = Y.norm();
    if (!std::isfinite(n)) throw NumericError("operator_norm_estimate: non-finite iterate");
    if (n == 0) return 0.0;
    const double est = std::sqrt(n);
    X = Y / n;
    if (it > 0 && std::abs(est - prev) <= tol * est) return est;
    prev = est;
  }
  throw NumericError("operator_norm_estimate: power iteration did not converge");
}

template <class S>
Mat<S> materialize(const LinearMap<S>& A) {
  const Index d = A.rows * A.cols;
  Mat<S> M(A.m, d);
  Mat<S> E = Mat<S>::Zero(A.rows, A.cols);
  for (Index j = 0; j < d; ++j) {
    E(j % A.rows, j / A.rows) = S(1);
    M.col(j) = A.forward(E);
    E(j % A.rows, j / A.rows) = S(0);
  }
  return M;
}

template double operator_norm_estimate<double>(const LinearMap<double>&, std::uint64_t, int, double);
template double operator_norm_estimate<cplx>(const LinearMap<cplx>&, std::uint64_t, int, double);
template Mat<double> materialize<double>(const LinearMap<double>&);
template Mat<cplx> materialize<cplx>(const LinearMap<cplx>&);

}  // namespace lrgeom
