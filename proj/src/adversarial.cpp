#include "lrgeom/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lrgeom/error.hpp"
#include "lrgeom/geometry.hpp"
#include "lrgeom/random.hpp"

namespace lrgeom {

namespace {

constexpr double kKernelTol = 1e-9;
constexpr double kSpanTol = 1e-10;

void integrity(bool ok, const std::string& what) {
  if (!ok) throw IntegrityError("certificate invariant violated: " + what);
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

DeconvCertificate deconv_certificate(const DeconvInstance& inst) {
  const Index L = inst.L(), K = inst.K(), N = inst.N();
  const double dL = static_cast<double>(L), dKN = static_cast<double>(K) * static_cast<double>(N);
  if (inst.frame.kind != "tetris") throw ArgumentError("deconv_certificate: frame must be a spectral tetris frame");
  if (K < 3) throw DimensionError("deconv_certificate: need K >= 3");
  if (2 * K > L || 36.0 * dL > dKN)
    throw DimensionError("deconv_certificate: need 2K <= L <= KN/36 (L=" + std::to_string(L) +
                         ", K=" + std::to_string(K) + ", N=" + std::to_string(N) + ")");
  const double hn = inst.h0.norm(), mn = inst.m0.norm();
  if (!(hn > 0) || !(mn > 0)) throw ArgumentError("deconv_certificate: h0 and m0 must be nonzero");

  const CVec h = inst.h0 / hn;
  const CVec m = inst.m0 / mn;
  const CMat X0 = h * m.adjoint();
  const BlockPartition P = blocks(inst.frame);

  DeconvCertificate c;
  c.scale = hn * mn;
  const double lo = dL / (2.0 * dKN), hi = 6.0 * dL / dKN;
  std::vector<CVec> par(P.blocks.size());
  for (size_t i = 0; i < P.blocks.size(); ++i) {
    const auto& blk = P.blocks[i];
    CMat span(N, static_cast<Index>(blk.size()));
    for (size_t q = 0; q < blk.size(); ++q) span.col(static_cast<Index>(q)) = inst.c_rows.row(blk[q]).transpose();
    Index rank = 0;
    const CMat Q = orthonormal_basis<cplx>(span, kSpanTol, &rank);
    if (rank < std::min<Index>(N, static_cast<Index>(blk.size())))
      throw DegenerateInputError("deconv_certificate: rows c_l of block " + std::to_string(i) + " are rank deficient");
    par[i] = Q * (Q.adjoint() * m);
    c.par_norms_sq.push_back(par[i].squaredNorm());
  }

  Index best = -1;
  for (size_t i = 0; i < par.size(); ++i) {
    const double v = c.par_norms_sq[i];
    if (v < lo || v > hi) continue;
    if (best < 0 || v < c.par_norms_sq[static_cast<size_t>(best)]) best = static_cast<Index>(i);
  }
  if (best < 0) {
    std::string msg = "deconv_certificate: no admissible block, need " + num(lo) + " <= ||m_par||^2 <= " + num(hi) + ", got";
    for (double v : c.par_norms_sq) msg += " " + num(v);
    throw AdmissibilityError(msg, c.par_norms_sq);
  }
  c.block_index = best;
  c.coordinate = P.coordinate[static_cast<size_t>(best)];
  c.event2 = true;
  c.m_par = par[static_cast<size_t>(best)];
  c.m_perp = m - c.m_par;
  const double perp = c.m_perp.norm();
  if (!(perp > 0)) throw DegenerateInputError("deconv_certificate: m_perp vanishes");

  const Index j = c.coordinate;
  const double hj = std::abs(h(j));
  const cplx phase = hj > 0 ? h(j) / hj : cplx(1.0, 0.0);
  c.W = -phase * CVec::Unit(K, j) * c.m_perp.adjoint() / perp;
  c.beta = 3.0 * std::sqrt(dL / dKN);
  c.Z = c.W - c.beta * X0;

  const CVec AZ = deconv_forward(inst, c.Z);
  c.AX0_norm = deconv_forward(inst, X0).norm();
  c.event1 = c.AX0_norm < 2.0;
  c.AW_norm = deconv_forward(inst, c.W).norm();
  c.W_frob = c.W.norm();
  c.Z_frob = c.Z.norm();
  c.ratio = AZ.norm() / c.Z_frob;
  c.tau0 = AZ.norm() / 2.0;

  const auto ts = tangent_space<cplx>(X0);
  c.tperp_nuclear_W = nuclear_norm<cplx>(project_Tperp(ts, c.W));
  c.cone_margin = -std::real(frob_inner<cplx>(ts.UV, c.Z)) - nuclear_norm<cplx>(project_Tperp(ts, c.Z));
  c.alignment = -std::real(frob_inner<cplx>(c.Z, X0));
  c.alignment_predicted = c.beta + hj * perp;
  c.mu_h0 = incoherence_mu(inst.frame, h);
  const double bsz = static_cast<double>(P.blocks[static_cast<size_t>(best)].size());
  c.alignment_bound = c.mu_h0 * std::sqrt(bsz) / std::sqrt(dL) + c.beta;
  c.alignment_bound_simple = c.mu_h0 / std::sqrt(dL) + c.beta;
  c.ratio_bound = 12.0 * std::sqrt(dL / dKN);
  c.ratio_within_bound = c.ratio <= c.ratio_bound;

  integrity(std::abs(c.W_frob - 1.0) <= 1e-10, "||W||_F = 1 (got " + num(c.W_frob) + ")");
  integrity(c.AW_norm <= kKernelTol, "A(W) = 0 (got " + num(c.AW_norm) + ")");
  integrity(c.Z_frob >= 0.5, "||Z||_F >= 1/2 (got " + num(c.Z_frob) + ")");
  integrity(c.cone_margin >= -kKernelTol, "descent-cone margin (got " + num(c.cone_margin) + ")");
  integrity(std::abs(c.alignment - c.alignment_predicted) <= 1e-9, "alignment identity");
  integrity(c.tperp_nuclear_W <= c.m_par.norm() + 1e-9, "||P_Tperp W||_* <= ||m_par||");
  integrity(std::abs(frob_inner<cplx>(c.Z, X0)) <= c.alignment_bound + 1e-9, "alignment smallness");

  c.eps_star = descent_step_limit<cplx>(X0, c.Z);
  integrity(c.eps_star > 0, "positive descent step");
  return c;
}

CompletionCertificate mc_certificate(const CompletionInstance& inst, const RVec& x_in) {
  const Index n1 = inst.n1, n2 = inst.n2, m = inst.m;
  const Index r = inst.factors.rank();
  if (r < 1) throw ArgumentError("mc_certificate: rank must be >= 1");
  if (r > n2) throw DimensionError("mc_certificate: rank exceeds n2");
  const double dn = static_cast<double>(n1) * static_cast<double>(n2), dm = static_cast<double>(m);
  if (32.0 * dm > dn) throw DimensionError("mc_certificate: need m <= n1 n2 / 32");
  RVec x = x_in.size() ? x_in : RVec(RVec::Unit(r, 0));
  if (x.size() != r) throw DimensionError("mc_certificate: x must have length r");
  if (std::abs(x.norm() - 1.0) > 1e-12) throw ArgumentError("mc_certificate: x must be a unit vector");

  const RMat& U = inst.factors.U;
  const RMat& V = inst.factors.V;
  const RMat UV = U * V.transpose();

  CompletionCertificate c;
  c.x = x;
  c.proj_threshold = std::sqrt(2.0 * dm / dn);
  double best = -1;
  for (Index a = 0; a < n1; ++a) {
    const auto cols = inst.sampled_columns(a);
    double pn = 0;
    if (!cols.empty()) {
      RMat Vr(static_cast<Index>(cols.size()), r);
      for (size_t q = 0; q < cols.size(); ++q) Vr.row(static_cast<Index>(q)) = V.row(cols[q]);
      pn = spectral_norm<double>(Vr);
    }
    if (best < 0 || pn < best) {
      best = pn;
      c.row_index = a;
    }
  }
  c.proj_norm = best;
  c.event2 = c.proj_norm <= c.proj_threshold;

  const Index a = c.row_index;
  c.w_a = V * x;
  for (Index b : inst.sampled_columns(a)) c.w_a(b) = 0.0;
  if (!(c.w_a.norm() > 0)) throw DegenerateInputError("mc_certificate: w_a vanishes");

  RMat Ea = RMat::Zero(n1, n2);
  Ea.row(a) = c.w_a.transpose();
  const double inner = frob_inner<double>(Ea, UV);
  const double phase = inner < 0 ? -1.0 : 1.0;
  c.W = -phase * Ea;
  c.beta = 2.0 * std::sqrt(dm / (static_cast<double>(r * r) * dn));
  c.Z = c.W - c.beta * UV;
  c.scale = inst.X0.norm() / std::sqrt(static_cast<double>(r));

  const RVec AZ = mc_forward(inst, c.Z);
  c.AUV_sq = mc_forward(inst, UV).squaredNorm();
  c.event1 = c.AUV_sq <= 2.0 * static_cast<double>(r);
  c.AW_norm = mc_forward(inst, c.W).norm();
  c.Z_frob = c.Z.norm();
  c.ratio = AZ.norm() / c.Z_frob;
  c.tau0 = AZ.norm() / 2.0;

  TangentSpace<double> ts;
  ts.factors = inst.factors;
  ts.UV = UV;
  c.tperp_nuclear_Z = nuclear_norm<double>(project_Tperp(ts, c.Z));
  c.alignment = -frob_inner<double>(UV, c.Z);
  c.cone_margin = c.alignment - c.tperp_nuclear_Z;
  c.ratio_bound = 8.0 * std::sqrt(dm / (static_cast<double>(r) * dn));
  c.ratio_within_bound = c.ratio <= c.ratio_bound;

  integrity(c.AW_norm <= kKernelTol, "A(W) = 0 (got " + num(c.AW_norm) + ")");
  integrity(c.Z_frob > 0.5, "||Z||_F > 1/2 (got " + num(c.Z_frob) + ")");
  integrity(c.alignment >= static_cast<double>(r) * c.beta - 1e-9, "-<UV^*, Z> >= r beta");
  if (c.event2) {
    integrity(c.tperp_nuclear_Z <= c.proj_threshold + 1e-9, "||P_Tperp Z||_* <= sqrt(2m/(n1 n2))");
    integrity(c.cone_margin >= -kKernelTol, "descent-cone margin (got " + num(c.cone_margin) + ")");
  }
  c.eps_star = c.cone_margin > 0 ? descent_step_limit<double>(RMat(inst.X0 / c.scale), c.Z) : 0.0;
  return c;
}

namespace {

template <class S, class Inst, class Cert>
AdversarialNoise<S> assemble_noise(const Cert& cert, const Inst& inst, double t, const Mat<S>& X0,
                                   const LinearMap<S>& A, double c3, double dim_factor) {
  if (!(t > 0) || t > 1) throw ArgumentError("adversarial_noise: need 0 < t <= 1");
  if (!(cert.eps_star > 0)) throw IntegrityError("adversarial_noise: certificate has no descent step");
  const Mat<S> Zs = (cert.eps_star * cert.scale) * cert.Z;
  AdversarialNoise<S> out;
  const Vec<S> AZ = A.forward(Zs);
  out.e = (t / 2.0) * AZ;
  out.y = A.forward(X0) + out.e;
  out.X_tilde = X0 + t * Zs;
  NoiseReport& r = out.report;
  r.t = t;
  r.eps_star = cert.eps_star;
  r.tau0 = AZ.norm() / 2.0;
  r.residual = (A.forward(out.X_tilde) - out.y).norm();
  r.nuclear_tilde = nuclear_norm<S>(out.X_tilde);
  r.nuclear_X0 = nuclear_norm<S>(X0);
  r.distance = (out.X_tilde - X0).norm();
  r.distance_bound = t * r.tau0 / c3 * dim_factor;
  const double beta_eff = cert.eps_star * cert.beta;
  r.collinear_lower = (1.0 - t * beta_eff) * r.nuclear_X0;
  (void)inst;

  integrity(std::abs(r.residual - t * r.tau0) <= 1e-9, "||A(X~) - y|| = t tau0 (got " + num(r.residual) + " vs " + num(t * r.tau0) + ")");
  integrity(r.nuclear_tilde <= r.nuclear_X0 + 1e-9, "||X~||_* <= ||X0||_*");
  integrity(r.distance >= r.distance_bound, "||X~ - X0||_F >= distance bound");
  return out;
}

}  // namespace

AdversarialNoise<cplx> adversarial_noise(const DeconvCertificate& cert, const DeconvInstance& inst, double t) {
  const double dim = std::sqrt(static_cast<double>(inst.K()) * static_cast<double>(inst.N()) / static_cast<double>(inst.L()));
  return assemble_noise<cplx>(cert, inst, t, inst.X0(), deconv_operator(inst), 12.0, dim);
}

AdversarialNoise<double> adversarial_noise(const CompletionCertificate& cert, const CompletionInstance& inst, double t) {
  const double dim = std::sqrt(static_cast<double>(cert.x.size()) * static_cast<double>(inst.n1) *
                               static_cast<double>(inst.n2) / static_cast<double>(inst.m));
  return assemble_noise<double>(cert, inst, t, inst.X0, mc_operator(inst), 8.0, dim);
}

std::vector<ConeSample> sample_descent_cone(const CMat& X0, Index count, std::uint64_t seed) {
  if (count < 0) throw ArgumentError("sample_descent_cone: negative count");
  std::vector<ConeSample> out;
  if (count == 0) return out;
  const auto ts = tangent_space<cplx>(X0);
  const double r = static_cast<double>(ts.rank());
  const double x0n = X0.norm();
  for (Index k = 0; k < count; ++k) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(k));
    const double s = std::pow(10.0, -2.0 + 3.0 * uniform01(rng));
    const double u = uniform01(rng);
    const CMat G1 = gaussian_complex(X0.rows(), X0.cols(), rng);
    const CMat G2 = gaussian_complex(X0.rows(), X0.cols(), rng);
    CMat tan = project_T(ts, G1);
    tan -= (frob_inner<cplx>(ts.UV, tan) / r) * ts.UV;
    tan /= std::max(1.0, std::sqrt(static_cast<double>(X0.rows() + X0.cols())));
    CMat perp = project_Tperp(ts, G2);
    const double pn = nuclear_norm<cplx>(perp);
    if (pn > 0) perp *= u * s * r / pn;
    CMat Z = -s * ts.UV + tan + perp;
    Z /= Z.norm();
    ConeSample cs;
    cs.margin = -std::real(frob_inner<cplx>(ts.UV, Z)) - nuclear_norm<cplx>(project_Tperp(ts, Z));
    cs.alignment = -std::real(frob_inner<cplx>(Z, X0)) / x0n;
    cs.Z = std::move(Z);
    out.push_back(std::move(cs));
  }
  return out;
}

TangentDirection tangent_min_direction(const DeconvInstance& inst) {
  const Index K = inst.K(), N = inst.N();
  const CVec h = inst.h0.normalized();
  const CVec m = inst.m0.normalized();
  const CMat X0 = h * m.adjoint();
  // Real spanning set of T: {h e_n^*, e_k m^*} and their i-multiples.
  std::vector<CMat> span;
  for (Index n = 0; n < N; ++n) span.push_back(h * CVec::Unit(N, n).adjoint());
  for (Index k = 0; k < K; ++k) span.push_back(CVec::Unit(K, k) * m.adjoint());
  const Index d = static_cast<Index>(span.size());
  const Index D = 2 * K * N;
  RMat R(D, 2 * d + 2);
  auto realify = [&](const CMat& M) {
    RVec v(D);
    for (Index q = 0; q < K * N; ++q) {
      v(q) = M.data()[q].real();
      v(K * N + q) = M.data()[q].imag();
    }
    return v;
  };
  for (Index q = 0; q < d; ++q) {
    R.col(2 * q) = realify(span[static_cast<size_t>(q)]);
    R.col(2 * q + 1) = realify(cplx(0, 1) * span[static_cast<size_t>(q)]);
  }
  // Project out X0 and iX0.
  RVec x1 = realify(X0), x2 = realify(cplx(0, 1) * X0);
  x1.normalize();
  x2 -= x1.dot(x2) * x1;
  x2.normalize();
  RMat Rt = R.leftCols(2 * d);
  Rt -= x1 * (x1.transpose() * Rt);
  Rt -= x2 * (x2.transpose() * Rt);
  Index rank = 0;
  const RMat Q = orthonormal_basis<double>(Rt, 1e-10, &rank);
  auto complexify = [&](const RVec& v) {
    CMat M(K, N);
    for (Index q = 0; q < K * N; ++q) M.data()[q] = cplx(v(q), v(K * N + q));
    return M;
  };
  const Index L = inst.L();
  RMat AQ(2 * L, rank);
  for (Index q = 0; q < rank; ++q) {
    const CVec a = deconv_forward(inst, complexify(Q.col(q)));
    AQ.col(q) << a.real(), a.imag();
  }
  Eigen::JacobiSVD<RMat> sv(AQ, Eigen::ComputeThinV);
  const RVec coef = sv.matrixV().col(rank - 1);
  TangentDirection out;
  out.W = complexify(Q * coef);
  out.W /= out.W.norm();
  out.AW = deconv_forward(inst, out.W);
  out.gain = out.AW.norm();
  return out;
}

}  // namespace lrgeom
