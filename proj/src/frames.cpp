#include "lrgeom/frames.hpp"

#include <algorithm>
#include <cmath>

#include "lrgeom/error.hpp"
#include "lrgeom/random.hpp"

namespace lrgeom {

namespace {

constexpr double kZeroTol = 1e-14;

void require_shape(Index L, Index K, const char* who) {
  if (K < 1 || L < K)
    throw DimensionError(std::string(who) + ": need 1 <= K <= L (got L=" + std::to_string(L) +
                         ", K=" + std::to_string(K) + ")");
}

}  // namespace

FrameMatrix spectral_tetris(Index L, Index K) {
  require_shape(L, K, "spectral_tetris");
  // Unit-norm rows, column mass L/K. Bookkeeping in units of 1/K so the
  // greedy decisions are exact: each column needs L units, a 1-sparse row
  // contributes K.
  RMat G = RMat::Zero(L, K);
  Index row = 0;
  long long carry = 0;  // units already placed in the current column
  for (Index k = 0; k < K; ++k) {
    long long rem = static_cast<long long>(L) - carry;
    if (rem < 0) throw DimensionError("spectral_tetris: column overflow, greedy run fails");
    while (rem >= K) {
      if (row >= L) throw DimensionError("spectral_tetris: ran out of rows");
      G(row++, k) = 1.0;
      rem -= K;
    }
    carry = 0;
    if (rem > 0) {
      if (k + 1 >= K || row + 2 > L)
        throw DimensionError("spectral_tetris: greedy run leaves mass in the last column");
      const double a2 = static_cast<double>(rem) / (2.0 * static_cast<double>(K));
      const double a = std::sqrt(a2), b = std::sqrt(1.0 - a2);
      G(row, k) = a;
      G(row, k + 1) = b;
      G(row + 1, k) = a;
      G(row + 1, k + 1) = -b;
      row += 2;
      carry = 2 * static_cast<long long>(K) - rem;
    }
  }
  if (row != L) throw DimensionError("spectral_tetris: greedy run did not use all rows");
  FrameMatrix F;
  F.B = (G * std::sqrt(static_cast<double>(K) / static_cast<double>(L))).cast<cplx>();
  F.kind = "tetris";
  return F;
}

FrameMatrix repeated_basis(Index L, Index K) {
  require_shape(L, K, "repeated_basis");
  if (L % K != 0) throw DimensionError("repeated_basis: K must divide L");
  FrameMatrix F;
  F.B = CMat::Zero(L, K);
  const double s = std::sqrt(static_cast<double>(K) / static_cast<double>(L));
  for (Index l = 0; l < L; ++l) F.B(l, l % K) = s;
  F.kind = "repeated";
  return F;
}

FrameMatrix haar_frame(Index L, Index K, std::uint64_t seed) {
  require_shape(L, K, "haar_frame");
  Rng rng = make_rng(seed, 0x4652414dULL);
  FrameMatrix F;
  F.B = haar_isometry<cplx>(L, K, rng);
  F.kind = "haar";
  F.seed = seed;
  return F;
}

FrameMatrix custom_frame(CMat B, double tol) {
  if (B.size() == 0) throw DimensionError("custom_frame: empty matrix");
  if (!B.allFinite()) throw NumericError("custom_frame: non-finite entries");
  const double err = (B.adjoint() * B - CMat::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff();
  if (err > tol) throw ArgumentError("custom_frame: B^*B != Id (deviation " + std::to_string(err) + ")");
  FrameMatrix F;
  F.B = std::move(B);
  F.kind = "custom";
  return F;
}

BlockPartition blocks(const FrameMatrix& F) {
  const Index L = F.L(), K = F.K();
  BlockPartition P;
  std::vector<int> owner(static_cast<size_t>(L), -1);
  for (Index i = 0; i < K / 3; ++i) {
    const Index j = 3 * i;
    std::vector<Index> blk;
    for (Index l = 0; l < L; ++l) {
      if (std::abs(F.B(l, j)) <= kZeroTol) continue;
      if (owner[static_cast<size_t>(l)] >= 0)
        throw IntegrityError("blocks: row " + std::to_string(l) + " lies in two blocks");
      owner[static_cast<size_t>(l)] = static_cast<int>(i);
      blk.push_back(l);
    }
    if (2 * K <= L) {
      const double lo = static_cast<double>(L) / static_cast<double>(K);
      const double hi = 3.0 * (lo + 2.0);
      const double sz = static_cast<double>(blk.size());
      if (sz < lo || sz > hi)
        throw IntegrityError("blocks: block " + std::to_string(i) + " has size " +
                             std::to_string(blk.size()) + ", outside [L/K, 3(L/K+2)]");
    }
    P.blocks.push_back(std::move(blk));
    P.coordinate.push_back(j);
  }
  return P;
}

double coherence_mu_max(const FrameMatrix& F) {
  const double mx = F.B.rowwise().squaredNorm().maxCoeff();
  return std::sqrt(static_cast<double>(F.L()) / static_cast<double>(F.K()) * mx);
}

double coherence_mu_h(const FrameMatrix& F, const CVec& h) {
  if (h.size() != F.K()) throw DimensionError("coherence_mu_h: h has wrong length");
  const double hn = h.norm();
  if (!(hn > 0)) throw ArgumentError("coherence_mu_h: h must be nonzero");
  const CVec proj = F.B.conjugate() * h;
  return std::sqrt(static_cast<double>(F.L())) * proj.cwiseAbs().maxCoeff() / hn;
}

double incoherence_mu(const FrameMatrix& F, const CVec& h) { return coherence_mu_h(F, h); }

RVec b1_profile(const FrameMatrix& F, const CMat& W) {
  if (W.rows() != F.K()) throw DimensionError("b1_profile: W must have K rows");
  return (F.B.conjugate() * W).rowwise().norm();
}

double b1_norm(const FrameMatrix& F, const CMat& W) { return b1_profile(F, W).sum(); }

double weak_b1_norm(const FrameMatrix& F, const CMat& W) {
  RVec p = b1_profile(F, W);
  std::vector<double> v(p.data(), p.data() + p.size());
  std::sort(v.begin(), v.end(), std::greater<>());
  double best = 0;
  for (size_t k = 0; k < v.size(); ++k) best = std::max(best, static_cast<double>(k + 1) * v[k]);
  return best;
}

FrameCheck check_frame(const FrameMatrix& F, double zero_tol) {
  FrameCheck c;
  const Index K = F.K();
  c.isometry_err = (F.B.adjoint() * F.B - CMat::Identity(K, K)).cwiseAbs().maxCoeff();
  const RVec rn = F.B.rowwise().squaredNorm();
  c.row_norm_spread = rn.maxCoeff() - rn.minCoeff();
  for (Index l = 0; l < F.L(); ++l) {
    Index first = -1, count = 0, last = -1;
    for (Index k = 0; k < K; ++k)
      if (std::abs(F.B(l, k)) > zero_tol) {
        if (first < 0) first = k;
        last = k;
        ++count;
      }
    if (count > 2 || (count == 2 && last != first + 1)) c.two_sparse_adjacent = false;
  }
  return c;
}

}  // namespace lrgeom
