#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrgeom/numerics.hpp"

namespace lrgeom {

/// Isometry B in C^{L x K}. Row l of B is b_l (so <b_l, h> = (conj(B) h)_l).
struct FrameMatrix {
  CMat B;
  std::string kind;  // "tetris", "repeated", "haar", "custom"
  std::uint64_t seed = 0;  // haar frames only

  Index L() const { return B.rows(); }
  Index K() const { return B.cols(); }
  CVec row(Index l) const { return B.row(l).transpose(); }
};

/// Disjoint row-index sets B_i, i < floor(K/3).
struct BlockPartition {
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> coordinate;  // column 3i that defines block i
};

FrameMatrix spectral_tetris(Index L, Index K);

/// floor(L/K) stacked copies of Id_K scaled by sqrt(K/L); requires K | L.
FrameMatrix repeated_basis(Index L, Index K);

/// Haar-random isometry (first K columns of a Haar unitary).
FrameMatrix haar_frame(Index L, Index K, std::uint64_t seed);

/// Wraps a caller matrix, checking B^*B = Id within `tol`.
FrameMatrix custom_frame(CMat B, double tol = 1e-10);

BlockPartition blocks(const FrameMatrix& F);

double coherence_mu_max(const FrameMatrix& F);
double coherence_mu_h(const FrameMatrix& F, const CVec& h);
double incoherence_mu(const FrameMatrix& F, const CVec& h);

/// (||W^* b_l||)_l for W in C^{K x N}.
RVec b1_profile(const FrameMatrix& F, const CMat& W);
double b1_norm(const FrameMatrix& F, const CMat& W);
double weak_b1_norm(const FrameMatrix& F, const CMat& W);

/// max ||B^*B - Id||, max row-norm deviation from K/L, adjacency of supports.
struct FrameCheck {
  double isometry_err = 0;
  double row_norm_spread = 0;
  bool two_sparse_adjacent = true;
};
FrameCheck check_frame(const FrameMatrix& F, double zero_tol = 1e-14);

}  // namespace lrgeom
