#include "lrgeom/random.hpp"

#include <cmath>

#include "lrgeom/error.hpp"

namespace lrgeom {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

RMat gaussian_real(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  RMat G(rows, cols);
  // fill column-major so the draw order is fixed by the storage order
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) G(i, j) = nd(rng);
  return G;
}

CMat gaussian_complex(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMat G(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      G(i, j) = cplx(re, im);
    }
  return G;
}

template <class S>
Mat<S> haar_isometry(Index n, Index k, Rng& rng) {
  if (k < 0 || k > n) throw DimensionError("haar_isometry: need 0 <= k <= n");
  Mat<S> G = gaussian<S>(n, k, rng);
  Eigen::HouseholderQR<Mat<S>> qr(G);
  Mat<S> Q = qr.householderQ() * Mat<S>::Identity(n, k);
  const Mat<S>& R = qr.matrixQR();
  for (Index j = 0; j < k; ++j) {
    const S d = R(j, j);
    const double a = std::abs(d);
    if (a > 0) Q.col(j) *= d / a;
  }
  return Q;
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

template Mat<double> haar_isometry<double>(Index, Index, Rng&);
template Mat<cplx> haar_isometry<cplx>(Index, Index, Rng&);

}  // namespace lrgeom
