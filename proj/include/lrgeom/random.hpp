#pragma once

#include <cstdint>
#include <random>

#include "lrgeom/numerics.hpp"

namespace lrgeom {

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream). Trials and grid tasks use the
/// stream index so that serial and parallel runs draw identical numbers.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Real standard normal N(0,1) entries.
RMat gaussian_real(Index rows, Index cols, Rng& rng);

/// Complex standard normal CN(0,1): E|z|^2 = 1, real and imaginary parts N(0,1/2).
CMat gaussian_complex(Index rows, Index cols, Rng& rng);

template <class S>
Mat<S> gaussian(Index rows, Index cols, Rng& rng) {
  if constexpr (kIsComplex<S>)
    return gaussian_complex(rows, cols, rng);
  else
    return gaussian_real(rows, cols, rng);
}

/// Haar-distributed n x k isometry (QR of a Gaussian matrix with the R
/// diagonal phases absorbed into Q).
template <class S>
Mat<S> haar_isometry(Index n, Index k, Rng& rng);

double uniform01(Rng& rng);

}  // namespace lrgeom
