#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lrgeom/measurement.hpp"
#include "lrgeom/numerics.hpp"

namespace lrgeom {

struct MonteCarloReport {
  std::string name;
  Index trials = 0;
  double estimate = 0;
  double target = 0;
  double stderr_ = 0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::string note;
  // optional secondary statistics (moment checks, failure rates)
  std::vector<std::pair<std::string, double>> extras;
};

/// |{l : |<b_l c_l^*, Z>_F| >= xi}| on the realized c_l.
Index small_ball_count(const DeconvInstance& inst, const CMat& Z, double xi);

/// Large-entries count |{l : ||Z^* b_l|| >= ||Z||_B1 / (L log(eL))}|.
Index large_entries_count(const FrameMatrix& F, const CMat& Z);

/// Estimates P(|b^* X c| >= 2 xi) for c ~ CN(0, Id) and checks it against 9/32;
/// also checks E|.|^2 = ||X^* b||^2 and E|.|^4 = 2 ||X^* b||^4 within 5 stderr.
MonteCarloReport paley_zygmund_check(const CVec& b, const CMat& X, double xi, Index trials, std::uint64_t seed);

/// Random k-dimensional subspaces of C^n (QR of Gaussian n x k), z = e_1.
/// Passes when the mean of ||Pz||^2 n/k is within 3 stderr of 1; the
/// failure rate of the (1 +- eps) two-sided bound is reported in extras.
MonteCarloReport projection_concentration_check(Index n, Index k, Index trials, double eps, std::uint64_t seed);

/// Sampled lower bound on the Gaussian width of a finite set E:
/// mean over G of max_{X in E} Re<X, G>_F.
MonteCarloReport gaussian_width_sample(const std::vector<CMat>& E, Index trials, std::uint64_t seed);

}  // namespace lrgeom
