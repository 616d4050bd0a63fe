#include "lrgeom/smallball.hpp"

#include <cmath>

#include "lrgeom/error.hpp"
#include "lrgeom/frames.hpp"
#include "lrgeom/random.hpp"

namespace lrgeom {

namespace {

constexpr Index kMinTrials = 1000;

struct Moments {
  double mean = 0, stderr_ = 0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  const double n = static_cast<double>(v.size());
  for (double x : v) m.mean += x;
  m.mean /= n;
  double var = 0;
  for (double x : v) var += (x - m.mean) * (x - m.mean);
  var /= std::max(1.0, n - 1.0);
  m.stderr_ = std::sqrt(var / n);
  return m;
}

}  // namespace

Index small_ball_count(const DeconvInstance& inst, const CMat& Z, double xi) {
  if (!(xi > 0)) throw ArgumentError("small_ball_count: xi must be positive");
  const CVec a = deconv_forward(inst, Z);
  Index c = 0;
  for (Index l = 0; l < a.size(); ++l)
    if (std::abs(a(l)) >= xi) ++c;
  return c;
}

Index large_entries_count(const FrameMatrix& F, const CMat& Z) {
  const RVec p = b1_profile(F, Z);
  const double L = static_cast<double>(F.L());
  const double thr = p.sum() / (L * std::log(M_E * L));
  Index c = 0;
  for (Index l = 0; l < p.size(); ++l)
    if (p(l) >= thr) ++c;
  return c;
}

MonteCarloReport paley_zygmund_check(const CVec& b, const CMat& X, double xi, Index trials, std::uint64_t seed) {
  if (b.size() != X.rows()) throw DimensionError("paley_zygmund_check: b must have X.rows() entries");
  if (!(xi > 0)) throw ArgumentError("paley_zygmund_check: xi must be positive");
  if (trials < kMinTrials) throw ArgumentError("paley_zygmund_check: need at least 1000 trials");
  const CVec w = X.adjoint() * b;  // b^* X c = (X^* b)^* c
  const double wn = w.norm();
  if (wn < 4.0 * xi * (1 - 1e-12)) throw ArgumentError("paley_zygmund_check: need ||X^* b|| >= 4 xi");

  std::vector<double> hit(static_cast<size_t>(trials)), m2(hit.size()), m4(hit.size());
  for (Index t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(t));
    const CVec c = gaussian_complex(X.cols(), 1, rng);
    const double a = std::abs(w.dot(c));
    hit[static_cast<size_t>(t)] = a >= 2.0 * xi ? 1.0 : 0.0;
    m2[static_cast<size_t>(t)] = a * a;
    m4[static_cast<size_t>(t)] = a * a * a * a;
  }
  const Moments p = moments(hit), s2 = moments(m2), s4 = moments(m4);
  MonteCarloReport r;
  r.name = "paley_zygmund";
  r.trials = trials;
  r.seed = seed;
  r.estimate = p.mean;
  r.target = 9.0 / 32.0;
  r.stderr_ = std::sqrt(std::max(p.mean * (1 - p.mean), 1e-300) / static_cast<double>(trials));
  const double e2 = wn * wn, e4 = 2.0 * e2 * e2;
  const bool ok2 = std::abs(s2.mean - e2) <= 5.0 * s2.stderr_;
  const bool ok4 = std::abs(s4.mean - e4) <= 5.0 * s4.stderr_;
  r.pass = r.estimate >= r.target - 3.0 * r.stderr_ && ok2 && ok4;
  r.extras = {{"second_moment", s2.mean}, {"second_moment_expected", e2}, {"second_moment_stderr", s2.stderr_},
              {"fourth_moment", s4.mean}, {"fourth_moment_expected", e4}, {"fourth_moment_stderr", s4.stderr_}};
  return r;
}

MonteCarloReport projection_concentration_check(Index n, Index k, Index trials, double eps, std::uint64_t seed) {
  if (n < 1 || k < 1 || k > n) throw DimensionError("projection_concentration_check: need 1 <= k <= n");
  if (trials < kMinTrials) throw ArgumentError("projection_concentration_check: need at least 1000 trials");
  std::vector<double> val(static_cast<size_t>(trials));
  Index fails = 0;
  const double ratio = static_cast<double>(k) / static_cast<double>(n);
  for (Index t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(t));
    const CMat Q = haar_isometry<cplx>(n, k, rng);
    // ||P e_1||^2 = ||Q^* e_1||^2 = squared norm of the first row of Q
    const double p2 = Q.row(0).squaredNorm();
    val[static_cast<size_t>(t)] = p2 / ratio;
    if (p2 < (1 - eps) * ratio || p2 > (1 + eps) * ratio) ++fails;
  }
  const Moments m = moments(val);
  MonteCarloReport r;
  r.name = "projection_concentration";
  r.trials = trials;
  r.seed = seed;
  r.estimate = m.mean;
  r.target = 1.0;
  r.stderr_ = m.stderr_;
  // k = n gives an exact, zero-variance identity
  r.pass = std::abs(m.mean - 1.0) <= 3.0 * m.stderr_ + 1e-12;
  r.extras = {{"failure_rate", static_cast<double>(fails) / static_cast<double>(trials)}, {"eps", eps}};
  return r;
}

MonteCarloReport gaussian_width_sample(const std::vector<CMat>& E, Index trials, std::uint64_t seed) {
  if (E.empty()) throw ArgumentError("gaussian_width_sample: empty sample set");
  if (trials < 1) throw ArgumentError("gaussian_width_sample: need at least one trial");
  const Index rows = E.front().rows(), cols = E.front().cols();
  for (const auto& X : E)
    if (X.rows() != rows || X.cols() != cols) throw DimensionError("gaussian_width_sample: mixed shapes");
  std::vector<double> val(static_cast<size_t>(trials));
  for (Index t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(t));
    const CMat G = gaussian_complex(rows, cols, rng);
    double best = -INFINITY;
    for (const auto& X : E) best = std::max(best, std::real(frob_inner<cplx>(X, G)));
    val[static_cast<size_t>(t)] = best;
  }
  const Moments m = moments(val);
  MonteCarloReport r;
  r.name = "gaussian_width";
  r.trials = trials;
  r.seed = seed;
  r.estimate = m.mean;
  r.stderr_ = m.stderr_;
  r.pass = true;
  r.note = "lower bound: supremum taken over a finite sample of the set";
  return r;
}

}  // namespace lrgeom
