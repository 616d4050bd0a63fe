// Acceptance criteria A1..A9. Usage: acceptance [A1 ... A9 | all]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lrgeom/adversarial.hpp"
#include "lrgeom/error.hpp"
#include "lrgeom/frames.hpp"
#include "lrgeom/geometry.hpp"
#include "lrgeom/harness.hpp"
#include "lrgeom/measurement.hpp"
#include "lrgeom/random.hpp"
#include "lrgeom/solver.hpp"

using namespace lrgeom;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome a1() {
  const std::vector<std::pair<Index, Index>> dims{{3, 2}, {24, 12}, {40, 12}, {100, 30}};
  bool ok = true;
  double worst_iso = 0, worst_spread = 0;
  std::string bad;
  for (auto [L, K] : dims) {
    const auto F = spectral_tetris(L, K);
    const auto c = check_frame(F);
    worst_iso = std::max(worst_iso, c.isometry_err);
    worst_spread = std::max(worst_spread, c.row_norm_spread);
    bool here = c.isometry_err <= 1e-10 && c.row_norm_spread <= 1e-10 && c.two_sparse_adjacent;
    if (2 * K <= L) {
      const auto P = blocks(F);
      const double lo = static_cast<double>(L) / K, hi = 3.0 * (lo + 2.0);
      for (const auto& b : P.blocks) {
        const double s = static_cast<double>(b.size());
        here = here && s >= lo - 1e-12 && s <= hi + 1e-12;
      }
    }
    if (!here) bad += " (" + std::to_string(L) + "," + std::to_string(K) + ")";
    ok = ok && here;
  }
  return {ok, fmt("max isometry err %.2e, max row-norm spread %.2e", worst_iso, worst_spread) +
                  (bad.empty() ? "" : ", failing" + bad)};
}

Outcome a2() {
  double worst_adj = 0, worst_fft = 0;
  std::mt19937_64 pick(2);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Index K = 2 + static_cast<Index>(pick() % 7);
    const Index L = K + static_cast<Index>(pick() % (128 - K + 1));
    const Index N = 1 + static_cast<Index>(pick() % 10);
    const FrameMatrix F = (s % 2 == 0) ? spectral_tetris(L, K) : haar_frame(L, K, s);
    const auto inst = make_deconv_instance(F, N, s);
    Rng rng = make_rng(s, 1);
    const CMat X = gaussian_complex(K, N, rng);
    const CVec v = gaussian_complex(L, 1, rng);
    const cplx lhs = vec_inner(v, deconv_forward(inst, X));
    const cplx rhs = frob_inner(deconv_adjoint(inst, v), X);
    const double scale = v.norm() * deconv_forward(inst, X).norm() + X.norm() * deconv_adjoint(inst, v).norm();
    worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / scale);
    worst_fft = std::max(worst_fft, fft_consistency(inst));
  }
  return {worst_adj <= 1e-10 && worst_fft <= 1e-9,
          fmt("max adjointness %.2e, max fft deviation %.2e over 50 instances", worst_adj, worst_fft)};
}

Outcome a3() {
  const double bound = 12.0 * std::sqrt(24.0 / (12.0 * 100.0));
  int admissible = 0, invariant_fail = 0;
  double worst_ratio = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto inst = make_deconv_instance(spectral_tetris(24, 12), 100, s);
    try {
      const auto c = deconv_certificate(inst);
      ++admissible;
      worst_ratio = std::max(worst_ratio, c.ratio);
      const bool ok = c.AW_norm <= 1e-9 && std::abs(c.W_frob - 1.0) <= 1e-10 && c.Z_frob >= 0.5 &&
                      c.cone_margin >= -1e-9 && c.ratio <= bound;
      invariant_fail += !ok;
    } catch (const AdmissibilityError&) {
    }
  }
  return {admissible >= 90 && invariant_fail == 0,
          fmt("admissible %.0f/100, invariant failures %.0f, max ratio %.4f (bound %.4f)", admissible,
              invariant_fail, worst_ratio, bound)};
}

Outcome a4() {
  const double thr = std::sqrt(2.0 * 300 / (100.0 * 100.0));
  const double bound = 8.0 * std::sqrt(300.0 / (2.0 * 100 * 100));
  int passing = 0, invariant_fail = 0;
  double worst_ratio = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto inst = make_completion_instance(100, 100, 2, 300, s);
    const auto c = mc_certificate(inst);
    if (!(c.event1 && c.event2)) continue;
    ++passing;
    worst_ratio = std::max(worst_ratio, c.ratio);
    const bool ok = c.AW_norm <= 1e-9 && c.tperp_nuclear_Z <= thr + 1e-9 && c.Z_frob > 0.5 && c.ratio <= bound;
    invariant_fail += !ok;
  }
  return {passing >= 80 && invariant_fail == 0,
          fmt("event-passing %.0f/100, invariant failures %.0f, max ratio %.4f (bound %.4f)", passing,
              invariant_fail, worst_ratio, bound)};
}

Outcome a5() {
  int checked = 0, failures = 0;
  double worst_res = 0;
  auto check = [&](const NoiseReport& r, double lower) {
    ++checked;
    const double dres = std::abs(r.residual - r.t * r.tau0);
    worst_res = std::max(worst_res, dres);
    const bool ok = dres <= 1e-9 && r.nuclear_tilde <= r.nuclear_X0 + 1e-9 && r.distance >= lower;
    failures += !ok;
  };
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = make_deconv_instance(spectral_tetris(24, 12), 100, s);
    DeconvCertificate c;
    try {
      c = deconv_certificate(inst);
    } catch (const AdmissibilityError&) {
      continue;
    }
    for (double t : {0.1, 0.5, 1.0}) {
      const auto an = adversarial_noise(c, inst, t);
      check(an.report, t * an.report.tau0 / 12.0 * std::sqrt(12.0 * 100.0 / 24.0));
    }
  }
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = make_completion_instance(100, 100, 2, 300, s);
    const auto c = mc_certificate(inst);
    if (!(c.event1 && c.event2)) continue;
    for (double t : {0.1, 0.5, 1.0}) {
      const auto an = adversarial_noise(c, inst, t);
      check(an.report, t * an.report.tau0 / 8.0 * std::sqrt(2.0 * 100 * 100 / 300.0));
    }
  }
  return {checked > 0 && failures == 0,
          fmt("%.0f noise realizations, %.0f failures, max |residual - t tau0| %.2e", checked, failures, worst_res)};
}

Outcome a6() {
  ExperimentConfig cfg = default_config("scaling");
  cfg.problem = "deconv";
  const auto out = run_scaling_sweep(cfg);
  const double slope = out.summary["fit"]["slope"].get<double>();
  const double raw = out.summary["fit_unnormalized_AZ"]["slope"].get<double>();
  const bool ok = std::isfinite(slope) && slope >= 0.85 && slope <= 1.15;
  return {ok, fmt("slope %.4f (required [0.85, 1.15]); slope of ||A(Z)|| alone %.4f", slope, raw)};
}

// Euclidean projection onto {x : ||M x - y|| <= tau} through the SVD of M.
// The multiplier solves a convex decreasing secular equation; Newton from 0
// approaches the root monotonically from below.
struct BallProjector {
  CMat V, Vh;
  RVec s;
  CVec g;
  double tau, perp_sq;

  BallProjector(const CMat& M, const CVec& y, double t) : tau(t) {
    Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    V = svd.matrixV();
    Vh = V.adjoint();
    s = svd.singularValues();
    g = svd.matrixU().adjoint() * y;
    perp_sq = g.tail(g.size() - s.size()).squaredNorm();
    if (perp_sq > tau * tau) throw ArgumentError("oracle: empty feasible set");
  }

  CVec operator()(const CVec& z) const {
    const Index r = s.size();
    CVec c = Vh * z;
    RVec a2(r);
    for (Index i = 0; i < r; ++i) a2(i) = std::norm(s(i) * c(i) - g(i));
    auto phi = [&](double lam, double* d) {
      double f = perp_sq, df = 0;
      for (Index i = 0; i < r; ++i) {
        const double q = 1.0 / (1.0 + lam * s(i) * s(i));
        f += a2(i) * q * q;
        df -= 2.0 * a2(i) * s(i) * s(i) * q * q * q;
      }
      *d = df;
      return f - tau * tau;
    };
    double d = 0;
    double lam = 0, f = phi(0, &d);
    if (f <= 0) return z;
    for (int k = 0; k < 100 && f > 1e-15 * tau * tau; ++k) {
      const double next = lam - f / d;
      if (!(next > lam)) break;
      lam = next;
      f = phi(lam, &d);
    }
    for (Index i = 0; i < r; ++i) c(i) = (c(i) + lam * s(i) * g(i)) / (1.0 + lam * s(i) * s(i));
    return V * c;
  }
};

// Nuclear norm and the subgradient U V^* through the eigendecomposition of X^* X.
double nuclear_and_subgradient(const CMat& X, CMat& G) {
  Eigen::SelfAdjointEigenSolver<CMat> es(X.adjoint() * X);
  const RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const double cut = 1e-12 * std::max(1.0, ev.maxCoeff());
  RVec inv = RVec::Zero(ev.size());
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) inv(i) = 1.0 / ev(i);
  G = X * es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
  return ev.sum();
}

double subgradient_oracle(const CMat& M, const CVec& y, double tau, Index rows, Index cols, std::uint64_t seed) {
  const BallProjector P(M, y, tau);
  double best = std::numeric_limits<double>::infinity();
  CMat X(rows, cols), G;
  for (int start = 0; start < 5; ++start) {
    Rng rng = make_rng(seed, 100 + static_cast<std::uint64_t>(start));
    CVec x = P(CVec(gaussian_complex(rows * cols, 1, rng)));
    X = Eigen::Map<const CMat>(x.data(), rows, cols);
    const double a0 = 0.01 * X.norm();
    for (int k = 1; k <= 1000000; ++k) {
      X = Eigen::Map<const CMat>(x.data(), rows, cols);
      best = std::min(best, nuclear_and_subgradient(X, G));
      x = P(x - (a0 / std::sqrt(static_cast<double>(k))) * Eigen::Map<const CVec>(G.data(), G.size()));
    }
  }
  return best;
}

Outcome a7() {
  std::string notes;
  bool ok = true;
  // tau >= ||y|| returns exactly zero
  {
    const auto inst = make_deconv_instance(haar_frame(40, 4, 1), 4, 1);
    const CVec y = inst.y();
    const auto r = solve(deconv_operator(inst), y, y.norm(), {});
    const bool z = r.X_hat.isZero(0.0) && r.objective == 0.0;
    ok = ok && z;
    notes += z ? "zero-solution ok" : "zero-solution FAILED";
  }
  // dense oracle comparison, K*N <= 36
  double worst_rel = 0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto base = make_deconv_instance(haar_frame(20, 6, s), 6, s);
    Rng rng = make_rng(s, 7);
    CVec e = gaussian_complex(20, 1, rng);
    const double tau = 0.2 * base.X0().norm();
    e *= 0.5 * tau / e.norm();
    const auto inst = with_noise(base, e, tau);
    const auto A = deconv_operator(inst);
    const CVec y = inst.y();
    SolverConfig cfg;
    cfg.max_iters = 200000;
    cfg.stop_tol_rel = 1e-10;
    cfg.feasibility_tol = 1e-10;
    const auto r = solve(A, y, tau, cfg);
    const double oracle = subgradient_oracle(materialize(A), y, tau, 6, 6, s);
    const double rel = std::abs(r.objective - oracle) / oracle;
    worst_rel = std::max(worst_rel, rel);
    ok = ok && rel <= 1e-3 && r.feasibility_residual <= 1e-8 * std::max(1.0, y.norm());
  }
  notes += fmt(", oracle max rel gap %.2e", worst_rel);
  // noiseless recovery with a Haar frame
  int recovered = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = make_deconv_instance(haar_frame(400, 8, s), 8, s);
    SolverConfig cfg;
    cfg.max_iters = 20000;
    const auto r = solve(deconv_operator(inst), inst.y(), 0.0, cfg);
    const CMat X0 = inst.X0();
    recovered += (r.X_hat - X0).norm() <= 1e-2 * X0.norm();
  }
  ok = ok && recovered >= 18;
  notes += fmt(", recovered %.0f/20", recovered);
  return {ok, notes};
}

Outcome a8() {
  const ExperimentConfig cfg = default_config("stability");
  const auto out = run_stability_sweep(cfg);
  const auto& c = out.summary["noise"]["certificate"];
  const double var = c["upper_decade_variation"].get<double>();
  const double tr = c["transition_ratio"].get<double>();
  std::string src;
  for (const auto& s : out.summary["certificate_noise_sources"]) src += (src.empty() ? "" : "|") + s.get<std::string>();
  const bool ok = var <= 10.0 && tr >= 3.0;
  return {ok, fmt("upper-decade variation %.3f (<= 10), transition ratio %.3f (>= 3)", var, tr) +
                  ", direction source " + src};
}

Outcome a9() {
  const auto report = run_checks(default_config("checks"));
  std::string failed;
  for (const auto& c : report["checks"])
    if (!c.value("pass", false)) failed += " " + c.value("name", std::string("?"));
  const bool ok = report.value("pass", false);
  return {ok, failed.empty() ? std::string("all checks passed") : "failing:" + failed};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::pair<const char*, std::function<Outcome()>>> crit{
      {"A1", {"frame integrity", a1}},       {"A2", {"operator correctness", a2}},
      {"A3", {"deconv certificate", a3}},    {"A4", {"completion certificate", a4}},
      {"A5", {"adversarial end-to-end", a5}}, {"A6", {"scaling law", a6}},
      {"A7", {"solver correctness", a7}},    {"A8", {"stability regime", a8}},
      {"A9", {"lemma suite", a9}}};
  std::vector<std::string> which;
  for (int i = 1; i < argc; ++i) which.push_back(argv[i]);
  if (which.empty() || (which.size() == 1 && which[0] == "all"))
    for (const auto& kv : crit) which.push_back(kv.first);
  int failures = 0;
  for (const auto& w : which) {
    const auto it = crit.find(w);
    if (it == crit.end()) {
      std::fprintf(stderr, "unknown criterion %s\n", w.c_str());
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", w.c_str(), it->second.first, o.detail.c_str(),
                sec);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
