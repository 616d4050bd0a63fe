#include "doctest.h"
#include "lrgeom/error.hpp"
#include "lrgeom/measurement.hpp"
#include "lrgeom/random.hpp"
#include "lrgeom/solver.hpp"

using namespace lrgeom;

TEST_CASE("svt examples") {
  RMat D = RMat::Zero(2, 2);
  D(0, 0) = 3;
  D(1, 1) = 1;
  CHECK(svt<double>(D, 0) == D);
  CHECK(svt<double>(D, 3).norm() == 0);
  RMat E = RMat::Zero(2, 2);
  E(0, 0) = 1;
  CHECK((svt<double>(D, 2) - E).norm() < 1e-14);
  CHECK_THROWS_AS(svt<double>(D, -1), ArgumentError);
}

TEST_CASE("svt is the proximal map of the nuclear norm") {
  Rng rng = make_rng(1);
  for (int k = 0; k < 10; ++k) {
    const CMat X = gaussian_complex(4, 3, rng);
    const double thr = 0.7;
    const CMat Y = svt<cplx>(X, thr);
    auto obj = [&](const CMat& M) { return 0.5 * (M - X).squaredNorm() + thr * nuclear_norm<cplx>(M); };
    const double best = obj(Y);
    for (int p = 0; p < 50; ++p) {
      const CMat P = gaussian_complex(4, 3, rng);
      for (double h : {1e-1, 1e-2, 1e-3}) CHECK(obj(CMat(Y + h * P)) >= best - 1e-12);
    }
  }
}

TEST_CASE("project ball") {
  RVec y(2), v(2);
  y << 1, 1;
  CHECK(project_ball<double>(y, y, 1.0) == y);
  v << 5, -3;
  CHECK(project_ball<double>(v, y, 0.0) == y);
  v << 1, 5;  // distance 4 = 2 tau
  const RVec p = project_ball<double>(v, y, 2.0);
  CHECK(p(0) == doctest::Approx(1));
  CHECK(p(1) == doctest::Approx(3));
  CHECK_THROWS_AS(project_ball<double>(v, y, -1.0), ArgumentError);
}

TEST_CASE("large tau gives exactly zero") {
  const auto inst = make_deconv_instance(spectral_tetris(40, 4), 4, 1);
  const CVec y = deconv_forward(inst, inst.X0());
  const auto r = solve<cplx>(deconv_operator(inst), y, y.norm() * 1.01);
  CHECK(r.converged);
  CHECK(r.X_hat.norm() == 0);
  CHECK(r.objective == 0);
}

TEST_CASE("full sampling identity operator") {
  Rng rng = make_rng(2);
  const RMat U = haar_isometry<double>(6, 2, rng), V = haar_isometry<double>(5, 2, rng);
  RVec s(2);
  s << 2.0, 0.5;
  const RMat X0 = U * s.asDiagonal() * V.transpose();
  std::vector<std::pair<Index, Index>> all;
  for (Index b = 0; b < 5; ++b)
    for (Index a = 0; a < 6; ++a) all.emplace_back(a, b);
  const auto inst = make_completion_instance(X0, all);
  const RVec y = mc_forward(inst, X0);
  const auto r = solve<double>(mc_operator(inst), y, 0.0);
  CHECK(r.converged);
  CHECK((r.X_hat - X0).norm() < 1e-5);
  CHECK(r.objective == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(r.feasibility_residual <= 1e-8 * std::max(1.0, y.norm()));
}

TEST_CASE("noiseless deconvolution recovery") {
  const auto inst = make_deconv_instance(haar_frame(400, 8, 3), 8, 3);
  const CMat X0 = inst.X0();
  SolverConfig cfg;
  cfg.max_iters = 5000;
  const auto r = solve<cplx>(deconv_operator(inst), deconv_forward(inst, X0), 0.0, cfg);
  CHECK((r.X_hat - X0).norm() / X0.norm() <= 1e-2);
}

TEST_CASE("step-size rule and config errors") {
  const auto inst = make_deconv_instance(spectral_tetris(40, 4), 4, 1);
  const CVec y = deconv_forward(inst, inst.X0());
  SolverConfig cfg;
  cfg.primal_step = 10;
  cfg.dual_step = 10;
  CHECK_THROWS_AS(solve<cplx>(deconv_operator(inst), y, 0.0, cfg), ConfigError);
  SolverConfig bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(solve<cplx>(deconv_operator(inst), y, 0.0, bad), ConfigError);
  CHECK_THROWS_AS(solve<cplx>(deconv_operator(inst), y, -1.0), ArgumentError);
}

TEST_CASE("max_iters reached is reported, not thrown") {
  const auto inst = make_deconv_instance(spectral_tetris(40, 4), 4, 1);
  SolverConfig cfg;
  cfg.max_iters = 3;
  const auto r = solve<cplx>(deconv_operator(inst), deconv_forward(inst, inst.X0()), 0.0, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
}

TEST_CASE("trace and averaged-iterate feasibility") {
  const auto inst = make_deconv_instance(spectral_tetris(60, 4), 4, 2);
  const CVec y = deconv_forward(inst, inst.X0());
  SolverConfig cfg;
  cfg.log_every = 1;
  cfg.max_iters = 600;
  cfg.stop_tol_rel = 1e-15;
  cfg.feasibility_tol = 1e-15;
  const auto r = solve<cplx>(deconv_operator(inst), y, 0.05, cfg);
  REQUIRE(r.trace.size() > 60);
  Index increases = 0;
  for (size_t i = 51; i < r.trace.size(); ++i)
    if (r.trace[i].averaged_residual > r.trace[i - 1].averaged_residual + 1e-12) ++increases;
  CHECK(increases == 0);
}

TEST_CASE("solution is feasible and beats random feasible probes") {
  const auto inst = make_deconv_instance(spectral_tetris(30, 3), 3, 4);
  const CMat X0 = inst.X0();
  const CVec y = deconv_forward(inst, X0);
  const double tau = 0.1;
  const auto r = solve<cplx>(deconv_operator(inst), y, tau);
  REQUIRE(r.converged);
  CHECK(r.feasibility_residual <= 1e-8 * std::max(1.0, y.norm()));
  Rng rng = make_rng(5);
  for (int k = 0; k < 200; ++k) {
    const CMat P = X0 + 0.3 * uniform01(rng) * gaussian_complex(3, 3, rng);
    if ((deconv_forward(inst, P) - y).norm() > tau) continue;
    CHECK(nuclear_norm<cplx>(P) >= r.objective * (1 - 1e-6));
  }
}

TEST_CASE("adaptive and fixed steps agree") {
  const auto inst = make_deconv_instance(haar_frame(200, 4, 1), 4, 1);
  Rng rng = make_rng(9);
  CVec e = gaussian_complex(200, 1, rng);
  e *= 0.01 / e.norm();
  const CVec y = deconv_forward(inst, inst.X0()) + e;
  SolverConfig fixed;
  fixed.adaptive_steps = false;
  fixed.max_iters = 100000;
  const auto a = solve<cplx>(deconv_operator(inst), y, 0.01, {});
  const auto b = solve<cplx>(deconv_operator(inst), y, 0.01, fixed);
  REQUIRE(a.converged);
  CHECK(a.iterations < b.iterations);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-4));
  CHECK(a.primal_step * a.dual_step == doctest::Approx(b.primal_step * b.dual_step));
}
