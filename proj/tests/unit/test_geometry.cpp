#include "doctest.h"
#include "lrgeom/adversarial.hpp"
#include "lrgeom/error.hpp"
#include "lrgeom/geometry.hpp"
#include "lrgeom/random.hpp"

using namespace lrgeom;

namespace {

struct RankOne {
  CVec u, v;
  CMat X;
  CVec uperp, vperp;
};

RankOne rank_one(std::uint64_t seed, Index n1 = 5, Index n2 = 4) {
  Rng rng = make_rng(seed);
  RankOne r;
  const CMat Q1 = haar_isometry<cplx>(n1, 2, rng), Q2 = haar_isometry<cplx>(n2, 2, rng);
  r.u = Q1.col(0);
  r.uperp = Q1.col(1);
  r.v = Q2.col(0);
  r.vperp = Q2.col(1);
  r.X = 2.5 * r.u * r.v.adjoint();
  return r;
}

}  // namespace

TEST_CASE("tangent projections") {
  const auto r = rank_one(1);
  const auto ts = tangent_space<cplx>(r.X);
  Rng rng = make_rng(2);
  const CMat A = gaussian_complex(4, 1, rng), B = gaussian_complex(5, 1, rng);
  const CMat inT = r.u * A.adjoint() + B * r.v.adjoint();
  CHECK(project_Tperp(ts, inT).norm() < 1e-12);
  CHECK(project_T(ts, CMat(r.uperp * r.vperp.adjoint())).norm() < 1e-12);
  for (int k = 0; k < 20; ++k) {
    const CMat M = gaussian_complex(5, 4, rng);
    const CMat PT = project_T(ts, M), PP = project_Tperp(ts, M);
    CHECK(PT.squaredNorm() + PP.squaredNorm() == doctest::Approx(M.squaredNorm()).epsilon(1e-10));
    CHECK((project_T(ts, PT) - PT).norm() < 1e-10);
    CHECK(std::abs(frob_inner<cplx>(PT, PP)) < 1e-10);
  }
  CHECK_THROWS_AS(tangent_space<cplx>(CMat::Zero(3, 3)), ArgumentError);
}

TEST_CASE("subdifferential membership") {
  const auto r = rank_one(3);
  const CMat UV = r.u * r.v.adjoint();
  CHECK(in_subdifferential<cplx>(r.X, UV, 1e-9).member);
  const auto out = in_subdifferential<cplx>(r.X, CMat(UV + 2.0 * r.uperp * r.vperp.adjoint()), 1e-9);
  CHECK_FALSE(out.member);
  CHECK(out.spectral_residual == doctest::Approx(2.0));
  CHECK_FALSE(in_subdifferential<cplx>(r.X, CMat::Zero(5, 4), 1e-9).member);
}

TEST_CASE("descent cone closure") {
  const auto r = rank_one(4);
  const auto shrink = in_descent_cone_closure<cplx>(r.X, CMat(-r.X), 1e-9);
  CHECK(shrink.member);
  CHECK(shrink.margin == doctest::Approx(2.5));
  const CMat perp = r.uperp * r.vperp.adjoint();
  const auto p = in_descent_cone_closure<cplx>(r.X, perp, 1e-9);
  CHECK_FALSE(p.member);
  CHECK(p.margin == doctest::Approx(-1.0));
}

TEST_CASE("max descent step bound") {
  const auto r = rank_one(5);
  CHECK(max_descent_step_bound<cplx>(r.X, CMat(-r.X)) == doctest::Approx(2 * r.X.norm()));
  for (double t : {0.5, 1.0, 1.5, 2.0}) CHECK(nuclear_norm<cplx>(CMat(r.X - t * r.X)) <= nuclear_norm<cplx>(r.X) + 1e-12);
  // direction orthogonal to X: bound 0 and no positive step keeps the norm
  const CMat Z = r.uperp * r.v.adjoint();
  CHECK(std::abs(max_descent_step_bound<cplx>(r.X, Z)) < 1e-12);
  for (int g = 1; g <= 50; ++g) {
    const double t = 0.1 * g;
    CHECK(nuclear_norm<cplx>(CMat(r.X + t * Z)) > nuclear_norm<cplx>(r.X));
  }
  CHECK_THROWS_AS(max_descent_step_bound<cplx>(r.X, CMat::Zero(5, 4)), ArgumentError);
}

TEST_CASE("descent step limit") {
  const auto r = rank_one(6);
  CHECK(descent_step_limit<cplx>(r.X, CMat(-r.X), 1.0) == 1.0);
  const CMat Z = r.uperp * r.vperp.adjoint();
  CHECK(descent_step_limit<cplx>(r.X, Z, 1.0) < 1e-15);
  // Z = -UV^* + 0.5 perp: norm is 2.5 - eps + 0.5 eps, decreasing for all eps up to 2.5
  const CMat Z2 = -(r.u * r.v.adjoint()) + 0.5 * Z;
  CHECK(descent_step_limit<cplx>(r.X, Z2, 1.0) == 1.0);
  // Z = -UV^* + 2 perp increases the norm
  const CMat Z3 = -(r.u * r.v.adjoint()) + 2.0 * Z;
  CHECK(descent_step_limit<cplx>(r.X, Z3, 1.0) < 1e-15);
}

TEST_CASE("E_mu_delta membership") {
  const auto F = spectral_tetris(20, 5);
  Rng rng = make_rng(7);
  const CVec h = CVec::Constant(5, cplx(1 / std::sqrt(5.0), 0));
  const CVec m = gaussian_complex(3, 1, rng).normalized();
  const CMat X0 = h * m.adjoint();
  const double mu = incoherence_mu(F, h);
  const auto self = in_E_mu_delta(F, X0, CMat(-X0 / X0.norm()), mu, 1.0, 1e-9);
  CHECK(self.member);
  CHECK(self.alignment == doctest::Approx(1.0));
  CHECK_FALSE(in_E_mu_delta(F, X0, CMat(-X0 / X0.norm()), mu * 0.5, 0.5, 1e-9).member);

  const CMat Q = haar_isometry<cplx>(5, 2, rng);
  CMat Zorth = Q.col(1) * m.adjoint();
  Zorth -= frob_inner<cplx>(X0, Zorth) * X0;
  Zorth /= Zorth.norm();
  CHECK_FALSE(in_E_mu_delta(F, X0, Zorth, mu, 0.1, 1e-9).member);

  const auto samples = sample_descent_cone(X0, 50, 3);
  for (const auto& s : samples) {
    CHECK(in_E_mu_delta(F, X0, s.Z, mu, s.alignment, 1e-9).member);
    CHECK_FALSE(in_E_mu_delta(F, X0, s.Z, mu, s.alignment + 1e-3, 1e-9).member);
  }
}

TEST_CASE("subdifferential and cone duality") {
  const auto r = rank_one(8);
  const auto ts = tangent_space<cplx>(r.X);
  Rng rng = make_rng(9);
  const auto cone = sample_descent_cone(r.X, 40, 5);
  for (const auto& s : cone) {
    CMat G = project_Tperp(ts, CMat(gaussian_complex(5, 4, rng)));
    G /= spectral_norm<cplx>(G);
    const CMat W = ts.UV + uniform01(rng) * G;
    REQUIRE(in_subdifferential<cplx>(r.X, W, 1e-9).member);
    CHECK(std::real(frob_inner<cplx>(W, s.Z)) <= 1e-9);
  }
}

TEST_CASE("real-valued geometry") {
  Rng rng = make_rng(10);
  const RMat U = haar_isometry<double>(6, 2, rng), V = haar_isometry<double>(5, 2, rng);
  const RMat X = U * V.transpose();
  const auto ts = tangent_space<double>(X);
  CHECK(ts.rank() == 2);
  CHECK(in_descent_cone_closure<double>(X, RMat(-X), 1e-9).margin == doctest::Approx(2.0));
}
