#include "doctest.h"
#include "lrgeom/error.hpp"
#include "lrgeom/measurement.hpp"
#include "lrgeom/random.hpp"
#include "lrgeom/serialize.hpp"

#include <cstdio>
#include <filesystem>

using namespace lrgeom;

TEST_CASE("deconv forward on simple inputs") {
  const auto inst = make_deconv_instance(spectral_tetris(24, 12), 5, 1);
  CHECK(deconv_forward(inst, CMat::Zero(12, 5)).norm() == 0);
  const CVec y = deconv_forward(inst, inst.X0());
  for (Index l = 0; l < 24; ++l) {
    const cplx expect = inst.frame.row(l).dot(inst.h0) * inst.m0.dot(inst.c_rows.row(l).transpose());
    CHECK(std::abs(y(l) - expect) < 1e-12);
  }
  CHECK_THROWS_AS(deconv_forward(inst, CMat::Zero(3, 3)), DimensionError);
}

TEST_CASE("adjointness of both operators") {
  Rng rng = make_rng(77);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto inst = make_deconv_instance(spectral_tetris(30, 6), 4, s);
    const CMat X = gaussian_complex(6, 4, rng);
    const CVec v = gaussian_complex(30, 1, rng);
    const cplx lhs = deconv_forward(inst, X).dot(v);
    const cplx rhs = frob_inner<cplx>(X, deconv_adjoint(inst, v));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * X.norm() * v.norm());

    const auto mc = make_completion_instance(12, 10, 2, 40, s);
    const RMat Y = gaussian_real(12, 10, rng);
    const RVec w = gaussian_real(40, 1, rng);
    CHECK(std::abs(mc_forward(mc, Y).dot(w) - frob_inner<double>(Y, mc_adjoint(mc, w))) <= 1e-12 * Y.norm() * w.norm());
  }
}

TEST_CASE("fft consistency") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = make_deconv_instance(spectral_tetris(64, 8), 6, s);
    CHECK(fft_consistency(inst) <= 1e-9);
  }
  auto zero = make_deconv_instance(spectral_tetris(16, 4), 3, 0, CVec::Zero(4), CVec::Ones(3));
  CHECK(fft_consistency(zero) == 0);
  auto one = make_deconv_instance(spectral_tetris(1, 1), 1, 5);
  CHECK(fft_consistency(one) <= 1e-12);
  const auto h = make_deconv_instance(haar_frame(40, 5, 3), 7, 2);
  CHECK(fft_consistency(h) <= 1e-9);
}

TEST_CASE("deconv isotropy in expectation") {
  Rng rng = make_rng(8);
  const CMat X = gaussian_complex(6, 4, rng);
  const auto F = spectral_tetris(30, 6);
  std::vector<double> v;
  for (std::uint64_t s = 0; s < 2000; ++s) v.push_back(deconv_forward(make_deconv_instance(F, 4, s), X).squaredNorm());
  double mean = 0, var = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) var += (x - mean) * (x - mean);
  const double se = std::sqrt(var / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  CHECK(std::abs(mean - X.squaredNorm()) <= 3 * se);
}

TEST_CASE("completion operator examples") {
  RMat X = RMat::Zero(4, 3);
  X(0, 0) = 1;
  auto inst = make_completion_instance(X, {{1, 1}, {2, 0}, {3, 2}});
  CHECK(mc_forward(inst, X).norm() == 0);

  RMat Y = RMat::Zero(4, 3);
  Y(2, 1) = 5;
  auto dup = make_completion_instance(Y, {{2, 1}, {2, 1}, {0, 0}});
  const RVec y = mc_forward(dup, Y);
  const double s = std::sqrt(12.0 / 3.0);
  CHECK(y(0) == doctest::Approx(s * 5));
  CHECK(y(1) == doctest::Approx(s * 5));
  CHECK(mc_adjoint(dup, RVec::Ones(3))(2, 1) == doctest::Approx(2 * s));
  CHECK(dup.sampled_columns(2) == std::vector<Index>{1});
  CHECK(dup.measurements_in_row(2) == std::vector<Index>{0, 1});
}

TEST_CASE("completion isotropy over resampled patterns") {
  Rng rng = make_rng(21);
  const RMat X = gaussian_real(10, 8, rng);
  std::vector<double> v;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    CompletionInstance inst = make_completion_instance(10, 8, 1, 20, s);
    v.push_back(mc_forward(inst, X).squaredNorm());
  }
  double mean = 0, var = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) var += (x - mean) * (x - mean);
  const double se = std::sqrt(var / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  CHECK(std::abs(mean - X.squaredNorm()) <= 3 * se);
}

TEST_CASE("completion instance invariants") {
  const auto inst = make_completion_instance(30, 20, 3, 50, 4);
  CHECK(inst.X0.rows() == 30);
  CHECK((inst.factors.U.transpose() * inst.factors.U - RMat::Identity(3, 3)).norm() < 1e-12);
  CHECK(inst.pattern.size() == 50);
  CHECK_THROWS_AS(make_completion_instance(10, 20, 2, 5, 0), DimensionError);
  CHECK_THROWS_AS(with_noise(inst, RVec::Ones(50), 1.0), ArgumentError);
  CHECK(with_noise(inst, RVec::Ones(50), 10.0).tau == 10.0);
}

TEST_CASE("determinism of instance draws") {
  const auto a = make_deconv_instance(spectral_tetris(24, 12), 10, 3);
  const auto b = make_deconv_instance(spectral_tetris(24, 12), 10, 3);
  CHECK(a.c_rows == b.c_rows);
  CHECK(a.h0 == b.h0);
  const auto p = make_completion_instance(40, 40, 2, 50, 9), q = make_completion_instance(40, 40, 2, 50, 9);
  CHECK(p.pattern == q.pattern);
}

TEST_CASE("operator norm estimates") {
  std::vector<std::pair<Index, Index>> all;
  for (Index b = 0; b < 3; ++b)
    for (Index a = 0; a < 4; ++a) all.emplace_back(a, b);
  auto id = make_completion_instance(RMat::Ones(4, 3), all);
  CHECK(operator_norm_estimate(mc_operator(id)) == doctest::Approx(1.0).epsilon(1e-6));

  std::vector<std::pair<Index, Index>> rep(5, {1, 2});
  auto one = make_completion_instance(RMat::Ones(4, 3), rep);
  CHECK(operator_norm_estimate(mc_operator(one)) == doctest::Approx(std::sqrt(12.0)).epsilon(1e-6));

  const auto inst = make_deconv_instance(spectral_tetris(40, 8), 8, 6);
  const auto A = deconv_operator(inst);
  const double dense = spectral_norm<cplx>(materialize(A));
  const double est = operator_norm_estimate(A);
  CHECK(est >= dense * (1 - 1e-3));
  CHECK(est <= dense * (1 + 1e-9));
}

TEST_CASE("materialized operator matches forward") {
  const auto inst = make_deconv_instance(spectral_tetris(20, 4), 3, 2);
  const CMat M = materialize(deconv_operator(inst));
  Rng rng = make_rng(1);
  const CMat X = gaussian_complex(4, 3, rng);
  CHECK((M * Eigen::Map<const CVec>(X.data(), 12) - deconv_forward(inst, X)).norm() < 1e-12);
}

TEST_CASE("serialization round trips") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(LRGEOM_TEST_TMP) / "ser";
  fs::create_directories(dir);
  const auto F = spectral_tetris(24, 12);
  save_frame(F, (dir / "frame").string());
  const auto G = load_frame((dir / "frame").string());
  CHECK(std::memcmp(F.B.data(), G.B.data(), sizeof(cplx) * static_cast<size_t>(F.B.size())) == 0);
  CHECK(G.kind == "tetris");

  const auto inst = make_deconv_instance(F, 10, 12, SignalKind::kFlat);
  save_deconv_instance(inst, (dir / "inst").string());
  const auto back = load_deconv_instance((dir / "inst").string());
  CHECK(back.c_rows == inst.c_rows);
  CHECK(back.h0 == inst.h0);
  const auto regen = deconv_from_header(deconv_header(inst));
  CHECK(regen.c_rows == inst.c_rows);
  CHECK(regen.m0 == inst.m0);

  const auto mc = make_completion_instance(20, 20, 2, 30, 3);
  save_completion_instance(mc, (dir / "mc").string());
  const auto mb = load_completion_instance((dir / "mc").string());
  CHECK(mb.pattern == mc.pattern);
  CHECK((mb.X0 - mc.X0).norm() < 1e-14);
  CHECK(completion_from_header(completion_header(mc)).pattern == mc.pattern);
  CHECK_THROWS_AS(load_frame((dir / "missing").string()), IoError);
}
