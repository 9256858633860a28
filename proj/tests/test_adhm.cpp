#include <doctest.h>

#include "support.hpp"

using namespace sdym;
using namespace sdym::test;

TEST_SUITE("adhm") {

TEST_CASE("one-instanton datum validates") {
  CHECK(validate(one_instanton_data({1, 0, 0})).pass());
  CHECK(validate(one_instanton_data({2, cplx(1, 1), 3.0})).pass());
  auto A = one_instanton_data({1, 0, 0}).A_at({1, 0, 0, 0});
  CHECK(std::abs(A(0, 0) - 1.0) + std::abs(A(1, 0)) + std::abs(A(2, 0)) + std::abs(A(3, 0)) < 1e-15);
}

TEST_CASE("broken data fail the named check") {
  auto d = one_instanton_data({1, 0, 0});
  d.A[2].setZero();
  auto rep = validate(d);
  REQUIRE(rep.find("rank"));
  CHECK_FALSE(rep.find("rank")->pass);

  auto e = one_instanton_data({1, 0, 0});
  e.omega.setZero();
  auto rep2 = validate(e);
  CHECK_FALSE(rep2.find("omega_nondegenerate")->pass);
}

TEST_CASE("reality of A") {
  std::mt19937_64 g(2);
  auto d = one_instanton_data({1.3, cplx(0.2, -0.4), cplx(1, 0.5)});
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    std::array<cplx, 4> z;
    for (auto& c : z) c = rand_disk(g, 2);
    CVec w = CVec::Constant(1, rand_disk(g, 1));
    worst = std::max(worst, maxabs(CMat(d.sigma_V(d.A_at(z) * w) - d.A_at(sigma_c4(z)) * d.sigma_W(w))));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("line basis") {
  auto d = one_instanton_data({1, 0, 0});
  auto lb = line_basis(d, {}, SpectralPoint(1.0));
  CVec e1(4);
  e1 << 0, 0, 1, 0;
  CHECK(maxabs(CMat(lb.e1 - e1)) < 1e-14);

  std::mt19937_64 g(4);
  double pair = 0, orth = 0;
  for (int i = 0; i < 50; ++i) {
    auto dd = one_instanton_data(rand_params(g));
    auto b = line_basis(dd, rand_point(g, 3), SpectralPoint(rand_unit(g)));
    pair = std::max(pair, std::abs(dd.form(b.f1, b.f2) - 1.0));
    for (int j = 0; j < b.v.cols(); ++j)
      orth = std::max(orth, std::max(std::abs(dd.form(b.v.col(j), b.f1)), std::abs(dd.form(b.v.col(j), b.f2))));
  }
  CHECK(pair < 1e-12);
  CHECK(orth < 1e-12);
}

TEST_CASE("patching matrix examples") {
  auto d = one_instanton_data({1, 0, 0});
  std::mt19937_64 g(6);
  for (int i = 0; i < 5; ++i) CHECK(maxabs(Mat2(patching_matrix(d, {}, SpectralPoint(rand_unit(g))).G - Mat2::Identity())) < 1e-13);
  R4Point x = from_complex(1.0, 0.0);
  CHECK(maxabs(Mat2(patching_matrix(d, x, SpectralPoint(1.0)).G - mat2(2, 1, -1, 0))) < 1e-13);
  for (cplx z : {cplx(2, 0), cplx(0.6, 0.8), cplx(0, 1.2)}) {
    Mat2 G = closed_form_G({1, 0, 0}, x, SpectralPoint(z)).G;
    CHECK(maxabs(Mat2(G - mat2(2, z, -1.0 / z, 0))) < 1e-13);
  }
  auto c0 = closed_form_G({1, 0, 0}, {}, SpectralPoint(0.7));
  CHECK(maxabs(Mat2(c0.G - Mat2::Identity())) < 1e-15);
  CHECK(maxabs(c0.lambdaAi) < 1e-15);
}

TEST_CASE("numeric G against the closed form") {
  std::mt19937_64 g(8);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    auto p = rand_params(g);
    R4Point x = rand_point(g, 3);
    SpectralPoint z(rand_unit(g));
    worst = std::max(worst, maxabs(Mat2(patching_matrix(one_instanton_data(p), x, z).G - closed_form_G(p, x, z).G)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("G is real and unimodular") {
  std::mt19937_64 g(10);
  OneInstantonParams p{2, cplx(0, 1), 1.0};
  auto f = closed_form_field(p);
  double real = 0, det = 0;
  for (int i = 0; i < 100; ++i) {
    R4Point x = rand_point(g, 3);
    SpectralPoint z(rand_unit(g) * 1.1);
    Mat2 G = f(x, z);
    real = std::max(real, maxabs(Mat2(f(x, sigma_cp1(z)).adjoint() - G)));
    det = std::max(det, std::abs(G.determinant() - 1.0));
  }
  CHECK(real < 1e-12);
  CHECK(det < 1e-12);
}

TEST_CASE("two-instanton datum") {
  Mat2 b1 = quaternion(cplx(0.8, 0.1), cplx(-0.2, 0.3)), b2 = quaternion(cplx(-0.7, 0.2), cplx(0.1, -0.4));
  auto d = two_instanton_data(1.0, 0.7, b1, b2, 0.3);
  CHECK(validate(d).pass());
  auto f = adhm_field(d);
  std::mt19937_64 g(12);
  double real = 0, det = 0;
  for (int i = 0; i < 50; ++i) {
    R4Point x = rand_point(g, 3);
    SpectralPoint z(rand_unit(g));
    Mat2 G = f(x, z);
    real = std::max(real, maxabs(Mat2(f(x, sigma_cp1(z)).adjoint() - G)));
    det = std::max(det, std::abs(G.determinant() - 1.0));
  }
  CHECK(real < 1e-10);
  CHECK(det < 1e-10);
}

}
