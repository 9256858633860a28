#include <doctest.h>

#include "support.hpp"

using namespace sdym;
using namespace sdym::test;

TEST_SUITE("geometry") {

TEST_CASE("complex coordinates") {
  auto [u, v] = to_complex({1, 0, 0, 0});
  CHECK(u == cplx(1, 0));
  CHECK(v == cplx(0, 0));
  auto [u0, v0] = to_complex({0, 0, 0, 0});
  CHECK(std::abs(u0) + std::abs(v0) == 0);
  auto [u1, v1] = to_complex({0, 1, 1, 1});
  CHECK(u1 == cplx(0, 1));
  CHECK(v1 == cplx(1, -1));
}

TEST_CASE("sigma on CP1") {
  CHECK(std::abs(sigma_cp1(SpectralPoint(1.0)).value() + 1.0) < 1e-15);
  CHECK(std::abs(sigma_cp1(SpectralPoint(cplx(0, 1))).value() - cplx(0, -1)) < 1e-15);
  for (cplx z : {cplx(0.3, 0.4), cplx(2, 0)}) CHECK(std::abs(sigma_cp1(sigma_cp1(SpectralPoint(z))).value() - z) < 1e-15);
  CHECK(sigma_cp1(sigma_cp1(SpectralPoint::infinity())).is_inf());
  CHECK(sigma_cp1(SpectralPoint(0.0)).is_inf());
  CHECK(sigma_cp1(SpectralPoint::infinity()).is_zero());
}

TEST_CASE("sigma on C4") {
  auto a = sigma_c4({1, 0, 0, 0});
  CHECK(std::abs(a[1] - 1.0) + std::abs(a[0]) + std::abs(a[2]) + std::abs(a[3]) < 1e-15);
  auto b = sigma_c4({0, 0, 1, 0});
  CHECK(std::abs(b[3] - 1.0) + std::abs(b[0]) + std::abs(b[1]) + std::abs(b[2]) < 1e-15);
  std::array<cplx, 4> w{1.0, cplx(0, 1), 2.0, cplx(0, -1)};
  auto ww = sigma_c4(sigma_c4(w));
  for (int i = 0; i < 4; ++i) CHECK(std::abs(ww[i] + w[i]) < 1e-15);
}

TEST_CASE("incidence") {
  std::mt19937_64 g(3);
  auto [a, b] = incidence({}, SpectralPoint(rand_unit(g)));
  CHECK(std::abs(a) + std::abs(b) == 0);
  auto [w1, w2] = incidence(from_complex(1.0, 0.0), SpectralPoint(2.0));
  CHECK(std::abs(w1 - 1.0) < 1e-15);
  CHECK(std::abs(w2 - 2.0) < 1e-15);
  // the line is real: the point over sigma(z) is sigma of the point over z
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    R4Point x = rand_point(g, 3);
    SpectralPoint z(rand_disk(g, 3));
    auto [p1, p2] = incidence(x, z);
    auto [s1, s2] = incidence(x, sigma_cp1(z));
    // sigma(w1, w2, 1, z) = (-conj w2, conj w1, -conj z, 1), rescaled to third entry 1
    worst = std::max(worst, std::abs(s1 - std::conj(p2) / std::conj(z.value())) +
                                std::abs(s2 + std::conj(p1) / std::conj(z.value())));
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("star of a matrix function") {
  MatField c = [](const R4Point&, const SpectralPoint&) { return mat2(0, 1, 0, 0); };
  CHECK(maxabs(Mat2(star_fn(c)({}, SpectralPoint(0.7)) - mat2(0, 0, 1, 0))) < 1e-15);
  MatField d = [](const R4Point&, const SpectralPoint& z) { return Mat2(z.value() * mat2(1, 0, 0, -1)); };
  cplx z(0.6, 0.9);
  CHECK(maxabs(Mat2(star_fn(d)({}, SpectralPoint(z)) + (1.0 / z) * mat2(1, 0, 0, -1))) < 1e-15);

  std::mt19937_64 g(5);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    std::array<Mat2, 5> co;
    for (auto& m : co) m = rand_mat(g);
    MatField f = [co](const R4Point&, const SpectralPoint& s) {
      cplx z = s.value();
      Mat2 r = Mat2::Zero();
      for (int m = -2; m <= 2; ++m) r += co[m + 2] * std::pow(z, m);
      return r;
    };
    SpectralPoint z(rand_unit(g) * 1.1);
    worst = std::max(worst, maxabs(Mat2(star_fn(star_fn(f))({}, z) - f({}, z))));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("twistor derivatives") {
  std::mt19937_64 g(9);
  R4Point x = rand_point(g, 2);
  SpectralPoint z(rand_unit(g));
  MatField w1 = [](const R4Point& y, const SpectralPoint& s) { return Mat2(incidence(y, s).first * Mat2::Identity()); };
  MatField ub = [](const R4Point& y, const SpectralPoint&) { return Mat2(std::conj(y.u()) * Mat2::Identity()); };
  MatField v = [](const R4Point& y, const SpectralPoint&) { return Mat2(y.v() * Mat2::Identity()); };
  CHECK(maxabs(twistor_derivative(w1, TwistorDir::X, x, z, 1e-3)) < 1e-10);
  CHECK(maxabs(twistor_derivative(w1, TwistorDir::Y, x, z, 1e-3)) < 1e-10);
  CHECK(maxabs(Mat2(twistor_derivative(ub, TwistorDir::X, x, z, 1e-3) - Mat2::Identity())) < 1e-10);
  CHECK(maxabs(Mat2(twistor_derivative(v, TwistorDir::X, x, z, 1e-3) + z.value() * Mat2::Identity())) < 1e-10);
}

TEST_CASE("annulus") {
  AnnulusSpec a{0.25, 64};
  CHECK(a.contains(1.05));
  CHECK_FALSE(a.contains(0.5));
  AnnulusSpec bad{-1, 64};
  CHECK_THROWS_AS(bad.check(), Error);
}

}
