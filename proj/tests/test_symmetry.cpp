#include <doctest.h>

#include "support.hpp"

using namespace sdym;
using namespace sdym::test;

namespace {

TwistorPoly random_poly(std::mt19937_64& g, int terms, int max_deg) {
  std::uniform_int_distribution<int> D(0, max_deg), M(-1, 1);
  TwistorPoly T;
  for (int i = 0; i < terms; ++i) T.terms.push_back({D(g), D(g), M(g), rand_mat(g)});
  return T;
}

Mat2 traceless(const Mat2& m) { return m - 0.5 * m.trace() * Mat2::Identity(); }

const R4Point kSite{0.3, -0.2, 0.4, 0.1};
const TwistorPoly kZE = TwistorPoly::monomial(0, 0, 1, kE);

}  // namespace

TEST_SUITE("symmetry") {

TEST_CASE("evaluating T") {
  std::mt19937_64 g(1);
  CHECK(maxabs(Mat2(eval_T(kZE, rand_point(g, 2), SpectralPoint(2.0)) - mat2(0, 2, 0, 0))) < 1e-15);
  Mat2 c = rand_mat(g);
  CHECK(maxabs(Mat2(eval_T(TwistorPoly::monomial(1, 0, 0, c), from_complex(1.0, 0.0), SpectralPoint(cplx(0, 1))) - c)) <
        1e-15);
  CHECK_THROWS_AS(eval_T(kZE, {}, SpectralPoint::infinity()), Error);

  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    TwistorPoly T = random_poly(g, 5, 2);
    MatField f = [T](const R4Point& x, const SpectralPoint& z) { return eval_T(T, x, z); };
    R4Point x = rand_point(g, 1);
    SpectralPoint z(rand_unit(g));
    worst = std::max({worst, maxabs(twistor_derivative(f, TwistorDir::X, x, z, 1e-4)),
                      maxabs(twistor_derivative(f, TwistorDir::Y, x, z, 1e-4))});
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("infinitesimal action on G") {
  std::mt19937_64 g(2);
  CHECK(maxabs(g_flow_infinitesimal(TwistorPoly{}, rand_mat(g), kSite, SpectralPoint(1.0))) == 0);
  Mat2 A = rand_mat(g);
  Mat2 H = A + A.adjoint();
  CHECK(maxabs(Mat2(g_flow_infinitesimal(TwistorPoly::constant(H), Mat2::Identity(), kSite, SpectralPoint(0.8)) + 2.0 * H)) <
        1e-14);

  auto f = closed_form_field({1.1, 0.3, cplx(0, -0.2)});
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    TwistorPoly T = random_poly(g, 3, 1);
    R4Point x = rand_point(g, 2);
    SpectralPoint z(rand_unit(g));
    Mat2 d = g_flow_infinitesimal(T, f(x, z), x, z);
    Mat2 ds = g_flow_infinitesimal(T, f(x, sigma_cp1(z)), x, sigma_cp1(z)).adjoint();
    worst = std::max(worst, maxabs(Mat2(d - ds)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("exponentiated action") {
  auto f = closed_form_field({1, 0, 0});
  std::mt19937_64 g(3);
  R4Point x = rand_point(g, 1);
  SpectralPoint z(rand_unit(g));
  CHECK(maxabs(Mat2(g_flow_exp(TwistorPoly{}, 0.7, f)(x, z) - f(x, z))) == 0);

  TwistorPoly T = random_poly(g, 3, 1);
  Mat2 inf = g_flow_infinitesimal(T, f(x, z), x, z);
  double e1 = maxabs(Mat2((g_flow_exp(T, 1e-3, f)(x, z) - f(x, z)) / 1e-3 - inf));
  double e2 = maxabs(Mat2((g_flow_exp(T, 5e-4, f)(x, z) - f(x, z)) / 5e-4 - inf));
  CHECK(e2 < e1);
  CHECK(e1 / e2 == doctest::Approx(2).epsilon(0.05));
  CHECK(maxabs(Mat2((g_flow_exp(T, 1e-6, f)(x, z) - f(x, z)) / 1e-6 - inf)) < 1e-4);
}

TEST_CASE("generators analytic at infinity act by gauge") {
  // p + q + m <= 0: exp(-tT) is holomorphic on the outer region and J moves by a constant conjugation
  std::mt19937_64 g(4);
  TwistorPoly T = TwistorPoly::monomial(0, 0, -1, traceless(rand_mat(g))) +
                  TwistorPoly::monomial(1, 0, -1, traceless(rand_mat(g))) + TwistorPoly::constant(traceless(rand_mat(g)));
  auto f = closed_form_field({1, 0.2, 0});
  auto f2 = g_flow_exp(T, 0.3, f);
  for (int i = 0; i < 3; ++i) {
    R4Point x = rand_point(g, 1);
    // gauge-invariant up to the O(h^4) stencil error at h = 1e-2
    CHECK(action_density(f2, x) == doctest::Approx(action_density(f, x)).epsilon(1e-7));
    AnnulusSpec spec{0.25, 64};
    Mat2 J = j_function(split_at(f, x, spec, {24}));
    Mat2 J2 = j_function(split_at(f2, x, spec, {24}));
    Mat2 ginf = expm2(Mat2(-0.3 * eval_T(T, x, SpectralPoint::infinity())));
    CHECK(maxabs(Mat2(J2 - ginf * J * ginf.adjoint())) < 1e-9);
  }
}

TEST_CASE("Jdot") {
  AnnulusSpec spec{0.25, 64};
  auto flat = split_at(identity_field(), kSite, spec, {16});
  CHECK(maxabs(j_dot(TwistorPoly{}, SpectralPoint(1.05), flat, kSite).value) == 0);
  std::mt19937_64 g(5);
  Mat2 A = rand_mat(g);
  Mat2 H = A + A.adjoint();
  CHECK(maxabs(Mat2(j_dot(TwistorPoly::constant(H), SpectralPoint(cplx(0.3, 1)), flat, kSite).value - 2.0 * H)) < 1e-13);
  CHECK_THROWS_AS(j_dot(kZE, SpectralPoint(3.0), flat, kSite), Error);

  double gap = 0;
  for (int i = 0; i < 50; ++i) {
    auto p = rand_params(g);
    R4Point x = rand_point(g, 2);
    auto s = split_at(closed_form_field(p), x, spec, {24});
    SpectralPoint lam(rand_unit(g) * 1.1);
    gap = std::max(gap, j_dot(random_poly(g, 3, 1), lam, s, x).form_gap);
  }
  CHECK(gap < 1e-10);
}

TEST_CASE("linearisation") {
  auto f = closed_form_field({1, 0, 0});
  double prev = 0;
  for (double h : {0.04, 0.02}) {
    auto jp = j_and_jdot(kZE, SpectralPoint(1.0), f, GridSpec::around(kSite, h, 5), {{0.25, 64}, {24}});
    double r = linearisation_residual(jp.J, jp.Jdot);
    if (h < 0.04) CHECK(prev / r > 3.5);
    prev = r;

    MatGrid zero = jp.Jdot;
    for (auto& m : zero.data) m.setZero();
    CHECK(linearisation_residual(jp.J, zero) == 0);
    std::mt19937_64 g(6);
    MatGrid noise = jp.Jdot;
    for (auto& m : noise.data) m = rand_mat(g);
    CHECK(linearisation_residual(jp.J, noise) > 1);
  }
}

TEST_CASE("flow integration") {
  auto f = closed_form_field({1, 0, 0});
  std::mt19937_64 g(7);
  R4Point x = rand_point(g, 1);
  SpectralPoint z(rand_unit(g));
  DeformField zero = [](double, const R4Point&, const SpectralPoint&) { return Mat2(Mat2::Zero()); };
  CHECK(maxabs(Mat2(integrate_flow(zero, f, 0.5).G(x, z) - f(x, z))) == 0);

  Mat2 D = 0.5 * rand_mat(g);
  DeformField cst = [D](double, const R4Point&, const SpectralPoint&) { return D; };
  auto st = integrate_flow(cst, identity_field(), 0.8, {16, 4096, 1e-12});
  Mat2 e = expm2(Mat2(0.8 * D));
  CHECK(maxabs(Mat2(st.G(x, z) - e * e.adjoint())) < 1e-10);
}

TEST_CASE("h0 analyticity") {
  H0Options opt;
  opt.t_step = 1e-4;
  CHECK(h0_verify(TwistorPoly{}, SpectralPoint(1.05), identity_field(), kSite, opt).residual == 0);
  std::mt19937_64 g(8);
  auto flat = h0_verify(TwistorPoly::constant(traceless(rand_mat(g))), SpectralPoint(1.05), identity_field(), kSite, opt);
  CHECK(flat.pass);
  auto inst = h0_verify(kZE, SpectralPoint(1.05), closed_form_field({1, 0, 0}), kSite, opt);
  CHECK(inst.residual < 1e-6);
  CHECK(inst.pass);
  CHECK_THROWS_AS(h0_verify(kZE, SpectralPoint(1.2), identity_field(), kSite, opt), Error);
}

TEST_CASE("Gdot routes") {
  auto inst = closed_form_field({1, 0, 0});
  auto r0 = gdot_consistency(TwistorPoly{}, inst, kSite, GdotRoute::JFlow);
  CHECK(r0.raw == 0);
  for (auto f : {identity_field(), inst}) {
    auto e = gdot_consistency(kZE, f, kSite, GdotRoute::ExpFlow);
    CHECK(e.raw < 1e-8);
    auto j = gdot_consistency(kZE, f, kSite, GdotRoute::JFlow);
    CHECK(j.residual < 1e-6);
    auto l = gdot_consistency(kZE, f, kSite, GdotRoute::LambdaIndependence);
    CHECK(l.residual < 1e-6);
  }
}

TEST_CASE("scale from the density profile") {
  for (double lam : {0.7, 1.5}) {
    OneInstantonParams p{lam, cplx(0.2, 0), 0};
    auto m = measure_scale(closed_form_field(p), instanton_center(p), 8 * lam);
    CHECK(m.lambda_eff == doctest::Approx(lam).epsilon(1e-3));
  }
  CHECK(lambda_from_half_radius(std::sqrt(std::pow(2.0, 0.25) - 1)) == doctest::Approx(1.0));
}

}
