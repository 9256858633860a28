#include <doctest.h>

#include "support.hpp"

using namespace sdym;
using namespace sdym::test;

namespace {
const AnnulusSpec kSpec{0.25, 64};
}

TEST_SUITE("rhsplit") {

TEST_CASE("identity jump") {
  auto s = birkhoff_split(sample_loop([](cplx) { return Mat2(Mat2::Identity()); }, kSpec), {24});
  for (int j = 0; j < kSpec.n_samples; j += 7) {
    CHECK(maxabs(Mat2(s.psi0.sample(j) - Mat2::Identity())) < 1e-13);
    CHECK(maxabs(Mat2(s.psiInf.sample(j) - Mat2::Identity())) < 1e-13);
  }
  CHECK(maxabs(Mat2(j_function(s) - Mat2::Identity())) < 1e-13);
  auto chi = chi_functions(s);
  CHECK(maxabs(Mat2(chi.chi0.sample(3) - Mat2::Identity())) < 1e-13);
  CHECK(maxabs(Mat2(chi.chiInf.sample(3) - Mat2::Identity())) < 1e-13);
}

TEST_CASE("nontrivial splitting type is reported") {
  // diag(1/z, z) in a constant frame, kept real; partial indices -1, 1
  auto G = sample_loop([](cplx z) { return mat2(0, z, -1.0 / z, 0); }, kSpec);
  CHECK_THROWS_WITH_AS(birkhoff_split(G, {24}), doctest::Contains("NontrivialSplittingType"), Error);
}

TEST_CASE("instanton line splits") {
  auto s = split_at(closed_form_field({1, 0, 0}), from_complex(1.0, 0.0), kSpec, {24});
  CHECK(s.recon_residual < 1e-10);
  CHECK(s.analytic_residual < 1e-10);
  CHECK(s.reality_residual < 1e-10);
  CHECK(s.psi0.max_mode_below(0) < 1e-10);
  CHECK(s.psiInf.max_mode_above(0) < 1e-10);
}

TEST_CASE("J is hermitian and unimodular") {
  std::mt19937_64 g(3);
  auto f = closed_form_field({1, 0, 0});
  double herm = 0, det = 0, recon = 0;
  for (int i = 0; i < 20; ++i) {
    auto s = split_at(f, rand_point(g, 3), kSpec, {24});
    Mat2 J = j_function(s);
    herm = std::max(herm, maxabs(Mat2(J - J.adjoint())));
    det = std::max(det, std::abs(J.determinant() - 1.0));
    recon = std::max(recon, s.recon_residual);
    CHECK(J.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff() > 0);
  }
  CHECK(herm < 1e-10);
  CHECK(det < 1e-10);
  CHECK(recon < 1e-10);
}

TEST_CASE("chi normalisation") {
  std::mt19937_64 g(5);
  auto s = split_at(closed_form_field({1.2, cplx(0.3, 0), cplx(0, -0.4)}), rand_point(g, 2), kSpec, {24});
  auto chi = chi_functions(s);
  CHECK(maxabs(Mat2(chi.chi0.eval(0.0) - Mat2::Identity())) < 1e-12);
  CHECK(chi.chi0.max_mode_below(0) < 1e-10);
  CHECK(chi.chiInf.max_mode_above(0) < 1e-10);
  // J = chi_inf chi_0^-1 on the circle, up to the two normalisations
  Mat2 J = j_function(s);
  for (int j = 0; j < kSpec.n_samples; j += 9) {
    Mat2 G = s.psiInf.sample(j).inverse() * s.psi0.sample(j);
    Mat2 viaChi = chi.chiInf.sample(j).inverse() * J * chi.chi0.sample(j);
    CHECK(maxabs(Mat2(G - viaChi)) < 1e-10);
  }
}

TEST_CASE("Fourier round trip") {
  std::mt19937_64 g(7);
  std::vector<Mat2> f(32);
  for (auto& m : f) m = rand_mat(g);
  auto back = idft_samples(dft_modes(f));
  double worst = 0;
  for (int j = 0; j < 32; ++j) worst = std::max(worst, maxabs(Mat2(back[j] - f[j])));
  CHECK(worst < 1e-13);
}

}
