#include "sdym/rhsplit.hpp"

#include <Eigen/Eigenvalues>

namespace sdym {

namespace {

// J^{-1/2} for hermitian positive-definite J
Mat2 inv_sqrt(const Mat2& J) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (J + J.adjoint()));
  auto ev = es.eigenvalues();
  if (!(ev(0) > 0)) throw Error(ErrorCode::NotReal, "J is not positive-definite");
  Eigen::Vector2cd s(std::sqrt(ev(0)), std::sqrt(ev(1)));
  Mat2 V = es.eigenvectors();
  return V * s.cwiseInverse().asDiagonal() * V.adjoint();
}

void check_det(const LoopMatrix& G, double tol) {
  for (const Mat2& g : G.samples()) {
    double scale = std::max(1.0, maxabs(g));
    if (std::abs(g.determinant() - 1.0) > tol * scale * scale)
      throw Error(ErrorCode::BadInput, "det G deviates from 1 on the circle");
  }
}

void check_real(const LoopMatrix& G, double tol) {
  int n = G.n();
  for (int j = 0; j < n; ++j) {
    const Mat2& g = G.sample(j);
    double scale = std::max(1.0, maxabs(g));
    // sigma(z) = -z on the unit circle, i.e. sample j + n/2
    const Mat2& gs = G.sample((j + n / 2) % n);
    if (maxabs(Mat2(gs.adjoint() - g)) > tol * scale) throw Error(ErrorCode::NotReal, "G* != G on input");
  }
}

}  // namespace

Splitting birkhoff_split(const LoopMatrix& G, const SplitConfig& cfg) {
  check_det(G, cfg.real_tol);
  const int n = G.n(), M = cfg.M, L = n / 2 - 1;
  if (M < 1 || M > L) throw Error(ErrorCode::ShapeMismatch, "M must lie in [1, n/2 - 1]");

  // effective Fourier band of G; rows past M + band are identically zero
  double gmax = 0;
  for (int m = -L; m <= L; ++m) gmax = std::max(gmax, maxabs(G.mode(m)));
  int band = 0;
  for (int m = 1; m <= L; ++m)
    if (std::max(maxabs(G.mode(m)), maxabs(G.mode(-m))) > 1e-14 * gmax) band = m;

  // Psi_inf = 1 + sum_{j=1..M} b_{-j} z^{-j}; kill modes -1..-(M+band) of Psi_inf G.
  // Transposed: sum_j g_{r+j}^T b_{-j}^T = -g_r^T for r < 0.
  const int R = M + band;
  CMat A = CMat::Zero(2 * R, 2 * M), rhs(2 * R, 2);
  for (int r = 1; r <= R; ++r) {
    rhs.block<2, 2>(2 * (r - 1), 0) = -G.mode(-r).transpose();
    for (int j = 1; j <= M; ++j) A.block<2, 2>(2 * (r - 1), 2 * (j - 1)) = G.mode(j - r).transpose();
  }
  Eigen::ColPivHouseholderQR<CMat> qr(A);
  // rank-revealing diagonal of the pivoted R
  double r0 = std::abs(qr.matrixQR()(0, 0));
  double ratio = r0 > 0 ? std::abs(qr.matrixQR()(2 * M - 1, 2 * M - 1)) / r0 : 0.0;
  if (ratio < cfg.rank_tol)
    throw Error(ErrorCode::NontrivialSplittingType, "Fourier system rank-deficient (ratio " + std::to_string(ratio) + ")");
  check_real(G, cfg.real_tol);
  CMat sol = qr.solve(rhs);

  std::vector<Mat2> b(M + 1);  // b[j] = coefficient of z^{-j}
  b[0] = Mat2::Identity();
  for (int j = 1; j <= M; ++j) b[j] = sol.block<2, 2>(2 * (j - 1), 0).transpose();

  // modes of Psi_inf G by direct convolution
  auto prod_mode = [&](int p) {
    Mat2 c = Mat2::Zero();
    for (int j = 0; j <= M; ++j) c += b[j] * G.mode(p + j);
    return c;
  };
  double analytic = 0;
  for (int r = 1; r <= R; ++r) analytic = std::max(analytic, maxabs(prod_mode(-r)));

  // left constant gauge: psi_0 hermitian positive-definite, psi_inf = psi_0^{-dagger}
  Mat2 J = prod_mode(0);
  if (maxabs(Mat2(J - J.adjoint())) > 1e-8 * std::max(1.0, maxabs(J)))
    throw Error(ErrorCode::NotReal, "J is not hermitian");
  Mat2 S = inv_sqrt(J);

  std::vector<Mat2> c0(L + 1);
  for (int p = 0; p <= L; ++p) c0[p] = S * prod_mode(p);

  // Psi_inf = S b keeps Psi_inf^-1 Psi_0 = G to rounding; reality is checked against
  // adj(Psi_0*) mode by mode, Psi_0*(z) = sum (-1)^m c_m^dagger z^{-m}
  std::vector<Mat2> cinf(L + 1);  // index by -m, from mode -L up to 0
  double reality = 0;
  for (int m = 0; m <= L; ++m) {
    Mat2 bm = adj2(Mat2((m % 2 ? -1.0 : 1.0) * c0[m].adjoint()));
    cinf[L - m] = m <= M ? Mat2(S * b[m]) : Mat2::Zero();
    reality = std::max(reality, maxabs(Mat2(bm - cinf[L - m])));
  }

  Splitting s;
  s.psi0 = LoopMatrix::from_modes(G.spec(), 0, L, c0);
  s.psiInf = LoopMatrix::from_modes(G.spec(), -L, 0, cinf);
  s.psi0_at0 = c0[0];
  s.psiInf_atInf = cinf[L];
  s.analytic_residual = analytic * maxabs(S);
  s.reality_residual = reality;
  s.sv_ratio = ratio;
  double rec = 0;
  for (int j = 0; j < n; ++j)
    rec = std::max(rec, maxabs(Mat2(inv2(s.psiInf.sample(j)) * s.psi0.sample(j) - G.sample(j))));
  s.recon_residual = rec;
  return s;
}

Splitting split_at(const PatchingField& f, const R4Point& x, const AnnulusSpec& spec, const SplitConfig& cfg) {
  return birkhoff_split(sample_loop(f, x, spec), cfg);
}

Mat2 j_function(const Splitting& s) { return inv2(s.psiInf_atInf) * s.psi0_at0; }

ChiPair chi_functions(const Splitting& s) {
  Mat2 a0 = inv2(s.psi0_at0), ai = inv2(s.psiInf_atInf);
  std::vector<Mat2> c0, ci;
  for (int m = 0; m <= s.psi0.hi(); ++m) c0.push_back(a0 * s.psi0.mode(m));
  for (int m = s.psiInf.lo(); m <= 0; ++m) ci.push_back(ai * s.psiInf.mode(m));
  const auto& spec = s.psi0.spec();
  return {LoopMatrix::from_modes(spec, 0, s.psi0.hi(), c0), LoopMatrix::from_modes(spec, s.psiInf.lo(), 0, ci)};
}

}  // namespace sdym
