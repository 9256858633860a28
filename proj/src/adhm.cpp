#include "sdym/adhm.hpp"

#include <random>

namespace sdym {

namespace {

constexpr double kRankTol = 1e-8;

CMat block_eps(int n) {
  CMat m = CMat::Zero(n, n);
  for (int i = 0; i + 1 < n; i += 2) {
    m(i, i + 1) = 1.0;
    m(i + 1, i) = -1.0;
  }
  return m;
}

CMat block_j(int n) {
  CMat m = CMat::Zero(n, n);
  for (int i = 0; i + 1 < n; i += 2) {
    m(i, i + 1) = -1.0;
    m(i + 1, i) = 1.0;
  }
  return m;
}

// numerical rank by singular values below kRankTol * largest
int num_rank(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > kRankTol * s(0)) ++r;
  return r;
}

cplx crandn(std::mt19937_64& g) {
  std::normal_distribution<double> n;
  return {n(g), n(g)};
}

CVec crandv(std::mt19937_64& g, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = crandn(g);
  return v;
}

}  // namespace

CMat ADHMData::A_at(const std::array<cplx, 4>& z) const {
  CMat m = z[0] * A[0];
  for (int i = 1; i < 4; ++i) m += z[i] * A[i];
  return m;
}

void ADHMData::check_shapes() const {
  int n = dim();
  if (k < 1) throw Error(ErrorCode::ShapeMismatch, "k must be positive");
  for (const auto& a : A)
    if (a.rows() != n || a.cols() != k) throw Error(ErrorCode::ShapeMismatch, "A_i must be (2k+2) x k");
  if (omega.rows() != n || omega.cols() != n) throw Error(ErrorCode::ShapeMismatch, "omega must be (2k+2) square");
  if (JV.rows() != n || JV.cols() != n) throw Error(ErrorCode::ShapeMismatch, "JV must be (2k+2) square");
  if (JW.rows() != k || JW.cols() != k) throw Error(ErrorCode::ShapeMismatch, "JW must be k x k");
}

R4Point instanton_center(const OneInstantonParams& p) { return from_complex(p.alpha, p.beta); }

bool ValidationReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::array<cplx, 4> line_point(const R4Point& x, const SpectralPoint& z) {
  cplx u = x.u(), v = x.v();
  if (z.is_inf()) return {0.0, 1.0, -std::conj(v), std::conj(u)};
  auto [w1, w2] = incidence(x, z);
  return {1.0, z.value(), w1, w2};
}

ADHMData one_instanton_data(const OneInstantonParams& p) {
  if (!(p.lam > 0)) throw Error(ErrorCode::BadInput, "scale lambda must be positive");
  ADHMData d;
  d.k = 1;
  for (auto& a : d.A) a = CMat::Zero(4, 1);
  // column (lam z1, lam z2, alpha z1 - conj(beta) z2 - z3, beta z1 + conj(alpha) z2 - z4)
  d.A[0](0, 0) = p.lam;
  d.A[0](2, 0) = p.alpha;
  d.A[0](3, 0) = p.beta;
  d.A[1](1, 0) = p.lam;
  d.A[1](2, 0) = -std::conj(p.beta);
  d.A[1](3, 0) = std::conj(p.alpha);
  d.A[2](2, 0) = -1.0;
  d.A[3](3, 0) = -1.0;
  d.omega = block_eps(4);
  d.JV = block_j(4);
  d.JW = CMat::Identity(1, 1);
  return d;
}

Mat2 quaternion(cplx a, cplx b) { return mat2(a, -std::conj(b), b, std::conj(a)); }

ADHMData quaternionic_data(const std::vector<Mat2>& Lambda, const std::vector<std::vector<Mat2>>& B) {
  const int k = int(Lambda.size());
  if (k < 1 || int(B.size()) != k) throw Error(ErrorCode::ShapeMismatch, "B must be k x k");
  ADHMData d;
  d.k = k;
  const int n = 2 * k + 2;
  for (auto& a : d.A) a = CMat::Zero(n, k);
  for (int j = 0; j < k; ++j) {
    if (int(B[j].size()) != k) throw Error(ErrorCode::ShapeMismatch, "B must be k x k");
    for (int c = 0; c < 2; ++c) {
      // coefficient of z1 (c = 0) and z2 (c = 1)
      d.A[c].block(0, j, 2, 1) = Lambda[j].col(c);
      for (int i = 0; i < k; ++i) d.A[c].block(2 + 2 * i, j, 2, 1) = B[i][j].col(c);
    }
    d.A[2](2 + 2 * j, j) = -1.0;
    d.A[3](3 + 2 * j, j) = -1.0;
  }
  d.omega = block_eps(n);
  d.JV = block_j(n);
  d.JW = CMat::Identity(k, k);
  return d;
}

ADHMData two_instanton_data(double lam1, double lam2, const Mat2& b1, const Mat2& b2, double mu) {
  Mat2 c = mu * (b1 - b2);
  return quaternionic_data({lam1 * Mat2::Identity(), lam2 * Mat2::Identity()}, {{b1, c}, {c, b2}});
}

ValidationReport validate(const ADHMData& d, unsigned seed, double tol) {
  d.check_shapes();
  ValidationReport rep;
  const int n = d.dim(), k = d.k;
  std::mt19937_64 g(seed);
  const int samples = 24;

  auto add = [&](const std::string& name, double r) { rep.checks.push_back({name, r, tol, r < tol}); };

  add("omega_antisymmetric", maxabs(CMat(d.omega + d.omega.transpose())));
  {
    Eigen::JacobiSVD<CMat> svd(d.omega);
    const auto& s = svd.singularValues();
    bool ok = s.size() > 0 && s(0) > 0 && s(s.size() - 1) > kRankTol * s(0);
    rep.checks.push_back({"omega_nondegenerate", ok ? 0.0 : 1.0, tol, ok});
  }
  add("JV_squares_to_minus_one", maxabs(CMat(d.JV * d.JV.conjugate() + CMat::Identity(n, n))));
  add("JW_squares_to_one", maxabs(CMat(d.JW * d.JW.conjugate() - CMat::Identity(k, k))));

  double compat = 0, real = 0, iso = 0;
  int rank_def = 0;
  for (int s = 0; s < samples; ++s) {
    CVec a = crandv(g, n), b = crandv(g, n);
    compat = std::max(compat, std::abs(d.form(d.sigma_V(a), d.sigma_V(b)) - std::conj(d.form(a, b))));

    std::array<cplx, 4> z;
    for (auto& c : z) c = crandn(g);
    CVec w = crandv(g, k);
    CVec lhs = d.sigma_V(d.A_at(z) * w);
    CVec rhs = d.A_at(sigma_c4(z)) * d.sigma_W(w);
    real = std::max(real, maxabs(CMat(lhs - rhs)) / std::max(1.0, maxabs(CMat(lhs))));

    CMat Az = d.A_at(z);
    CVec wa = crandv(g, k), wb = crandv(g, k);
    iso = std::max(iso, std::abs(d.form(Az * wa, Az * wb)) / std::max(1.0, Az.squaredNorm()));
    if (num_rank(Az) < k) ++rank_def;
  }
  for (int i = 0; i < 4; ++i) {
    std::array<cplx, 4> z{0.0, 0.0, 0.0, 0.0};
    z[i] = 1.0;
    if (num_rank(d.A_at(z)) < k) ++rank_def;
  }
  add("sigma_compatibility", compat);
  add("reality", real);
  add("isotropy", iso);
  rep.checks.push_back({"rank", double(rank_def), tol, rank_def == 0});
  return rep;
}

LineBasis line_basis_at(const ADHMData& d, const std::array<cplx, 4>& zvec) {
  const int k = d.k, n = d.dim();
  LineBasis lb;
  lb.v = d.A_at(zvec);
  CMat MV = lb.v.transpose() * d.omega;  // k x n, row i = (v_i, .)

  // chart: the block pairing U_z with the odd standard vectors must be invertible
  CMat N = CMat::Zero(n, k);
  for (int i = 0; i < k; ++i) N(2 * i + 1, i) = 1.0;
  CMat Mn = MV * N;
  Eigen::ColPivHouseholderQR<CMat> qr(Mn);
  double rmax = std::abs(qr.matrixQR()(0, 0));
  double rmin = std::abs(qr.matrixQR()(k - 1, k - 1));
  if (!(rmax > 0) || rmin < kRankTol * rmax)
    throw Error(ErrorCode::DegenerateLine, "U_z pairing block is singular at this point");

  CVec s1 = CVec::Zero(n), s2 = CVec::Zero(n);
  s1(2 * k) = 1.0;
  s2(2 * k + 1) = 1.0;
  lb.e1 = s1 + N * qr.solve(CVec(-MV * s1));
  lb.e2 = s2 + N * qr.solve(CVec(-MV * s2));
  cplx p = d.form(lb.e1, lb.e2);
  if (std::abs(p) < kRankTol) throw Error(ErrorCode::DegenerateLine, "(e1, e2) vanishes");
  lb.e2 /= p;

  // w^i: dual to v_i, orthogonal to e_A, isotropic
  CMat w = N * qr.solve(CMat(CMat::Identity(k, k)));
  for (int i = 0; i < k; ++i) {
    CVec c = w.col(i);
    w.col(i) = c - d.form(c, lb.e2) * lb.e1 + d.form(c, lb.e1) * lb.e2;
  }
  CMat S = w.transpose() * d.omega * w;
  lb.w = w - 0.5 * lb.v * S.transpose();
  return lb;
}

LineBasis line_basis(const ADHMData& d, const R4Point& x, const SpectralPoint& z) {
  d.check_shapes();
  std::array<cplx, 4> zv = line_point(x, z);
  LineBasis lb = line_basis_at(d, zv);
  LineBasis ls = line_basis_at(d, sigma_c4(zv));
  lb.f1 = -d.sigma_V(ls.e2);
  lb.f2 = d.sigma_V(ls.e1);
  return lb;
}

PatchingResult patching_matrix(const ADHMData& d, const R4Point& x, const SpectralPoint& z) {
  LineBasis lb = line_basis(d, x, z);
  const int k = d.k, n = d.dim();
  CMat B(n, n);
  B.col(0) = lb.e1;
  B.col(1) = lb.e2;
  B.block(0, 2, n, k) = lb.v;
  B.block(0, 2 + k, n, k) = lb.w;
  Eigen::ColPivHouseholderQR<CMat> qr(B);
  double rmax = std::abs(qr.matrixQR()(0, 0));
  double rmin = std::abs(qr.matrixQR()(n - 1, n - 1));
  if (!(rmax > 0) || rmin < kRankTol * rmax)
    throw Error(ErrorCode::SingularSystem, "basis {e, v, w} is numerically singular");
  CMat F(n, 2);
  F.col(0) = lb.f1;
  F.col(1) = lb.f2;
  CMat y = qr.solve(F);
  PatchingResult r;
  r.G = y.block(0, 0, 2, 2).transpose();
  r.lambdaAi = y.block(2, 0, k, 2).transpose();
  return r;
}

PatchingResult closed_form_G(const OneInstantonParams& p, const R4Point& x, const SpectralPoint& z) {
  if (z.is_inf() || z.is_zero())
    throw Error(ErrorCode::PoleAtChartBoundary, "closed-form G is singular at z = 0, inf");
  cplx zz = z.value(), u = x.u(), v = x.v();
  cplx A1 = p.lam, A2 = p.lam * zz;
  cplx A3 = (p.alpha - u) - zz * (std::conj(p.beta) - std::conj(v));
  cplx A4 = (p.beta - v) + zz * (std::conj(p.alpha) - std::conj(u));
  cplx P = A1 * A2;
  PatchingResult r;
  r.G = mat2(1.0 + A3 * A4 / P, A4 * A4 / P, -A3 * A3 / P, 1.0 - A3 * A4 / P);
  r.lambdaAi = CMat(2, 1);
  r.lambdaAi << -A4 / P, A3 / P;
  return r;
}

PatchingField adhm_field(const ADHMData& d) {
  d.check_shapes();
  return {[d](const R4Point& x, const SpectralPoint& z) { return patching_matrix(d, x, z).G; }, "from-ADHM"};
}

PatchingField closed_form_field(const OneInstantonParams& p) {
  return {[p](const R4Point& x, const SpectralPoint& z) { return closed_form_G(p, x, z).G; }, "closed-form-k1"};
}

PatchingField identity_field() {
  return {[](const R4Point&, const SpectralPoint&) -> Mat2 { return Mat2::Identity(); }, "synthetic"};
}

}  // namespace sdym
