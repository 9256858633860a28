#include "sdym/deform.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace sdym {

// ---------------------------------------------------------------- families

OneInstantonRate ADHMFamily::rate_at(double t) const {
  if (rate) return rate(t);
  if (!params) throw Error(ErrorCode::BadInput, "family has no k = 1 parameters");
  auto p = params(t + fd_step), m = params(t - fd_step);
  double s = 1.0 / (2 * fd_step);
  return {(p.lam - m.lam) * s, (p.alpha - m.alpha) * s, (p.beta - m.beta) * s};
}

ADHMData ADHMFamily::data_at(double t) const {
  if (data) return data(t);
  if (params) return one_instanton_data(params(t));
  throw Error(ErrorCode::BadInput, "family has no ADHM data");
}

PatchingField ADHMFamily::field_at(double t) const {
  if (is_frame_map()) {
    PatchingField G0 = closed_form_field(params(0.0));
    DeformField a = frame;
    MatField g = [a, t](const R4Point& x, const SpectralPoint& z) { return a(t, x, z); };
    return g_flow_exp(g, G0);
  }
  if (params && !data) return closed_form_field(params(t));
  return adhm_field(data_at(t));
}

double scaling_flow(double lam0, double flow_k, double t) {
  double arg = 1.0 - flow_k * lam0 * lam0 * t;
  if (!(arg > 0)) throw Error(ErrorCode::BlowupReached, "scale diverges at t = 1/(k lambda^2)");
  return lam0 / std::sqrt(arg);
}

ADHMFamily scaling_family(double lam0, double flow_k) {
  ADHMFamily f;
  f.name = "scaling";
  f.params = [=](double t) { return OneInstantonParams{scaling_flow(lam0, flow_k, t), 0.0, 0.0}; };
  f.rate = [=](double t) {
    double l = scaling_flow(lam0, flow_k, t);
    return OneInstantonRate{0.5 * flow_k * l * l * l, 0.0, 0.0};
  };
  return f;
}

ADHMFamily affine_family(const OneInstantonParams& p0, const OneInstantonRate& r) {
  ADHMFamily f;
  f.name = "affine";
  f.params = [=](double t) { return OneInstantonParams{p0.lam + r.lam * t, p0.alpha + r.alpha * t, p0.beta + r.beta * t}; };
  f.rate = [=](double) { return r; };
  return f;
}

ADHMFamily frame_map_family(const OneInstantonParams& p0) {
  ADHMFamily f;
  f.name = "frame";
  f.params = [=](double) { return p0; };
  f.rate = [](double) { return OneInstantonRate{}; };
  f.frame = [](double t, const R4Point&, const SpectralPoint& z) -> Mat2 {
    if (z.is_inf() || z.is_zero()) throw Error(ErrorCode::PoleAtChartBoundary, "frame map singular at z = 0, inf");
    if (!(std::abs(t) < 1)) throw Error(ErrorCode::BlowupReached, "frame map needs |t| < 1");
    cplx zz = z.value();
    return mat2(1.0, t / zz, t * zz, 1.0) / std::sqrt(1 - t * t);
  };
  // deformation parameter of the frame map: its t-derivative a', not a' a^-1
  f.frame_d = [](double t, const R4Point&, const SpectralPoint& z) -> Mat2 {
    if (z.is_inf() || z.is_zero()) throw Error(ErrorCode::PoleAtChartBoundary, "frame map singular at z = 0, inf");
    cplx zz = z.value();
    return mat2(t, 1.0 / zz, zz, t) * std::pow(1 - t * t, -1.5);
  };
  return f;
}

ADHMFamily smooth_family(unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  double l0 = 1.0 + 0.4 * U(g), l1 = 0.3 * U(g), l2 = 0.3 * U(g);
  cplx a0(U(g), U(g)), a1(U(g), U(g)), b0(U(g), U(g)), b1(U(g), U(g));
  double wa = 1 + U(g), wb = 1 + U(g);
  ADHMFamily f;
  f.name = "smooth-" + std::to_string(seed);
  f.params = [=](double t) {
    return OneInstantonParams{l0 + l1 * std::sin(t) + l2 * t * t, a0 + a1 * std::sin(wa * t), b0 + b1 * t * std::cos(wb * t)};
  };
  f.rate = [=](double t) {
    return OneInstantonRate{l1 * std::cos(t) + 2 * l2 * t, a1 * wa * std::cos(wa * t),
                            b1 * (std::cos(wb * t) - wb * t * std::sin(wb * t))};
  };
  return f;
}

ADHMFamily two_instanton_family(unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  double l1 = 1 + 0.2 * U(g), l2 = 0.8 + 0.2 * U(g), dl = 0.3 * U(g), mu = 0.3 + 0.1 * U(g);
  cplx a1(1 + 0.2 * U(g), 0.2 * U(g)), a2(-1 + 0.2 * U(g), 0.2 * U(g)), b1(0.3 * U(g), 0.3 * U(g)), b2(0.3 * U(g), 0.3 * U(g));
  cplx da(U(g), U(g));
  ADHMFamily f;
  f.name = "two-instanton-" + std::to_string(seed);
  f.data = [=](double t) {
    return two_instanton_data(l1 + dl * std::sin(t), l2, quaternion(a1 + da * t, b1), quaternion(a2, b2 + da * t * t), mu);
  };
  return f;
}

// ---------------------------------------------------------------- d for k = 1

Mat2 d_param_k1(const ADHMFamily& fam, double t, const R4Point& x, const SpectralPoint& z) {
  if (z.is_inf() || z.is_zero()) throw Error(ErrorCode::PoleAtChartBoundary, "d has poles at z = 0, inf");
  if (fam.is_frame_map()) return fam.frame_d(t, x, z);
  auto p = fam.params(t);
  auto r = fam.rate_at(t);
  cplx zz = z.value();
  auto [w1, w2] = incidence(x, z);
  double mu = 1.0 / p.lam, mud = -r.lam / (p.lam * p.lam);
  cplx A3 = p.alpha - zz * std::conj(p.beta) - w1;
  cplx A4 = p.beta + zz * std::conj(p.alpha) - w2;
  cplx A3d = r.alpha - zz * std::conj(r.beta);
  cplx A4d = r.beta + zz * std::conj(r.alpha);
  cplx c1 = mud * A4 + mu * A4d, c2 = -(mud * A3 + mu * A3d);
  cplx r1 = mu * A3, r2 = mu * A4;
  return mat2(c1 * r1, c1 * r2, c2 * r1, c2 * r2) / zz;
}

// ---------------------------------------------------------------- general k

Mat2 family_gdot(const ADHMFamily& fam, double t, const R4Point& x, const SpectralPoint& z) {
  double h = fam.fd_step;
  if (fam.is_frame_map() || (fam.params && !fam.data))
    return (fam.field_at(t + h)(x, z) - fam.field_at(t - h)(x, z)) / (2 * h);
  return (patching_matrix(fam.data_at(t + h), x, z).G - patching_matrix(fam.data_at(t - h), x, z).G) / (2 * h);
}

namespace {

struct BasisDerivs {
  LineBasis b;
  PatchingResult pr;
  CVec fdot[2], edot[2];
};

BasisDerivs basis_derivs(const ADHMFamily& fam, double t, const R4Point& x, const SpectralPoint& z) {
  double h = fam.fd_step;
  ADHMData d0 = fam.data_at(t), dp = fam.data_at(t + h), dm = fam.data_at(t - h);
  BasisDerivs r;
  r.b = line_basis(d0, x, z);
  r.pr = patching_matrix(d0, x, z);
  LineBasis bp = line_basis(dp, x, z), bm = line_basis(dm, x, z);
  r.fdot[0] = (bp.f1 - bm.f1) / (2 * h);
  r.fdot[1] = (bp.f2 - bm.f2) / (2 * h);
  r.edot[0] = (bp.e1 - bm.e1) / (2 * h);
  r.edot[1] = (bp.e2 - bm.e2) / (2 * h);
  return r;
}

// d_A^1 = (fdot_A, f2) + u_Ai lambda_2^i, d_A^2 = -[(fdot_A, f1) + u_Ai lambda_1^i], u_Ai = (v_i, fdot_A)
Mat2 d_from_f(const ADHMData& dat, const BasisDerivs& bd, CMat* u_out) {
  const int k = dat.k;
  Mat2 d;
  CMat u(2, k);
  for (int A = 0; A < 2; ++A) {
    cplx s1 = 0, s2 = 0;
    for (int i = 0; i < k; ++i) {
      u(A, i) = dat.form(bd.b.v.col(i), bd.fdot[A]);
      s1 += u(A, i) * bd.pr.lambdaAi(0, i);
      s2 += u(A, i) * bd.pr.lambdaAi(1, i);
    }
    d(A, 0) = dat.form(bd.fdot[A], bd.b.f2) + s2;
    d(A, 1) = -(dat.form(bd.fdot[A], bd.b.f1) + s1);
  }
  if (u_out) *u_out = u;
  return d;
}

}  // namespace

DGeneral d_general(const ADHMFamily& fam, double t, const R4Point& x, const SpectralPoint& z, bool check_gdot) {
  if (fam.is_frame_map()) throw Error(ErrorCode::BadInput, "frame-map families carry no ADHM data");
  ADHMData dat = fam.data_at(t);
  const int k = dat.k;
  BasisDerivs bd = basis_derivs(fam, t, x, z);
  SpectralPoint zs = sigma_cp1(z);
  BasisDerivs bs = basis_derivs(fam, t, x, zs);

  DGeneral out;
  CMat u;
  out.d = d_from_f(dat, bd, &u);

  // second route from e-derivatives at sigma(z): s_Ai = (v_i, edot_A), (edot_A, e_B) = c_A^C eps_CB.
  // The line point at sigma(z) is a rescaling of sigma applied to the line point at z;
  // conj of that scale multiplies u.
  auto p = line_point(x, z), ps = line_point(x, zs);
  auto sp = sigma_c4(p);
  int ref = std::abs(ps[0]) > std::abs(ps[1]) ? 0 : 1;
  cplx kappa = std::conj(sp[ref] / ps[ref]);
  CMat s(2, k);
  Mat2 c;
  for (int A = 0; A < 2; ++A) {
    for (int i = 0; i < k; ++i) s(A, i) = dat.form(bs.b.v.col(i), bs.edot[A]);
    // (edot_A, e_1) = -c_A^2, (edot_A, e_2) = c_A^1 with eps_12 = 1
    c(A, 0) = dat.form(bs.edot[A], bs.b.e2);
    c(A, 1) = -dat.form(bs.edot[A], bs.b.e1);
  }
  CMat u2(2, k);
  for (int i = 0; i < k; ++i) {
    u2(0, i) = kappa * std::conj(s(1, i));
    u2(1, i) = -kappa * std::conj(s(0, i));
  }
  // d = u_i (x) lambda^i + eps conj(c) eps^T, lambda^1 = lambda_2, lambda^2 = -lambda_1
  Mat2 eps;
  eps << 0, 1, -1, 0;
  Mat2 dc = eps * c.conjugate() * eps.transpose();
  for (int A = 0; A < 2; ++A) {
    cplx a1 = 0, a2 = 0;
    for (int i = 0; i < k; ++i) {
      a1 += u2(A, i) * bd.pr.lambdaAi(1, i);
      a2 -= u2(A, i) * bd.pr.lambdaAi(0, i);
    }
    out.d_from_e(A, 0) = a1 + dc(A, 0);
    out.d_from_e(A, 1) = a2 + dc(A, 1);
  }

  out.params.s = s;
  out.params.u = u;
  out.params.c = c;
  out.params.lam = bd.pr.lambdaAi;
  out.params.u_consistency = maxabs(CMat(u - u2));
  out.params.c_trace = std::abs(c.trace());

  if (check_gdot) {
    Mat2 ds = d_from_f(dat, bs, nullptr);
    Mat2 G = bd.pr.G;
    Mat2 Gdot = family_gdot(fam, t, x, z);
    out.gdot_residual = maxabs(Mat2(Gdot - (out.d * G + G * ds.adjoint())));
  }
  return out;
}

// ---------------------------------------------------------------- coefficients

Mat2 DeformationCoeffs::eval(const R4Point& x, const SpectralPoint& z) const {
  if (z.is_inf() || z.is_zero()) throw Error(ErrorCode::PoleAtChartBoundary, "basis has poles at z = 0, inf");
  cplx zz = z.value();
  auto [w1, w2] = incidence(x, z);
  Mat2 r = Mat2::Zero();
  for (int i = 0; i < 10; ++i)
    r += c[i] * std::pow(w1, kCoeffPQM[i][0]) * std::pow(w2, kCoeffPQM[i][1]) * std::pow(zz, kCoeffPQM[i][2]);
  return r;
}

DeformationCoeffs decompose_coeffs(const OneInstantonParams& p, const OneInstantonRate& r) {
  const double L = p.lam, Ld = r.lam, s = 1.0 / (L * L * L);
  const cplx a = p.alpha, b = p.beta, ac = std::conj(a), bc = std::conj(b);
  const cplx ad = r.alpha, bd = r.beta, adc = std::conj(ad), bdc = std::conj(bd);
  DeformationCoeffs c;
  c[0] = Ld * s * mat2(0, 0, 1, 0);
  c[1] = Ld * s * mat2(-1, 0, 0, 1);
  c[2] = Ld * s * mat2(0, -1, 0, 0);
  c[3] = s * mat2(-L * bd + b * Ld, 0, L * ad - 2.0 * a * Ld, -b * Ld);
  c[4] = s * mat2(-L * adc + ac * Ld, 0, -L * bdc + 2.0 * bc * Ld, -ac * Ld);
  c[5] = s * mat2(a * Ld, -L * bd + 2.0 * b * Ld, 0, L * ad - a * Ld);
  c[6] = s * mat2(-bc * Ld, -L * adc + 2.0 * ac * Ld, 0, -L * bdc + bc * Ld);
  c[7] = s * mat2(a * (L * bd - b * Ld), b * (L * bd - b * Ld), a * (-L * ad + a * Ld), b * (-L * ad + a * Ld));
  c[8] = s * mat2(a * L * adc - bc * L * bd - a * ac * Ld + b * bc * Ld, b * L * adc + ac * L * bd - 2.0 * ac * b * Ld,
                  bc * L * ad + a * L * bdc - 2.0 * a * bc * Ld, ac * (-L * ad + a * Ld) + b * (L * bdc - bc * Ld));
  c[9] = s * mat2(bc * (-L * adc + ac * Ld), ac * (L * adc - ac * Ld), bc * (-L * bdc + bc * Ld), ac * (L * bdc - bc * Ld));
  return c;
}

DeformationCoeffs decompose_coeffs(const ADHMFamily& fam, double t) {
  if (!fam.is_k1() || fam.is_frame_map()) throw Error(ErrorCode::BadInput, "closed-form coefficients need a k = 1 ADHM family");
  return decompose_coeffs(fam.params(t), fam.rate_at(t));
}

namespace {

// polynomials in (w1, w2, z) with integer z powers
using Mono = std::array<int, 3>;
using Poly = std::map<Mono, cplx>;

Poly mul(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) r[{ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]}] += ca * cb;
  return r;
}

}  // namespace

DeformationCoeffs expand_coeffs(const OneInstantonParams& p, const OneInstantonRate& r) {
  double mu = 1.0 / p.lam, mud = -r.lam / (p.lam * p.lam);
  // A3 = alpha - z conj(beta) - w1, A4 = beta + z conj(alpha) - w2
  Poly A3{{{0, 0, 0}, p.alpha}, {{0, 0, 1}, -std::conj(p.beta)}, {{1, 0, 0}, -1.0}};
  Poly A4{{{0, 0, 0}, p.beta}, {{0, 0, 1}, std::conj(p.alpha)}, {{0, 1, 0}, -1.0}};
  Poly A3d{{{0, 0, 0}, r.alpha}, {{0, 0, 1}, -std::conj(r.beta)}};
  Poly A4d{{{0, 0, 0}, r.beta}, {{0, 0, 1}, std::conj(r.alpha)}};
  auto lin = [](cplx x, const Poly& P, cplx y, const Poly& Q) {
    Poly out;
    for (const auto& [m, c] : P) out[m] += x * c;
    for (const auto& [m, c] : Q) out[m] += y * c;
    return out;
  };
  Poly col[2] = {lin(mud, A4, mu, A4d), lin(-mud, A3, -mu, A3d)};
  Poly row[2] = {lin(mu, A3, 0.0, {}), lin(mu, A4, 0.0, {})};
  Poly zinv{{{0, 0, -1}, 1.0}};
  DeformationCoeffs c;
  for (auto& m : c.c) m.setZero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Poly e = mul(mul(col[i], row[j]), zinv);
      for (const auto& [mono, v] : e) {
        if (v == cplx(0.0)) continue;
        int slot = -1;
        for (int b = 0; b < 10; ++b)
          if (kCoeffPQM[b][0] == mono[0] && kCoeffPQM[b][1] == mono[1] && kCoeffPQM[b][2] == mono[2]) slot = b;
        if (slot < 0) throw Error(ErrorCode::FitResidualTooLarge, "outer product left the ten-function basis");
        c[slot](i, j) += v;
      }
    }
  return c;
}

CoeffFit fit_coeffs(const std::function<Mat2(const R4Point&, const SpectralPoint&)>& d, int n_samples, unsigned seed,
                    double fit_tol) {
  if (n_samples < 40) throw Error(ErrorCode::BadInput, "coefficient fit needs at least 40 samples");
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> U(-1, 1), Ph(0, 2 * M_PI), R(0.85, 1.15);
  CMat B(n_samples, 10);
  std::vector<Mat2> vals(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    R4Point x{1.5 * U(g), 1.5 * U(g), 1.5 * U(g), 1.5 * U(g)};
    cplx z = std::polar(R(g), Ph(g));
    auto [w1, w2] = incidence(x, SpectralPoint(z));
    for (int b = 0; b < 10; ++b)
      B(s, b) = std::pow(w1, kCoeffPQM[b][0]) * std::pow(w2, kCoeffPQM[b][1]) * std::pow(z, kCoeffPQM[b][2]);
    vals[s] = d(x, SpectralPoint(z));
  }
  Eigen::ColPivHouseholderQR<CMat> qr(B);
  CoeffFit out;
  out.conditioning = std::abs(qr.matrixQR()(9, 9)) / std::abs(qr.matrixQR()(0, 0));
  if (out.conditioning < 1e-6) throw Error(ErrorCode::FitResidualTooLarge, "basis samples ill-conditioned");
  for (int e = 0; e < 4; ++e) {
    CVec rhs(n_samples);
    for (int s = 0; s < n_samples; ++s) rhs(s) = vals[s](e / 2, e % 2);
    CVec sol = qr.solve(rhs);
    for (int b = 0; b < 10; ++b) out.coeffs[b](e / 2, e % 2) = sol(b);
    out.residual = std::max(out.residual, (B * sol - rhs).cwiseAbs().maxCoeff());
  }
  if (out.residual > fit_tol)
    throw Error(ErrorCode::FitResidualTooLarge, "d is not in the span of the ten basis functions (misfit " +
                                                    std::to_string(out.residual) + ")");
  return out;
}

DeformationCoeffs absorb_holomorphic(const DeformationCoeffs& c) {
  DeformationCoeffs r;
  for (auto& m : r.c) m.setZero();
  for (int i : kSingularAtInf) r[i] = c[i];
  return r;
}

DeformationCoeffs family_coeffs(const ADHMFamily& fam, double t, const ClassifyOptions& opt) {
  if (fam.is_frame_map()) {
    auto f = [&](const R4Point& x, const SpectralPoint& z) { return fam.frame_d(t, x, z); };
    return fit_coeffs(f, opt.fit_samples).coeffs;
  }
  return decompose_coeffs(fam, t);
}

Verdict classify_flow(const ADHMFamily& fam, const std::vector<double>& t_samples, const ClassifyOptions& opt) {
  if (t_samples.size() < 3) throw Error(ErrorCode::BadInput, "classification needs at least three t samples");
  std::vector<DeformationCoeffs> cs;
  for (double t : t_samples) cs.push_back(absorb_holomorphic(family_coeffs(fam, t, opt)));
  double worst = 0;
  int which = -1;
  for (int i : kSingularAtInf) {
    double var = 0;
    for (size_t s = 1; s < cs.size(); ++s) var = std::max(var, maxabs(Mat2(cs[s][i] - cs[0][i])));
    if (var > worst) {
      worst = var;
      which = i;
    }
  }
  if (worst > opt.tol) return NotInduced{kCoeffNames[which], worst};
  // constant retained part: the scaling coefficient A = (lambda'/lambda^3) (0 0; 1 0)
  return Scaling{2.0 * cs[0][0](1, 0).real()};
}

std::string verdict_string(const Verdict& v) {
  std::ostringstream os;
  if (auto s = std::get_if<Scaling>(&v))
    os << "Scaling{" << s->flow_k << "}";
  else {
    auto& n = std::get<NotInduced>(v);
    os << "NotInduced{" << n.witness << "}";
  }
  return os.str();
}

TwistorPoly coeffs_to_poly(const DeformationCoeffs& c) {
  TwistorPoly T;
  for (int i = 0; i < 10; ++i)
    if (maxabs(c[i]) > 0) T.terms.push_back({kCoeffPQM[i][0], kCoeffPQM[i][1], kCoeffPQM[i][2], c[i]});
  return T;
}

TwistorPoly tangent_generator(const ADHMFamily& fam) { return coeffs_to_poly(family_coeffs(fam, 0.0)).scaled(-1.0); }

DeformField flow_generator(const ADHMFamily& fam) {
  if (fam.is_frame_map()) {
    ADHMFamily f = fam;
    return [f](double t, const R4Point& x, const SpectralPoint& z) -> Mat2 {
      double h = f.fd_step;
      Mat2 ad = (f.frame(t + h, x, z) - f.frame(t - h, x, z)) / (2 * h);
      return ad * inv2(f.frame(t, x, z));
    };
  }
  ADHMFamily f = fam;
  if (fam.params && !fam.data)
    return [f](double t, const R4Point& x, const SpectralPoint& z) { return d_param_k1(f, t, x, z); };
  return [f](double t, const R4Point& x, const SpectralPoint& z) { return d_general(f, t, x, z, false).d; };
}

}  // namespace sdym
