#include "sdym/symmetry.hpp"

#include <numbers>

namespace sdym {

namespace {

// keep modes m >= 0 (nonneg = true) or m < 0
std::vector<Mat2> project(const std::vector<Mat2>& samples, bool nonneg) {
  int n = int(samples.size());
  auto modes = dft_modes(samples);
  for (int k = 0; k < n; ++k) {
    int m = k <= n / 2 ? k : k - n;
    bool keep = nonneg ? m >= 0 : m < 0;
    if (!keep || std::abs(m) >= n / 2) modes[k].setZero();
  }
  return idft_samples(modes);
}

struct SplitData {
  Splitting s;
  ChiPair chi;
};

SplitData split_field(const PatchingField& f, const R4Point& x, const AnnulusSpec& spec, const SplitConfig& cfg) {
  SplitData d{split_at(f, x, spec, cfg), {}};
  d.chi = chi_functions(d.s);
  return d;
}

// alpha(lambda) = Psi_inf T Psi_inf^-1 at lambda, and its dagger
std::pair<Mat2, Mat2> alpha_pair(const TwistorPoly& T, const SpectralPoint& lam, const Splitting& s, const R4Point& x) {
  cplx l = lam.value(), sl = sigma_cp1(lam).value();
  Mat2 Tl = eval_T(T, x, lam);
  Mat2 Pi = s.psiInf.eval(l), P0 = s.psi0.eval(sl);
  return {Pi * Tl * inv2(Pi), P0 * Tl.adjoint() * inv2(P0)};
}

}  // namespace

H0Report h0_verify(const TwistorPoly& T, const SpectralPoint& spectral_lambda, const PatchingField& field,
                            const R4Point& x, const H0Options& opt) {
  const AnnulusSpec& spec = opt.annulus;
  if (spectral_lambda.is_inf() || !spec.contains(spectral_lambda.value()))
    throw Error(ErrorCode::BadInput, "spectral parameter must lie in the annulus");
  const int n = spec.n_samples;
  const double ds = opt.t_step;
  const cplx lam = spectral_lambda.value(), lbar = std::conj(lam);

  SplitData base = split_field(field, x, spec, opt.split);
  SplitData plus = split_field(g_flow_exp(T, ds, field), x, spec, opt.split);
  SplitData minus = split_field(g_flow_exp(T, -ds, field), x, spec, opt.split);
  auto [a, ad] = alpha_pair(T, spectral_lambda, base.s, x);

  // h0 on the unit circle from the rearranged Psi_0 equation
  std::vector<Mat2> h0(n);
  for (int j = 0; j < n; ++j) {
    cplx z = spec.sample(j);
    SpectralPoint zp(z);
    Mat2 c0 = base.chi.chi0.sample(j);
    Mat2 cdot = (plus.chi.chi0.sample(j) - minus.chi.chi0.sample(j)) / (2 * ds);
    Mat2 P = base.s.psi0.sample(j), iP = inv2(P);
    Mat2 G = field(x, zp);
    Mat2 GTG = inv2(G) * eval_T(T, x, zp) * G;  // Psi_0^-1 alpha(z) Psi_0
    Mat2 Ts = eval_T_star(T, x, zp);          // Psi_0^-1 alpha(sigma z)^dagger Psi_0
    h0[j] = inv2(c0) * cdot - z / (lam - z) * (iP * a * P - GTG) + z * lbar / (1.0 + z * lbar) * (iP * ad * P - Ts);
  }
  LoopMatrix h0loop = LoopMatrix::from_samples(spec, h0);

  H0Report rep;
  rep.t_step = ds;
  rep.eps_contour = spec.epsilon / 2;
  rep.tail = h0loop.tail();

  // Q = h0 + z lbar/(1 + z lbar) T* - z/(lam - z) G^-1 T G must be analytic inside the inner contour
  double r = 1.0 / (1.0 + rep.eps_contour);
  if (std::abs(sigma_cp1(spectral_lambda).value()) <= r || std::abs(lam) <= r)
    throw Error(ErrorCode::BadInput, "spectral parameter or its reflection lies inside the inner contour");
  const int nq = std::max(n, opt.contour_samples);
  std::vector<Mat2> Q(nq);
  for (int j = 0; j < nq; ++j) {
    cplx z = std::polar(r, 2 * std::numbers::pi * j / nq);
    SpectralPoint zp(z);
    Mat2 G = field(x, zp);
    Q[j] = h0loop.eval(z) + z * lbar / (1.0 + z * lbar) * eval_T_star(T, x, zp) - z / (lam - z) * inv2(G) * eval_T(T, x, zp) * G;
  }
  auto qneg = project(Q, false);
  for (const auto& m : qneg) rep.residual = std::max(rep.residual, maxabs(m));
  if (rep.tail > opt.tail_tol)
    throw Error(ErrorCode::QuadratureTail, "h0 modes not resolved (tail " + std::to_string(rep.tail) + ")");
  rep.pass = rep.residual < opt.tol;
  return rep;
}

namespace {

// residual of the best fit D ~ rho_inf G + G rho_0, rho_inf modes -K..0, rho_0 modes 0..K
std::pair<double, double> fit_rho(const std::vector<Mat2>& D, const std::vector<Mat2>& G, const AnnulusSpec& spec,
                                  int K) {
  const int n = int(D.size());
  const int nf = 2 * (K + 1);  // mode functions
  CMat A = CMat::Zero(4 * n, 4 * nf);
  CVec b(4 * n);
  for (int j = 0; j < n; ++j) {
    cplx z = spec.sample(j);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) b(4 * j + 2 * r + c) = D[j](r, c);
    for (int f = 0; f < nf; ++f) {
      bool inf = f <= K;
      int m = inf ? -f : f - (K + 1);
      cplx zm = std::pow(z, m);
      for (int e = 0; e < 4; ++e) {
        Mat2 E = Mat2::Zero();
        E(e / 2, e % 2) = zm;
        Mat2 t = inf ? Mat2(E * G[j]) : Mat2(G[j] * E);
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) A(4 * j + 2 * r + c, 4 * f + e) = t(r, c);
      }
    }
  }
  Eigen::ColPivHouseholderQR<CMat> qr(A);
  CVec sol = qr.solve(b);
  CVec res = A * sol - b;
  return {res.cwiseAbs().maxCoeff(), sol.cwiseAbs().maxCoeff()};
}

// Gdot induced by the J-symmetry: Psi_inf^-1 [X0 - Xinf] Psi_0 with the pole parts distributed by mode projection
std::vector<Mat2> jflow_gdot(const TwistorPoly& T, const SpectralPoint& lamp, const Splitting& s, const R4Point& x,
                             const AnnulusSpec& spec) {
  const int n = spec.n_samples;
  const cplx lam = lamp.value(), lbar = std::conj(lam);
  auto [a, ad] = alpha_pair(T, lamp, s, x);
  std::vector<Mat2> R(n), Rinf(n);
  for (int j = 0; j < n; ++j) {
    cplx z = spec.sample(j);
    SpectralPoint zp(z);
    Mat2 Pi = s.psiInf.sample(j), P0 = s.psi0.sample(j);
    Mat2 az = Pi * eval_T(T, x, zp) * inv2(Pi);
    Mat2 asz = P0 * eval_T_star(T, x, zp) * inv2(P0);
    R[j] = z / (lam - z) * (a - az) - z * lbar / (1.0 + z * lbar) * (ad - asz);
    Rinf[j] = lam / (lam - z) * (a - az) + 1.0 / (1.0 + z * lbar) * (ad - asz);
  }
  auto Rp = project(R, true);
  auto Rm = project(Rinf, false);
  std::vector<Mat2> Gdot(n);
  for (int j = 0; j < n; ++j) {
    Mat2 X0 = a + ad + Rp[j];
    Gdot[j] = inv2(s.psiInf.sample(j)) * (X0 - Rm[j]) * s.psi0.sample(j);
  }
  return Gdot;
}

}  // namespace

GdotReport gdot_consistency(const TwistorPoly& T, const PatchingField& field, const R4Point& x, GdotRoute route,
                            const GdotOptions& opt) {
  const AnnulusSpec& spec = opt.annulus;
  const int n = spec.n_samples;
  std::vector<Mat2> G(n), D(n);
  for (int j = 0; j < n; ++j) G[j] = field(x, SpectralPoint(spec.sample(j)));

  if (route == GdotRoute::ExpFlow) {
    auto fp = g_flow_exp(T, opt.t_step, field), fm = g_flow_exp(T, -opt.t_step, field);
    for (int j = 0; j < n; ++j) {
      SpectralPoint zp(spec.sample(j));
      Mat2 Gdot = (fp(x, zp) - fm(x, zp)) / (2 * opt.t_step);
      D[j] = Gdot - g_flow_infinitesimal(T, G[j], x, zp);
    }
  } else {
    Splitting s = split_at(field, x, spec, opt.split);
    auto Gd = jflow_gdot(T, opt.spectral_lambda, s, x, spec);
    if (route == GdotRoute::JFlow) {
      for (int j = 0; j < n; ++j) D[j] = Gd[j] - g_flow_infinitesimal(T, G[j], x, SpectralPoint(spec.sample(j)));
    } else {
      auto Gd2 = jflow_gdot(T, opt.spectral_lambda2, s, x, spec);
      for (int j = 0; j < n; ++j) D[j] = Gd[j] - Gd2[j];
    }
  }

  GdotReport rep;
  rep.route = route;
  for (const auto& m : D) rep.raw = std::max(rep.raw, maxabs(m));
  auto [res, rho] = fit_rho(D, G, spec, opt.rho_modes);
  rep.residual = res;
  rep.rho_norm = rho;
  rep.pass = rep.residual < opt.tol;
  return rep;
}

}  // namespace sdym
