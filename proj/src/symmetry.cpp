#include "sdym/symmetry.hpp"

#include <cmath>

namespace sdym {

bool TwistorPoly::empty() const {
  for (const auto& t : terms)
    if (maxabs(t.coeff) != 0) return false;
  return true;
}

TwistorPoly TwistorPoly::scaled(cplx s) const {
  TwistorPoly r = *this;
  for (auto& t : r.terms) t.coeff *= s;
  return r;
}

TwistorPoly TwistorPoly::operator+(const TwistorPoly& o) const {
  TwistorPoly r = *this;
  r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
  return r;
}

bool TwistorPoly::traceless(double tol) const {
  for (const auto& t : terms)
    if (std::abs(t.coeff.trace()) > tol * std::max(1.0, maxabs(t.coeff))) return false;
  return true;
}

Mat2 eval_T(const TwistorPoly& T, const R4Point& x, const SpectralPoint& z) {
  Mat2 r = Mat2::Zero();
  if (z.is_inf()) {
    // second chart: w1/z -> -conj v, w2/z -> conj u, so a term behaves like z^(p+q+m)
    auto c = incidence_inf_chart(x, z);
    for (const auto& t : T.terms) {
      int deg = t.p + t.q + t.m;
      if (deg > 0) {
        if (maxabs(t.coeff) == 0) continue;
        throw Error(ErrorCode::PoleOutsideAnnulus, "T has a pole at z = inf");
      }
      if (deg == 0) r += t.coeff * std::pow(c[0], t.p) * std::pow(c[1], t.q);
    }
    return r;
  }
  cplx zv = z.value();
  auto [w1, w2] = incidence(x, z);
  for (const auto& t : T.terms) {
    if (t.m < 0 && zv == cplx(0.0)) {
      if (maxabs(t.coeff) == 0) continue;
      throw Error(ErrorCode::PoleOutsideAnnulus, "T has a pole at z = 0");
    }
    r += t.coeff * std::pow(w1, t.p) * std::pow(w2, t.q) * std::pow(zv, t.m);
  }
  return r;
}

Mat2 eval_T_star(const TwistorPoly& T, const R4Point& x, const SpectralPoint& z) {
  return eval_T(T, x, sigma_cp1(z)).adjoint();
}

Mat2 g_flow_infinitesimal(const TwistorPoly& T, const Mat2& G, const R4Point& x, const SpectralPoint& z) {
  return -eval_T(T, x, z) * G - G * eval_T_star(T, x, z);
}

Mat2 expm2(const Mat2& M) {
  cplx half = 0.5 * M.trace();
  Mat2 N = M - half * Mat2::Identity();
  cplx s2 = -N.determinant();
  cplx s = std::sqrt(s2);
  cplx ch, sh;  // cosh s, sinh(s)/s
  if (std::abs(s) < 1e-4) {
    ch = 1.0 + s2 / 2.0 + s2 * s2 / 24.0;
    sh = 1.0 + s2 / 6.0 + s2 * s2 / 120.0;
  } else {
    ch = std::cosh(s);
    sh = std::sinh(s) / s;
  }
  return std::exp(half) * (ch * Mat2::Identity() + sh * N);
}

PatchingField g_flow_exp(const MatField& g, const PatchingField& G) {
  MatField gs = star_fn(g);
  PatchingField out;
  out.provenance = G.provenance + "+g-action";
  out.eval = [g, gs, G](const R4Point& x, const SpectralPoint& z) -> Mat2 { return g(x, z) * G(x, z) * gs(x, z); };
  return out;
}

PatchingField g_flow_exp(const TwistorPoly& T, double t, const PatchingField& G) {
  MatField g = [T, t](const R4Point& x, const SpectralPoint& z) -> Mat2 { return expm2(Mat2(-t * eval_T(T, x, z))); };
  return g_flow_exp(g, G);
}

JDot j_dot(const TwistorPoly& T, const SpectralPoint& spectral_lambda, const Splitting& s, const R4Point& x) {
  const auto& spec = s.psi0.spec();
  if (spectral_lambda.is_inf() || !spec.contains(spectral_lambda.value()))
    throw Error(ErrorCode::BadInput, "spectral parameter must lie in the annulus");
  cplx lam = spectral_lambda.value();
  cplx slam = sigma_cp1(spectral_lambda).value();
  Mat2 Tl = eval_T(T, x, spectral_lambda);
  Mat2 Td = Tl.adjoint();

  // psi form
  Mat2 Pinf = s.psiInf.eval(lam), P0 = s.psi0.eval(slam);
  Mat2 a = Pinf * Tl * inv2(Pinf);
  Mat2 ad = P0 * Td * inv2(P0);
  JDot r;
  r.value_psi = inv2(s.psiInf_atInf) * (a + ad) * s.psi0_at0;

  // chi form, through the normalised factors
  ChiPair chi = chi_functions(s);
  Mat2 J = j_function(s);
  Mat2 ci = chi.chiInf.eval(lam), c0 = chi.chi0.eval(slam);
  r.value = ci * Tl * inv2(ci) * J + J * c0 * Td * inv2(c0);
  r.form_gap = maxabs(Mat2(r.value - r.value_psi));
  return r;
}

JPair j_and_jdot(const TwistorPoly& T, const SpectralPoint& spectral_lambda, const PatchingField& field,
                 const GridSpec& grid, const SplitOptions& opt) {
  JPair out;
  out.J.grid = out.Jdot.grid = grid;
  out.J.data.resize(grid.size());
  out.Jdot.data.resize(grid.size());
  for (size_t idx = 0; idx < grid.size(); ++idx) {
    R4Point x = grid.point(grid.multi(idx));
    Splitting s = split_at(field, x, opt.annulus, opt.split);
    out.J.data[idx] = j_function(s);
    JDot jd = j_dot(T, spectral_lambda, s, x);
    out.Jdot.data[idx] = jd.value;
    out.max_form_gap = std::max(out.max_form_gap, jd.form_gap);
  }
  return out;
}

double linearisation_residual(const MatGrid& J, const MatGrid& Jdot) {
  const auto& grid = J.grid;
  grid.check();
  const size_t N = grid.size();
  if (Jdot.data.size() != N || J.data.size() != N) throw Error(ErrorCode::ShapeMismatch, "J and Jdot grids differ");
  std::vector<Mat2> K(N);
  for (size_t i = 0; i < N; ++i) K[i] = inv2(J.data[i]) * Jdot.data[i];
  std::vector<Mat2> Xub(N, Mat2::Zero()), Xvb(N, Mat2::Zero());
  for (size_t i = 0; i < N; ++i) {
    if (!grid.interior(grid.multi(i), 1)) continue;
    auto d = complex_derivs(central_gradient(K, i, grid));
    Mat2 iJ = inv2(J.data[i]);
    Xub[i] = J.data[i] * d.dub * iJ;
    Xvb[i] = J.data[i] * d.dvb * iJ;
  }
  double r = 0;
  for (size_t i = 0; i < N; ++i) {
    if (!grid.interior(grid.multi(i), 2)) continue;
    auto a = complex_derivs(central_gradient(Xub, i, grid));
    auto b = complex_derivs(central_gradient(Xvb, i, grid));
    r = std::max(r, maxabs(Mat2(a.du + b.dv)));
  }
  return r;
}

namespace {

Mat2 rk4(const DeformField& d, const R4Point& x, const SpectralPoint& z, double t_end, int n) {
  Mat2 a = Mat2::Identity();
  double h = t_end / n;
  for (int i = 0; i < n; ++i) {
    double t = i * h;
    Mat2 k1 = d(t, x, z) * a;
    Mat2 k2 = d(t + h / 2, x, z) * (a + h / 2 * k1);
    Mat2 k3 = d(t + h / 2, x, z) * (a + h / 2 * k2);
    Mat2 k4 = d(t + h, x, z) * (a + h * k3);
    a += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return a;
}

}  // namespace

FlowState::Alpha FlowState::alpha(const R4Point& x, const SpectralPoint& z) const {
  if (t == 0) return {Mat2::Identity(), 0.0, 0};
  int n = std::max(1, opt.steps);
  Mat2 a = rk4(d, x, z, t, n);
  while (true) {
    Mat2 a2 = rk4(d, x, z, t, 2 * n);
    double err = maxabs(Mat2(a2 - a)) / 15.0;
    if (err <= opt.tol * std::max(1.0, maxabs(a2))) return {a2, err, 2 * n};
    n *= 2;
    if (2 * n > opt.max_steps)
      throw Error(ErrorCode::StepFailure, "RK4 error estimate " + std::to_string(err) + " above tolerance at the step floor");
    a = a2;
  }
}

LoopMatrix FlowState::alpha_loop(const R4Point& x, const AnnulusSpec& spec) const {
  return sample_loop([&](cplx z) { return alpha(x, SpectralPoint(z)).value; }, spec);
}

Mat2 FlowState::G(const R4Point& x, const SpectralPoint& z) const {
  Mat2 a = alpha(x, z).value;
  Mat2 as = alpha(x, sigma_cp1(z)).value.adjoint();
  return a * G0(x, z) * as;
}

PatchingField FlowState::field() const {
  FlowState self = *this;
  PatchingField f;
  f.provenance = G0.provenance + "+flow";
  f.eval = [self](const R4Point& x, const SpectralPoint& z) { return self.G(x, z); };
  return f;
}

FlowState integrate_flow(const DeformField& d, const PatchingField& G0, double t_end, const FlowOptions& opt) {
  FlowState s;
  s.t = t_end;
  s.d = d;
  s.G0 = G0;
  s.opt = opt;
  return s;
}

double lambda_from_half_radius(double r_half) { return r_half / std::sqrt(std::pow(2.0, 0.25) - 1.0); }

ScaleMeasurement measure_scale(const PatchingField& field, const R4Point& centre, double r_max,
                               const DensityOptions& opt) {
  ScaleMeasurement m;
  auto rho = [&](double r) {
    ++m.evaluations;
    return action_density(field, centre.shifted(0, r), opt);
  };
  m.rho0 = rho(0.0);
  double lo = 0, hi = r_max;
  if (rho(hi) > 0.5 * m.rho0) throw Error(ErrorCode::BadInput, "density does not halve within r_max");
  while (hi - lo > 1e-5 * r_max) {
    double mid = 0.5 * (lo + hi);
    (rho(mid) > 0.5 * m.rho0 ? lo : hi) = mid;
  }
  m.r_half = 0.5 * (lo + hi);
  m.lambda_eff = lambda_from_half_radius(m.r_half);
  return m;
}

}  // namespace sdym
