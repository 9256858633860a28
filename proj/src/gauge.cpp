#include "sdym/gauge.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace sdym {

using std::numbers::pi;

GridSpec GridSpec::cube(double lo, double hi, int n) {
  GridSpec g;
  for (auto& a : g.axes) a = {lo, hi, n};
  return g;
}

GridSpec GridSpec::around(const R4Point& c, double h, int n) {
  GridSpec g;
  double half = 0.5 * h * (n - 1);
  for (int i = 0; i < 4; ++i) g.axes[i] = {c[i] - half, c[i] + half, n};
  return g;
}

size_t GridSpec::size() const {
  size_t s = 1;
  for (const auto& a : axes) s *= size_t(a.n);
  return s;
}

size_t GridSpec::index(const std::array<int, 4>& i) const {
  return ((size_t(i[0]) * axes[1].n + i[1]) * axes[2].n + i[2]) * axes[3].n + i[3];
}

std::array<int, 4> GridSpec::multi(size_t idx) const {
  std::array<int, 4> i;
  for (int a = 3; a >= 0; --a) {
    i[a] = int(idx % axes[a].n);
    idx /= axes[a].n;
  }
  return i;
}

R4Point GridSpec::point(const std::array<int, 4>& i) const {
  return {axes[0].at(i[0]), axes[1].at(i[1]), axes[2].at(i[2]), axes[3].at(i[3])};
}

bool GridSpec::interior(const std::array<int, 4>& i, int margin) const {
  for (int a = 0; a < 4; ++a)
    if (i[a] < margin || i[a] >= axes[a].n - margin) return false;
  return true;
}

double GridSpec::spacing() const {
  double h = 0;
  for (const auto& a : axes) h = std::max(h, a.h());
  return h;
}

void GridSpec::check(int min_count) const {
  for (const auto& a : axes) {
    if (a.n < min_count) throw Error(ErrorCode::ShapeMismatch, "grid needs at least " + std::to_string(min_count) + " points per axis");
    if (!(a.hi > a.lo)) throw Error(ErrorCode::ShapeMismatch, "grid axis has non-positive width");
  }
}

namespace {

Mat2 tracefree(const Mat2& m) { return m - 0.5 * m.trace() * Mat2::Identity(); }

Mat2 comm(const Mat2& a, const Mat2& b) { return a * b - b * a; }

struct Strides {
  std::array<size_t, 4> s;
  explicit Strides(const GridSpec& g) {
    s[3] = 1;
    for (int a = 2; a >= 0; --a) s[a] = s[a + 1] * g.axes[a + 1].n;
  }
};

// second-order central differences along the four real axes
std::array<Mat2, 4> lattice_grad(const std::vector<Mat2>& f, size_t idx, const GridSpec& g, const Strides& st) {
  std::array<Mat2, 4> d;
  for (int a = 0; a < 4; ++a) d[a] = (f[idx + st.s[a]] - f[idx - st.s[a]]) / (2 * g.axes[a].h());
  return d;
}

// value, gradient and hessian in the real coordinates
struct Jet {
  Mat2 f;
  std::array<Mat2, 4> d;
  std::array<std::array<Mat2, 4>, 4> H;
};

// fourth-order central stencils (offsets -2..2) for the gradient and hessian
Jet lattice_jet(const std::vector<Mat2>& f, size_t idx, const GridSpec& g, const Strides& st) {
  static const double w1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  static const double w2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  auto at = [&](int a, int ka, int b, int kb) {
    return f[size_t(std::ptrdiff_t(idx) + std::ptrdiff_t(st.s[a]) * ka + std::ptrdiff_t(st.s[b]) * kb)];
  };
  Jet j;
  j.f = f[idx];
  for (int a = 0; a < 4; ++a) {
    double ha = g.axes[a].h();
    Mat2 d = Mat2::Zero(), dd = Mat2::Zero();
    for (int k = -2; k <= 2; ++k) {
      if (w1[k + 2] != 0.0) d += w1[k + 2] * at(a, k, a, 0);
      dd += w2[k + 2] * at(a, k, a, 0);
    }
    j.d[a] = d / ha;
    j.H[a][a] = dd / (ha * ha);
    for (int b = a + 1; b < 4; ++b) {
      Mat2 m = Mat2::Zero();
      for (int ka = -2; ka <= 2; ++ka)
        for (int kb = -2; kb <= 2; ++kb)
          if (w1[ka + 2] != 0.0 && w1[kb + 2] != 0.0) m += w1[ka + 2] * w1[kb + 2] * at(a, ka, b, kb);
      j.H[a][b] = m / (ha * g.axes[b].h());
      j.H[b][a] = j.H[a][b];
    }
  }
  return j;
}

// d_a = sum_mu k[a][mu] d_mu in the order u, v, ub, vb
const cplx kc[4][4] = {{0.5, -0.5 * I1, 0.0, 0.0}, {0.0, 0.0, 0.5, 0.5 * I1}, {0.5, 0.5 * I1, 0.0, 0.0}, {0.0, 0.0, 0.5, -0.5 * I1}};

// A_a = -(d_a psi) psi^-1 with psi_inf for u, v and psi_0 for ub, vb; F_ab expanded in psi-derivatives
std::pair<std::array<Mat2, 4>, std::array<Mat2, 6>> connection_and_curvature(const Jet& j0, const Jet& jinf) {
  std::array<const Jet*, 4> src{&jinf, &jinf, &j0, &j0};
  std::array<Mat2, 4> inv{inv2(jinf.f), inv2(jinf.f), inv2(j0.f), inv2(j0.f)};
  auto D = [&](int a, int c) {  // d_a of the field that defines A_c
    Mat2 s = Mat2::Zero();
    for (int mu = 0; mu < 4; ++mu)
      if (kc[a][mu] != 0.0) s += kc[a][mu] * src[c]->d[mu];
    return s;
  };
  auto DD = [&](int a, int b, int c) {
    Mat2 s = Mat2::Zero();
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu)
        if (kc[a][mu] != 0.0 && kc[b][nu] != 0.0) s += kc[a][mu] * kc[b][nu] * src[c]->H[mu][nu];
    return s;
  };
  std::array<Mat2, 4> A;
  for (int c = 0; c < 4; ++c) A[c] = -D(c, c) * inv[c];
  // dA[b][c] = d_b A_c
  auto dA = [&](int b, int c) -> Mat2 { return -DD(b, c, c) * inv[c] + D(c, c) * inv[c] * D(b, c) * inv[c]; };
  auto Fab = [&](int a, int b) -> Mat2 { return tracefree(dA(a, b) - dA(b, a) + comm(A[a], A[b])); };
  std::array<Mat2, 6> F;
  F[F_uv] = Fab(0, 1);
  F[F_uub] = Fab(0, 2);
  F[F_uvb] = Fab(0, 3);
  F[F_vub] = Fab(1, 2);
  F[F_vvb] = Fab(1, 3);
  F[F_ubvb] = Fab(2, 3);
  for (auto& a : A) a = tracefree(a);
  return {A, F};
}

// the six complex components from derivatives of (Au, Av, Aub, Avb)
std::array<Mat2, 6> assemble_F(const std::array<Mat2, 4>& A, const std::array<ComplexDerivs, 4>& dA) {
  const Mat2 &Au = A[0], &Av = A[1], &Aub = A[2], &Avb = A[3];
  std::array<Mat2, 6> F;
  F[F_uv] = dA[1].du - dA[0].dv + comm(Au, Av);
  F[F_uub] = dA[2].du - dA[0].dub + comm(Au, Aub);
  F[F_uvb] = dA[3].du - dA[0].dvb + comm(Au, Avb);
  F[F_vub] = dA[2].dv - dA[1].dub + comm(Av, Aub);
  F[F_vvb] = dA[3].dv - dA[1].dvb + comm(Av, Avb);
  F[F_ubvb] = dA[3].dub - dA[2].dvb + comm(Aub, Avb);
  for (auto& f : F) f = tracefree(f);
  return F;
}

std::array<Mat2, 4> connection_from(const Mat2& p0, const Mat2& pinf, const ComplexDerivs& d0, const ComplexDerivs& dinf) {
  Mat2 i0 = inv2(p0), iinf = inv2(pinf);
  return {tracefree(-dinf.du * iinf), tracefree(-dinf.dv * iinf), tracefree(-d0.dub * i0), tracefree(-d0.dvb * i0)};
}

}  // namespace

MatGrid GaugeGrid::J() const {
  MatGrid m{grid, std::vector<Mat2>(psi0.size())};
  for (size_t i = 0; i < psi0.size(); ++i) m.data[i] = inv2(psiInf[i]) * psi0[i];
  return m;
}

GaugeGrid reconstruct_connection(const PatchingField& field, const GridSpec& grid, const SplitOptions& opt) {
  grid.check();
  GaugeGrid g;
  g.grid = grid;
  const size_t N = grid.size();
  g.psi0.resize(N);
  g.psiInf.resize(N);
  for (size_t idx = 0; idx < N; ++idx) {
    R4Point x = grid.point(grid.multi(idx));
    Splitting s;
    try {
      s = split_at(field, x, opt.annulus, opt.split);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " at x = (" + std::to_string(x.x1) + ", " + std::to_string(x.x2) +
                                ", " + std::to_string(x.x3) + ", " + std::to_string(x.x4) + ")");
    }
    g.psi0[idx] = s.psi0_at0;
    g.psiInf[idx] = s.psiInf_atInf;
    g.max_split_residual = std::max(g.max_split_residual, s.recon_residual);
  }

  Strides st(grid);
  for (auto* v : {&g.Au, &g.Av, &g.Aub, &g.Avb}) v->assign(N, Mat2::Zero());
  std::array<Mat2, 6> zero;
  zero.fill(Mat2::Zero());
  g.F.assign(N, zero);
  for (size_t idx = 0; idx < N; ++idx) {
    if (!grid.interior(grid.multi(idx), 2)) continue;
    auto [A, F] = connection_and_curvature(lattice_jet(g.psi0, idx, grid, st), lattice_jet(g.psiInf, idx, grid, st));
    g.Au[idx] = A[0];
    g.Av[idx] = A[1];
    g.Aub[idx] = A[2];
    g.Avb[idx] = A[3];
    g.F[idx] = F;
  }
  return g;
}

SDResidual sd_residual(const GaugeGrid& g, double box) {
  SDResidual r;
  R4Point c;
  for (int a = 0; a < 4; ++a) c[a] = 0.5 * (g.grid.axes[a].lo + g.grid.axes[a].hi);
  for (size_t idx = 0; idx < g.F.size(); ++idx) {
    auto i = g.grid.multi(idx);
    if (!g.grid.interior(i, 2)) continue;
    if (box > 0) {
      R4Point x = g.grid.point(i);
      bool inside = true;
      for (int a = 0; a < 4; ++a) inside = inside && std::abs(x[a] - c[a]) <= box + 1e-12;
      if (!inside) continue;
    }
    const auto& F = g.F[idx];
    r.r1 = std::max(r.r1, maxabs(F[F_uv]));
    r.r2 = std::max(r.r2, maxabs(Mat2(F[F_uub] + F[F_vvb])));
    r.r3 = std::max(r.r3, maxabs(F[F_ubvb]));
  }
  return r;
}

Mat2 curvature_on_twistor(const std::array<Mat2, 6>& F, const SpectralPoint& z) {
  // X = d_ub - z d_v, Y = d_vb + z d_u; at z = inf the rescaled pair (-d_v, d_u)
  if (z.is_inf()) return F[F_uv];
  cplx w = z.value();
  return F[F_ubvb] - w * (F[F_uub] + F[F_vvb]) + w * w * F[F_uv];
}

double sd_residual_twistor(const GaugeGrid& g, const std::vector<SpectralPoint>& zs) {
  double r = 0;
  for (size_t idx = 0; idx < g.F.size(); ++idx) {
    if (!g.grid.interior(g.grid.multi(idx), 2)) continue;
    for (const auto& z : zs) r = std::max(r, maxabs(curvature_on_twistor(g.F[idx], z)));
  }
  return r;
}

std::array<Mat2, 4> central_gradient(const std::vector<Mat2>& f, size_t idx, const GridSpec& g) {
  return lattice_grad(f, idx, g, Strides(g));
}

double yang_residual(const MatGrid& J) {
  const auto& grid = J.grid;
  grid.check();
  Strides st(grid);
  const size_t N = grid.size();
  std::vector<Mat2> Kub(N, Mat2::Zero()), Kvb(N, Mat2::Zero());
  for (size_t idx = 0; idx < N; ++idx) {
    if (!grid.interior(grid.multi(idx), 1)) continue;
    auto d = complex_derivs(lattice_grad(J.data, idx, grid, st));
    Mat2 iJ = inv2(J.data[idx]);
    Kub[idx] = d.dub * iJ;
    Kvb[idx] = d.dvb * iJ;
  }
  double r = 0;
  for (size_t idx = 0; idx < N; ++idx) {
    if (!grid.interior(grid.multi(idx), 2)) continue;
    auto a = complex_derivs(lattice_grad(Kub, idx, grid, st));
    auto b = complex_derivs(lattice_grad(Kvb, idx, grid, st));
    r = std::max(r, maxabs(Mat2(a.du + b.dv)));
  }
  return r;
}

std::array<std::array<Mat2, 4>, 4> real_frame_curvature(const std::array<Mat2, 6>& F) {
  // complex index order u, v, ub, vb
  std::array<std::array<Mat2, 4>, 4> Fc;
  for (auto& row : Fc) row.fill(Mat2::Zero());
  auto put = [&](int a, int b, const Mat2& m) {
    Fc[a][b] = m;
    Fc[b][a] = -m;
  };
  put(0, 1, F[F_uv]);
  put(0, 2, F[F_uub]);
  put(0, 3, F[F_uvb]);
  put(1, 2, F[F_vub]);
  put(1, 3, F[F_vvb]);
  put(2, 3, F[F_ubvb]);
  // A_mu = sum_a c[a][mu] A_a
  const cplx c[4][4] = {{1.0, I1, 0.0, 0.0}, {0.0, 0.0, 1.0, -I1}, {1.0, -I1, 0.0, 0.0}, {0.0, 0.0, 1.0, I1}};
  std::array<std::array<Mat2, 4>, 4> Fr;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      Mat2 s = Mat2::Zero();
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          if (c[a][mu] != 0.0 && c[b][nu] != 0.0) s += c[a][mu] * c[b][nu] * Fc[a][b];
      Fr[mu][nu] = s;
    }
  return Fr;
}

double density_from_curvature(const std::array<Mat2, 6>& F) {
  auto Fr = real_frame_curvature(F);
  cplx s = 0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu + 1; nu < 4; ++nu) s -= (Fr[mu][nu] * Fr[mu][nu]).trace();
  return s.real();
}

namespace {

// psi_0, psi_inf on the lattice x + h*offset, computed on demand
class PsiStencil {
 public:
  PsiStencil(const PatchingField& f, const R4Point& x, const DensityOptions& o) : f_(f), x_(x), o_(o) {}

  const std::pair<Mat2, Mat2>& at(const std::array<int, 4>& off) {
    auto it = cache_.find(off);
    if (it != cache_.end()) return it->second;
    R4Point p = x_;
    for (int a = 0; a < 4; ++a) p[a] += o_.h * off[a];
    Splitting s = split_at(f_, p, o_.annulus, o_.split);
    return cache_.emplace(off, std::make_pair(s.psi0_at0, s.psiInf_atInf)).first->second;
  }

  // fourth-order real-axis derivatives of a field g(offset)
  template <class Fn>
  std::array<Mat2, 4> grad(Fn&& g, const std::array<int, 4>& off) {
    std::array<Mat2, 4> d;
    for (int a = 0; a < 4; ++a) {
      auto o = [&](int k) {
        auto q = off;
        q[a] += k;
        return q;
      };
      d[a] = (-g(o(2)) + 8.0 * g(o(1)) - 8.0 * g(o(-1)) + g(o(-2))) / (12.0 * o_.h);
    }
    return d;
  }

  std::array<Mat2, 4> connection(const std::array<int, 4>& off) {
    auto d0 = complex_derivs(grad([&](const std::array<int, 4>& q) { return at(q).first; }, off));
    auto dinf = complex_derivs(grad([&](const std::array<int, 4>& q) { return at(q).second; }, off));
    const auto& p = at(off);
    return connection_from(p.first, p.second, d0, dinf);
  }

 private:
  const PatchingField& f_;
  R4Point x_;
  DensityOptions o_;
  std::map<std::array<int, 4>, std::pair<Mat2, Mat2>> cache_;
};

}  // namespace

std::array<Mat2, 6> curvature_at(const PatchingField& field, const R4Point& x, const DensityOptions& opt) {
  PsiStencil ps(field, x, opt);
  std::map<std::array<int, 4>, std::array<Mat2, 4>> Acache;
  auto A = [&](const std::array<int, 4>& off) -> const std::array<Mat2, 4>& {
    auto it = Acache.find(off);
    if (it == Acache.end()) it = Acache.emplace(off, ps.connection(off)).first;
    return it->second;
  };
  std::array<ComplexDerivs, 4> dA;
  for (int c = 0; c < 4; ++c) dA[c] = complex_derivs(ps.grad([&](const std::array<int, 4>& q) { return A(q)[c]; }, {0, 0, 0, 0}));
  return assemble_F(A({0, 0, 0, 0}), dA);
}

double action_density(const PatchingField& field, const R4Point& x, const DensityOptions& opt) {
  return density_from_curvature(curvature_at(field, x, opt));
}

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int evals = 0;
  double operator()(double a, double fa, double b, double fb, double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    evals += 2;
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15 * tol) return left + right + diff / 15;
    return (*this)(a, fa, m, fm, lm, flm, left, tol / 2, depth - 1) + (*this)(m, fm, b, fb, rm, frm, right, tol / 2, depth - 1);
  }
};

ActionResult radial_action(const PatchingField& field, const ActionOptions& opt) {
  DensityOptions dopt;
  dopt.h = 1e-2 * opt.scale;
  // generic direction, away from the coordinate axes
  const double dir[4] = {0.5, 0.5, 0.5, 0.5};
  auto dens = [&](double r) {
    R4Point x = opt.centre;
    for (int a = 0; a < 4; ++a) x[a] += r * dir[a];
    return action_density(field, x, dopt);
  };
  std::function<double(double)> f = [&](double r) { return 2 * pi * pi * r * r * r * dens(r); };
  const double R = opt.radius_factor * opt.scale;

  // coarse panels first, then adaptive refinement per panel
  const int panels = 8;
  ActionResult res;
  Simpson simp{f};
  std::vector<double> xs(2 * panels + 1), fs(2 * panels + 1);
  for (int i = 0; i <= 2 * panels; ++i) {
    xs[i] = R * i / (2.0 * panels);
    fs[i] = f(xs[i]);
  }
  simp.evals = 2 * panels + 1;
  double coarse = 0;
  for (int p = 0; p < panels; ++p) coarse += (xs[2 * p + 2] - xs[2 * p]) / 6 * (fs[2 * p] + 4 * fs[2 * p + 1] + fs[2 * p + 2]);
  double tol = opt.simpson_tol * std::max(std::abs(coarse), 1e-300);
  for (int p = 0; p < panels; ++p) {
    double a = xs[2 * p], m = xs[2 * p + 1], b = xs[2 * p + 2];
    double whole = (b - a) / 6 * (fs[2 * p] + 4 * fs[2 * p + 1] + fs[2 * p + 2]);
    res.bulk += simp(a, fs[2 * p], b, fs[2 * p + 2], m, fs[2 * p + 1], whole, tol / panels, 30);
  }
  res.evaluations = simp.evals;
  // density ~ r^-8 beyond R
  double rhoR = fs[2 * panels] / (2 * pi * pi * R * R * R);
  res.tail = pi * pi * rhoR * std::pow(R, 4) / 2;
  res.action = res.bulk + res.tail;
  res.tail_warning = res.tail > 0.01 * std::abs(res.bulk);
  if (res.tail > 0.1 * std::abs(res.bulk) && res.bulk != 0)
    throw Error(ErrorCode::QuadratureDiverged, "tail estimate exceeds 10% of bulk");
  return res;
}

ActionResult lattice_action(const PatchingField& field, const ActionOptions& opt) {
  if (opt.n < 2) throw Error(ErrorCode::ShapeMismatch, "lattice quadrature needs n >= 2");
  const double E = opt.extent, h = 2 * E / (opt.n - 1);
  // pad by two sites so curvature exists on the whole box
  GridSpec grid;
  for (int a = 0; a < 4; ++a) grid.axes[a] = {opt.centre[a] - E - 2 * h, opt.centre[a] + E + 2 * h, opt.n + 4};
  GaugeGrid g = reconstruct_connection(field, grid, opt.lattice_split);
  ActionResult res;
  double surface = 0;  // trapezoid integral of the density over the box faces
  auto on_face = [&](int i) { return i == 2 || i == opt.n + 1; };
  for (size_t idx = 0; idx < g.F.size(); ++idx) {
    auto i = grid.multi(idx);
    if (!grid.interior(i, 2)) continue;
    double rho = density_from_curvature(g.F[idx]);
    double w = std::pow(h, 4);
    for (int a = 0; a < 4; ++a)
      if (on_face(i[a])) w *= 0.5;
    res.bulk += w * rho;
    for (int a = 0; a < 4; ++a) {
      if (!on_face(i[a])) continue;
      double w3 = h * h * h;
      for (int b = 0; b < 4; ++b)
        if (b != a && on_face(i[b])) w3 *= 0.5;
      surface += w3 * rho;
    }
  }
  res.evaluations = int(grid.size());
  // continue each face value radially with r^-8 decay: tail = (E/4) * surface integral
  res.tail = 0.25 * E * surface;
  res.action = res.bulk + res.tail;
  res.tail_warning = res.tail > 0.01 * std::abs(res.bulk);
  if (res.tail > 0.1 * std::abs(res.bulk) && res.bulk != 0)
    throw Error(ErrorCode::QuadratureDiverged, "tail estimate exceeds 10% of bulk");
  return res;
}

}  // namespace

ActionResult action_integral(const PatchingField& field, const ActionOptions& opt) {
  return opt.quadrature == Quadrature::Radial ? radial_action(field, opt) : lattice_action(field, opt);
}

}  // namespace sdym
